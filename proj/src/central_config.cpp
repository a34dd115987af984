#include "homolab/central_config.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "homolab/dynamics.hpp"

namespace homolab {

namespace {

void require_planar(const BodySystem& system) {
  if (system.dim() != 2) throw UnsupportedDimensionError("central configurations are solved in the plane (dim = 2)");
}

void check_layout(const BodySystem& system, std::span<const double> positions) {
  if (positions.size() != system.size() * system.dim())
    throw std::invalid_argument("position array does not match the system");
}

void check_collision(const BodySystem& system, std::span<const double> positions) {
  const PairTable pairs = pair_table(system, positions);
  const double scale = std::sqrt(inertia_from_pairs(pairs) / system.ordered_mass_product_sum());
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const double distance = std::sqrt(pairs.deltas[j]);
    if (distance < collision_distance(scale) || pairs.deltas[j] <= 0.0)
      throw CollisionError(pairs.pair_index[j].first, pairs.pair_index[j].second, distance);
  }
}

double stacked_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

BalanceResidual cc_residual(const BodySystem& system, std::span<const double> positions) {
  check_layout(system, positions);
  check_collision(system, positions);
  const std::size_t dim = system.dim();
  std::vector<double> acc(positions.size());
  accelerations_into(system, positions, acc);

  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double m = system.mass(i / dim);
    numer += m * acc[i] * positions[i];
    denom += m * positions[i] * positions[i];
  }
  BalanceResidual out;
  out.lambda = -numer / denom;
  out.residual.resize(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out.residual[i] = acc[i] + out.lambda * positions[i];
  out.norm = stacked_norm(out.residual);
  return out;
}

std::vector<double> cc_residual_jacobian(const BodySystem& system, std::span<const double> positions) {
  check_layout(system, positions);
  const std::size_t n = system.size();
  const std::size_t dim = system.dim();
  const std::size_t size = n * dim;
  const double p = -system.alpha() - 1.0;

  Eigen::MatrixXd ja = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      double d = 0.0;
      std::vector<double> u(dim);
      for (std::size_t c = 0; c < dim; ++c) {
        u[c] = positions[j * dim + c] - positions[k * dim + c];
        d += u[c] * u[c];
      }
      const double dp = std::pow(d, p);
      const double dp1 = 2.0 * p * std::pow(d, p - 1.0);
      const double mj = system.mass(j);
      for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
          const double block = mj * ((r == c ? dp : 0.0) + dp1 * u[r] * u[c]);
          const auto row = static_cast<Eigen::Index>(k * dim + r);
          ja(row, static_cast<Eigen::Index>(j * dim + c)) += block;
          ja(row, static_cast<Eigen::Index>(k * dim + c)) -= block;
        }
      }
    }
  }

  std::vector<double> acc(size);
  accelerations_into(system, positions, acc);
  Eigen::VectorXd x(static_cast<Eigen::Index>(size));
  Eigen::VectorXd w(static_cast<Eigen::Index>(size));
  Eigen::VectorXd a(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) {
    x(static_cast<Eigen::Index>(i)) = positions[i];
    w(static_cast<Eigen::Index>(i)) = system.mass(i / dim);
    a(static_cast<Eigen::Index>(i)) = acc[i];
  }
  const double numer = (w.array() * a.array() * x.array()).sum();
  const double denom = (w.array() * x.array() * x.array()).sum();
  const double lambda = -numer / denom;

  const Eigen::VectorXd grad_numer = ja.transpose() * (w.array() * x.array()).matrix() + (w.array() * a.array()).matrix();
  const Eigen::VectorXd grad_denom = 2.0 * (w.array() * x.array()).matrix();
  const Eigen::VectorXd grad_lambda = -(grad_numer * denom - numer * grad_denom) / (denom * denom);

  Eigen::MatrixXd jr = ja + lambda * Eigen::MatrixXd::Identity(ja.rows(), ja.cols()) + x * grad_lambda.transpose();
  std::vector<double> out(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c)
      out[r * size + c] = jr(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

double gauge_inertia(const BodySystem& system) { return system.ordered_mass_product_sum(); }

std::vector<double> regauge(const BodySystem& system, std::span<const double> positions) {
  require_planar(system);
  check_layout(system, positions);
  const std::size_t n = system.size();
  std::vector<double> q(positions.begin(), positions.end());

  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cx += system.mass(k) * q[2 * k];
    cy += system.mass(k) * q[2 * k + 1];
  }
  cx /= system.total_mass();
  cy /= system.total_mass();
  for (std::size_t k = 0; k < n; ++k) {
    q[2 * k] -= cx;
    q[2 * k + 1] -= cy;
  }

  const double inertia = inertia_from_pairs(pair_table(system, q));
  if (!(inertia > 0.0)) throw std::invalid_argument("cannot gauge a configuration with all bodies coincident");
  const double s = std::sqrt(gauge_inertia(system) / inertia);
  for (double& x : q) x *= s;

  // Anchor: first body clear of the origin. Unit mean-square separation makes
  // 1e-8 an absolute tolerance here.
  for (std::size_t k = 0; k < n; ++k) {
    const double x = q[2 * k];
    const double y = q[2 * k + 1];
    const double r = std::hypot(x, y);
    if (r <= 1e-8) continue;
    if (y == 0.0 && x > 0.0) break;
    const double c = x / r;
    const double sn = -y / r;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = q[2 * i];
      const double yi = q[2 * i + 1];
      q[2 * i] = c * xi - sn * yi;
      q[2 * i + 1] = sn * xi + c * yi;
    }
    q[2 * k + 1] = 0.0;
    break;
  }
  return q;
}

CentralConfiguration solve_central_config(const BodySystem& system, std::span<const double> seed_positions,
                                          const SolverOptions& options) {
  require_planar(system);
  check_layout(system, seed_positions);
  check_collision(system, seed_positions);

  const std::size_t n = system.size();
  const std::size_t size = 2 * n;
  const double inertia_ref = gauge_inertia(system);

  std::vector<double> x = regauge(system, seed_positions);
  BalanceResidual res = cc_residual(system, x);

  std::size_t iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    if (res.norm <= options.target_residual * 1e-2) break;

    const std::vector<double> jac = cc_residual_jacobian(system, x);
    const auto rows = static_cast<Eigen::Index>(size + 4);
    const auto cols = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (std::size_t r = 0; r < size; ++r) {
      for (std::size_t c = 0; c < size; ++c)
        lhs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = jac[r * size + c];
      rhs(static_cast<Eigen::Index>(r)) = -res.residual[r];
    }

    // Linearized gauge rows: center of mass, moment of inertia, anchor angle.
    const auto com_row = static_cast<Eigen::Index>(size);
    const auto inertia_row = com_row + 2;
    const auto anchor_row = com_row + 3;
    const double total = system.total_mass();
    for (std::size_t k = 0; k < n; ++k) {
      const double share = system.mass(k) / total;
      lhs(com_row, static_cast<Eigen::Index>(2 * k)) = share;
      lhs(com_row + 1, static_cast<Eigen::Index>(2 * k + 1)) = share;
      rhs(com_row) -= share * x[2 * k];
      rhs(com_row + 1) -= share * x[2 * k + 1];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        for (std::size_t c = 0; c < 2; ++c) {
          lhs(inertia_row, static_cast<Eigen::Index>(2 * k + c)) +=
              4.0 * system.mass(k) * system.mass(j) * (x[2 * k + c] - x[2 * j + c]) / inertia_ref;
        }
      }
    }
    rhs(inertia_row) = (inertia_ref - inertia_from_pairs(pair_table(system, x))) / inertia_ref;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::hypot(x[2 * k], x[2 * k + 1]) <= 1e-8) continue;
      lhs(anchor_row, static_cast<Eigen::Index>(2 * k + 1)) = 1.0;
      rhs(anchor_row) = -x[2 * k + 1];
      break;
    }

    const Eigen::VectorXd delta = lhs.completeOrthogonalDecomposition().solve(rhs);

    bool accepted = false;
    double step = 1.0;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      std::vector<double> trial(size);
      for (std::size_t i = 0; i < size; ++i) trial[i] = x[i] + step * delta(static_cast<Eigen::Index>(i));
      BalanceResidual trial_res;
      try {
        trial = regauge(system, trial);
        trial_res = cc_residual(system, trial);
      } catch (const CollisionError&) {
        continue;
      }
      const bool good = halving == 0 ? trial_res.norm <= 0.5 * res.norm : trial_res.norm < res.norm;
      if (good) {
        x = std::move(trial);
        res = std::move(trial_res);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (res.norm <= options.target_residual) break;
      throw NonConvergenceError("central configuration line search stalled (residual " +
                                    std::to_string(res.norm) + ")",
                                iteration, res.norm);
    }
  }

  if (!(res.norm <= options.target_residual)) {
    throw NonConvergenceError("central configuration solver did not converge within " +
                                  std::to_string(options.max_iterations) + " iterations",
                              iteration, res.norm);
  }
  if (!(res.lambda > 0.0)) {
    throw NonConvergenceError("converged configuration has a non-positive multiplier", iteration, res.norm);
  }
  return CentralConfiguration{
      .system = system, .positions = std::move(x), .lambda = res.lambda, .residual_norm = res.norm,
      .iterations = iteration};
}

SeedKind parse_seed_kind(std::string_view name) {
  if (name == "equilateral") return SeedKind::equilateral;
  if (name == "collinear") return SeedKind::collinear;
  if (name == "ngon") return SeedKind::ngon;
  throw std::invalid_argument("unknown seed kind '" + std::string(name) + "'");
}

std::string_view to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::equilateral:
      return "equilateral";
    case SeedKind::collinear:
      return "collinear";
    case SeedKind::ngon:
      return "ngon";
  }
  return "unknown";
}

namespace {

// Vertices on a circle, body 0 on +x. Angles are evaluated in long double and
// vertex n-k is the exact mirror of vertex k, so the seed keeps its
// reflection symmetry after rounding.
void regular_polygon(std::vector<double>& q, double radius) {
  const std::size_t n = q.size() / 2;
  for (std::size_t k = 0; 2 * k <= n; ++k) {
    const long double angle =
        2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / static_cast<long double>(n);
    // cos(pi/2) in long double is ~1e-20, not zero.
    const auto snap = [radius](long double v) {
      return std::abs(v) < 1e-18L * radius ? 0.0 : static_cast<double>(radius * v);
    };
    const double x = snap(std::cos(angle));
    const double y = 2 * k == n || k == 0 ? 0.0 : snap(std::sin(angle));
    q[2 * k] = x;
    q[2 * k + 1] = y;
    if (k != 0 && 2 * k != n) {
      q[2 * (n - k)] = x;
      q[2 * (n - k) + 1] = -y;
    }
  }
}

}  // namespace

std::vector<double> known_seeds(SeedKind kind, std::size_t n, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("seed scale must be positive");
  std::vector<double> q(2 * n, 0.0);
  switch (kind) {
    case SeedKind::equilateral: {
      if (n != 3) throw std::invalid_argument("equilateral seed requires n = 3");
      regular_polygon(q, scale / std::numbers::sqrt3);
      break;
    }
    case SeedKind::collinear: {
      if (n < 2) throw std::invalid_argument("collinear seed requires n >= 2");
      const double middle = 0.5 * static_cast<double>(n - 1);
      for (std::size_t k = 0; k < n; ++k) q[2 * k] = scale * (static_cast<double>(k) - middle);
      break;
    }
    case SeedKind::ngon: {
      if (n < 2) throw std::invalid_argument("ngon seed requires n >= 2");
      regular_polygon(q, scale);
      break;
    }
  }
  return q;
}

}  // namespace homolab
