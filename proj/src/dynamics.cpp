#include "homolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homolab {

PairTable pair_table(const BodySystem& system, std::span<const double> positions) {
  const std::size_t n = system.size();
  const std::size_t dim = system.dim();
  PairTable pairs;
  pairs.deltas.reserve(system.pair_count());
  pairs.weights.reserve(system.pair_count());
  pairs.pair_index.reserve(system.pair_count());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      double d = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = positions[i * dim + c] - positions[k * dim + c];
        d += diff * diff;
      }
      pairs.deltas.push_back(d);
      pairs.weights.push_back(2.0 * system.mass(i) * system.mass(k));
      pairs.pair_index.emplace_back(i, k);
    }
  }
  return pairs;
}

double inertia_from_pairs(const PairTable& pairs) {
  double sum = 0.0;
  for (std::size_t j = 0; j < pairs.size(); ++j) sum += pairs.weights[j] * pairs.deltas[j];
  return sum;
}

double potential_from_pairs(const PairTable& pairs, double alpha) {
  double sum = 0.0;
  for (std::size_t j = 0; j < pairs.size(); ++j) sum += pairs.weights[j] * std::pow(pairs.deltas[j], -alpha);
  return sum;
}

double system_scale(const BodySystem& system, const PhaseState& state) {
  check_compatible(system, state);
  return std::sqrt(inertia_from_pairs(pair_table(system, state.positions)) / system.ordered_mass_product_sum());
}

double min_separation(const PairTable& pairs) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double d : pairs.deltas) smallest = std::min(smallest, d);
  return std::sqrt(smallest);
}

PairTable pairwise_deltas(const BodySystem& system, const PhaseState& state, std::optional<double> reference_scale) {
  check_compatible(system, state);
  PairTable pairs = pair_table(system, state.positions);
  const double scale =
      reference_scale.value_or(std::sqrt(inertia_from_pairs(pairs) / system.ordered_mass_product_sum()));
  const double floor = collision_distance(scale);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const double distance = std::sqrt(pairs.deltas[j]);
    // Also catches the degenerate all-coincident state where scale == 0.
    if (distance < floor || pairs.deltas[j] <= 0.0) {
      throw CollisionError(pairs.pair_index[j].first, pairs.pair_index[j].second, distance);
    }
  }
  return pairs;
}

namespace {

/// d^(-alpha - 1), with exact-form fast paths for the Newtonian and
/// inverse-cube cases.
template <class Real>
Real force_factor(Real d, double alpha) {
  if (alpha == 0.5) return Real(1) / (d * std::sqrt(d));
  if (alpha == 1.0) return Real(1) / (d * d);
  return std::pow(d, static_cast<Real>(-alpha - 1.0));
}

template <class Real>
void accumulate_accelerations(const BodySystem& system, std::span<const Real> positions, std::span<Real> out) {
  const std::size_t n = system.size();
  const std::size_t dim = system.dim();
  std::fill(out.begin(), out.end(), Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    const Real* qi = positions.data() + i * dim;
    for (std::size_t k = i + 1; k < n; ++k) {
      const Real* qk = positions.data() + k * dim;
      Real d = 0;
      for (std::size_t c = 0; c < dim; ++c) {
        const Real diff = qk[c] - qi[c];
        d += diff * diff;
      }
      const Real f = force_factor(d, system.alpha());
      const Real wi = static_cast<Real>(system.mass(k)) * f;
      const Real wk = static_cast<Real>(system.mass(i)) * f;
      for (std::size_t c = 0; c < dim; ++c) {
        const Real diff = qk[c] - qi[c];
        out[i * dim + c] += wi * diff;
        out[k * dim + c] -= wk * diff;
      }
    }
  }
}

}  // namespace

void accelerations_into(const BodySystem& system, std::span<const double> positions, std::span<double> out) {
  accumulate_accelerations(system, positions, out);
}

void accelerations_into(const BodySystem& system, std::span<const long double> positions, std::span<long double> out) {
  accumulate_accelerations(system, positions, out);
}

std::vector<double> accelerations(const BodySystem& system, const PhaseState& state) {
  pairwise_deltas(system, state);
  std::vector<double> acc(state.positions.size());
  accelerations_into(system, state.positions, acc);
  return acc;
}

double moment_of_inertia(const BodySystem& system, const PhaseState& state) {
  check_compatible(system, state);
  return inertia_from_pairs(pair_table(system, state.positions));
}

double potential_U(const BodySystem& system, const PhaseState& state) {
  return potential_from_pairs(pairwise_deltas(system, state), system.alpha());
}

double configurational_measure(const BodySystem& system, const PhaseState& state) {
  const PairTable pairs = pairwise_deltas(system, state);
  return std::pow(inertia_from_pairs(pairs), system.alpha()) * potential_from_pairs(pairs, system.alpha());
}

double kinetic_energy(const BodySystem& system, const PhaseState& state) {
  check_compatible(system, state);
  double kinetic = 0.0;
  for (std::size_t k = 0; k < system.size(); ++k) {
    double v2 = 0.0;
    for (double v : state.velocity(k)) v2 += v * v;
    kinetic += 0.5 * system.mass(k) * v2;
  }
  return kinetic;
}

double energy(const BodySystem& system, const PhaseState& state) {
  const double u = potential_U(system, state);
  return kinetic_energy(system, state) - u / (4.0 * system.alpha());
}

std::vector<double> linear_momentum(const BodySystem& system, const PhaseState& state) {
  check_compatible(system, state);
  std::vector<double> p(system.dim(), 0.0);
  for (std::size_t k = 0; k < system.size(); ++k) {
    for (std::size_t c = 0; c < system.dim(); ++c) p[c] += system.mass(k) * state.velocity(k)[c];
  }
  return p;
}

std::vector<double> center_of_mass(const BodySystem& system, const PhaseState& state) {
  check_compatible(system, state);
  std::vector<double> com(system.dim(), 0.0);
  for (std::size_t k = 0; k < system.size(); ++k) {
    for (std::size_t c = 0; c < system.dim(); ++c) com[c] += system.mass(k) * state.position(k)[c];
  }
  const double total = system.total_mass();
  for (double& x : com) x /= total;
  return com;
}

std::vector<double> angular_momentum(const BodySystem& system, const PhaseState& state) {
  const std::size_t dim = system.dim();
  if (dim != 2 && dim != 3) {
    throw UnsupportedDimensionError("angular momentum is only defined for dim 2 or 3");
  }
  const std::vector<double> com = center_of_mass(system, state);
  const std::vector<double> p = linear_momentum(system, state);
  const double total = system.total_mass();
  std::vector<double> vcom(dim);
  for (std::size_t c = 0; c < dim; ++c) vcom[c] = p[c] / total;

  std::vector<double> l(dim == 2 ? 1 : 3, 0.0);
  for (std::size_t k = 0; k < system.size(); ++k) {
    const double m = system.mass(k);
    const auto q = state.position(k);
    const auto v = state.velocity(k);
    double r[3] = {0.0, 0.0, 0.0};
    double u[3] = {0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < dim; ++c) {
      r[c] = q[c] - com[c];
      u[c] = v[c] - vcom[c];
    }
    if (dim == 2) {
      l[0] += m * (r[0] * u[1] - r[1] * u[0]);
    } else {
      l[0] += m * (r[1] * u[2] - r[2] * u[1]);
      l[1] += m * (r[2] * u[0] - r[0] * u[2]);
      l[2] += m * (r[0] * u[1] - r[1] * u[0]);
    }
  }
  return l;
}

}  // namespace homolab
