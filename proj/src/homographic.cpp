#include "homolab/homographic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homolab/dynamics.hpp"

namespace homolab {

namespace {

void require_planar_cc(const CentralConfiguration& cc) {
  if (cc.system.dim() != 2) throw UnsupportedDimensionError("homographic orbits are built in the plane (dim = 2)");
  if (!(cc.lambda > 0.0)) throw std::invalid_argument("central configuration multiplier must be positive");
  if (cc.positions.size() != 2 * cc.system.size())
    throw std::invalid_argument("central configuration positions do not match the system");
}

}  // namespace

PhaseState make_relative_equilibrium(const CentralConfiguration& cc) {
  return make_homographic(HomographicSpec{.cc = cc, .r0 = 1.0, .rdot0 = 0.0, .theta_dot0 = std::sqrt(cc.lambda)});
}

PhaseState make_homographic(const HomographicSpec& spec) {
  require_planar_cc(spec.cc);
  if (!(spec.r0 > 0.0)) throw std::invalid_argument("homographic scale factor r0 must be positive");
  if (spec.is_static()) throw std::invalid_argument("static homographic spec (rdot0 = theta_dot0 = 0) is not a solution");

  const std::vector<double>& q0 = spec.cc.positions;
  const std::size_t n = spec.cc.system.size();
  std::vector<double> q(q0.size());
  std::vector<double> v(q0.size());
  const double spin = spec.r0 * spec.theta_dot0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = q0[2 * k];
    const double y = q0[2 * k + 1];
    q[2 * k] = spec.r0 * x;
    q[2 * k + 1] = spec.r0 * y;
    v[2 * k] = spec.rdot0 * x - spin * y;
    v[2 * k + 1] = spec.rdot0 * y + spin * x;
  }
  return PhaseState(0.0, 2, std::move(q), std::move(v));
}

std::vector<std::vector<double>> integrate_reduced(const HomographicSpec& spec, std::span<const double> times,
                                                   const IntegratorSpec& integrator) {
  require_planar_cc(spec.cc);
  const double lambda = spec.cc.lambda;
  const double exponent = -2.0 * spec.cc.system.alpha() - 1.0;
  const double h = spec.r0 * spec.r0 * spec.theta_dot0;
  Dop853::Rhs rhs = [=](double, std::span<const double> y, std::span<double> dydt) {
    const double r = y[0];
    const double omega = h / (r * r);
    dydt[0] = y[1];
    dydt[1] = r * omega * omega - lambda * std::pow(r, exponent);
    dydt[2] = omega;
  };
  return solve_sampled(rhs, times.front(), {spec.r0, spec.rdot0, 0.0}, times, integrator);
}

std::vector<std::size_t> usable_samples(const Trajectory& traj) {
  std::vector<std::size_t> keep;
  keep.reserve(traj.samples.size());
  const double guard = 10.0 * collision_distance(traj.reference_scale);
  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    if (min_separation(pair_table(traj.system, traj.samples[s].positions)) > guard) keep.push_back(s);
  }
  return keep;
}

RelativeEquilibriumCheck is_relative_equilibrium(const Trajectory& traj, double tol) {
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  const PairTable initial = pair_table(traj.system, traj.samples.front().positions);
  RelativeEquilibriumCheck out;
  for (std::size_t s : usable_samples(traj)) {
    const PairTable now = pair_table(traj.system, traj.samples[s].positions);
    for (std::size_t j = 0; j < now.size(); ++j) {
      out.max_dev = std::max(out.max_dev, std::abs(std::sqrt(now.deltas[j] / initial.deltas[j]) - 1.0));
    }
  }
  out.holds = out.max_dev <= tol;
  return out;
}

std::size_t reference_pair(const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  const PairTable initial = pair_table(traj.system, traj.samples.front().positions);
  return static_cast<std::size_t>(std::max_element(initial.deltas.begin(), initial.deltas.end()) -
                                  initial.deltas.begin());
}

double homographic_deviation(const Trajectory& traj) {
  const std::size_t ref = reference_pair(traj);
  const PairTable initial = pair_table(traj.system, traj.samples.front().positions);
  std::vector<double> initial_ratio(initial.size());
  for (std::size_t j = 0; j < initial.size(); ++j)
    initial_ratio[j] = std::sqrt(initial.deltas[j] / initial.deltas[ref]);

  double deviation = 0.0;
  for (std::size_t s : usable_samples(traj)) {
    const PairTable now = pair_table(traj.system, traj.samples[s].positions);
    for (std::size_t j = 0; j < now.size(); ++j) {
      const double ratio = std::sqrt(now.deltas[j] / now.deltas[ref]);
      deviation = std::max(deviation, std::abs(ratio / initial_ratio[j] - 1.0));
    }
  }
  return deviation;
}

}  // namespace homolab
