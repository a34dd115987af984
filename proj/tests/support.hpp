#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "homolab/dynamics.hpp"
#include "homolab/harness.hpp"
#include "homolab/rng.hpp"
#include "homolab/types.hpp"

namespace homolab::testing {

inline BodySystem equal_masses(std::size_t n, double alpha, std::size_t dim = 2) {
  return BodySystem(std::vector<double>(n, 1.0), alpha, dim);
}

/// Masses in [0.5, 2], positions from the probe sampler.
inline std::pair<BodySystem, PhaseState> random_case(std::size_t n, double alpha, std::uint64_t seed,
                                                     std::uint64_t index, std::size_t dim = 2) {
  CounterRng rng(seed ^ 0x5bd1e995ULL, index);
  std::vector<double> masses(n);
  for (double& m : masses) m = rng.uniform(0.5, 2.0);
  BodySystem system(std::move(masses), alpha, dim);
  PhaseState state = sample_initial_state(system, seed, index);
  return {system, state};
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double distance(const PhaseState& s, std::size_t i, std::size_t k) {
  double d = 0.0;
  for (std::size_t c = 0; c < s.dim; ++c) {
    const double diff = s.position(i)[c] - s.position(k)[c];
    d += diff * diff;
  }
  return std::sqrt(d);
}

/// Finite-difference oracle: -(1/m_k) dV/dq_k with V = -U/(4 alpha),
/// central differences with step h.
inline std::vector<double> fd_accelerations(const BodySystem& system, const PhaseState& state, double h = 1e-6) {
  std::vector<double> out(state.positions.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    PhaseState plus = state;
    PhaseState minus = state;
    plus.positions[i] += h;
    minus.positions[i] -= h;
    const double v_plus = -potential_U(system, plus) / (4.0 * system.alpha());
    const double v_minus = -potential_U(system, minus) / (4.0 * system.alpha());
    out[i] = -(v_plus - v_minus) / (2.0 * h) / system.mass(i / state.dim);
  }
  return out;
}

}  // namespace homolab::testing
