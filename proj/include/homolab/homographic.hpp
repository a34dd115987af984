#pragma once

#include <cstddef>
#include <vector>

#include "homolab/central_config.hpp"
#include "homolab/integrator.hpp"
#include "homolab/types.hpp"

namespace homolab {

/// Initial data for the planar homographic solution
/// q_k(t) = r(t) R(theta(t)) q_k^0 built on a central configuration.
struct HomographicSpec {
  CentralConfiguration cc;
  double r0 = 1.0;
  double rdot0 = 0.0;
  double theta_dot0 = 0.0;

  /// rdot0 == theta_dot0 == 0 gives a static state, which is not a solution.
  bool is_static() const noexcept { return rdot0 == 0.0 && theta_dot0 == 0.0; }
};

/// Rigid rotation at omega = sqrt(lambda) about the center of mass.
PhaseState make_relative_equilibrium(const CentralConfiguration& cc);

/// Positions r0 q^0, velocities rdot0 q^0 + r0 theta_dot0 J q^0 (J the
/// counter-clockwise quarter turn). Throws std::invalid_argument for static
/// or non-positive-r0 specs.
PhaseState make_homographic(const HomographicSpec& spec);

/// Planar radial model r'' = r theta'^2 - lambda r^(-2 alpha - 1),
/// (r^2 theta')' = 0, sampled at `times`. Each row is (r, r', theta).
std::vector<std::vector<double>> integrate_reduced(const HomographicSpec& spec, std::span<const double> times,
                                                   const IntegratorSpec& integrator);

/// Samples whose smallest separation exceeds ten times the collision floor.
/// Detectors take their maxima over these only.
std::vector<std::size_t> usable_samples(const Trajectory& traj);

struct RelativeEquilibriumCheck {
  bool holds = false;
  double max_dev = 0.0;
};

/// max over pairs and usable samples of | |q_i - q_k|(t) / |q_i - q_k|(t0) - 1 |.
RelativeEquilibriumCheck is_relative_equilibrium(const Trajectory& traj, double tol);

/// Pair with the largest initial squared distance (first such on ties).
std::size_t reference_pair(const Trajectory& traj);

/// Largest relative drift of any distance ratio |q_i - q_k| / |q_ref| from its
/// initial value; zero for exactly homographic motion.
double homographic_deviation(const Trajectory& traj);

}  // namespace homolab
