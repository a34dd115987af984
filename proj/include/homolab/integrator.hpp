#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "homolab/dop853.hpp"
#include "homolab/types.hpp"

namespace homolab {

struct IntegratorSpec {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  double sample_dt = 0.01;
  std::size_t max_steps = 20'000'000;

  /// Throws std::invalid_argument on non-positive tolerances or sample_dt.
  void validate() const;
};

/// Sample times t0, t0 + dt, ..., with t_end appended when the final interval
/// is short.
std::vector<double> sample_times(double t0, double t_end, double dt);

enum class Termination { completed, collision, step_failure };

std::string_view to_string(Termination reason);

struct SampleDiagnostics {
  double inertia = 0.0;
  double potential = 0.0;
  double measure = 0.0;
  double energy = 0.0;
  std::vector<double> linear_momentum;
  /// Empty when the dimension has no angular momentum (dim not 2 or 3).
  std::vector<double> angular_momentum;
};

SampleDiagnostics diagnose(const BodySystem& system, const PhaseState& state);

struct Trajectory {
  BodySystem system;
  std::vector<PhaseState> samples;
  std::vector<SampleDiagnostics> diagnostics;
  Termination termination = Termination::completed;
  /// Length scale of the initial state; the collision floor is relative to it.
  double reference_scale = 0.0;
  double t_end = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;

  bool empty() const noexcept { return samples.empty(); }
};

/// Integrate the n-body equations from `initial` to `t_end`, sampling every
/// spec.sample_dt. Collisions and step-size underflow end the run early and
/// are reported through Trajectory::termination rather than thrown.
///
/// The state is carried in extended precision (long double); samples are
/// rounded to double on output.
Trajectory integrate(const BodySystem& system, const PhaseState& initial, double t_end, const IntegratorSpec& spec);

/// Generic dense-sampled solve of y' = f(t, y), used for reduced models.
/// Returns one state per entry of `times` (which must be increasing and start
/// at t0). Throws std::runtime_error if the step size underflows.
std::vector<std::vector<double>> solve_sampled(const Dop853::Rhs& rhs, double t0, std::vector<double> y0,
                                               std::span<const double> times, const IntegratorSpec& spec);

}  // namespace homolab
