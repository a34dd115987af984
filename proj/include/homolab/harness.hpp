#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "homolab/central_config.hpp"
#include "homolab/homographic.hpp"
#include "homolab/integrator.hpp"
#include "homolab/types.hpp"

namespace homolab {

/// Relative span of I^alpha U below which a trajectory counts as constant-measure.
inline constexpr double kConstThreshold = 1e-6;
/// Distance-ratio deviation above which a trajectory counts as non-homographic.
inline constexpr double kHomoThreshold = 1e-2;
/// Bound on measure_variation for constructed homographic orbits.
inline constexpr double kForwardTolerance = 1e-7;
/// Bound on the relative gap between the two evaluations of C.
inline constexpr double kIdentityTolerance = 1e-12;

enum class Verdict { consistent, violation };

std::string_view to_string(Verdict verdict);

/// Verdict rule: a violation is a constant-measure, non-homographic orbit.
Verdict classify(double measure_variation, double homographic_dev);

struct ConjectureReport {
  std::string label;
  double measure_variation = 0.0;
  double homographic_dev = 0.0;
  double identity_residual = 0.0;
  Verdict verdict = Verdict::consistent;
  /// Set by verify_forward: measure_variation <= kForwardTolerance.
  bool forward_ok = true;
  std::uint64_t seed = 0;
  std::size_t sample_index = 0;
  double t_end = 0.0;
  Termination termination = Termination::completed;
  std::size_t sample_count = 0;
  std::size_t pair_count = 0;
};

/// (max - min) / median of I^alpha U over the usable samples.
double measure_variation(const Trajectory& traj);

struct IdentityForms {
  double direct = 0.0;     ///< (sum M_j D_j)^a (sum M_j D_j^-a)
  double via_ratios = 0.0; ///< (M_1 + sum M_j w_j)^a (M_1 + sum M_j w_j^-a), w_j = D_j / D_1
  double residual = 0.0;   ///< |direct - via_ratios| / direct
};

/// Evaluates C = I^alpha U directly and through the ratios w_j. Throws
/// CollisionError for colliding states.
IdentityForms identity_forms(const BodySystem& system, const PhaseState& state);

double identity_check(const BodySystem& system, const PhaseState& state);

/// w_j(t) = D_j(t) / D_1(t) for j = 2..N, with pair 1 the lexicographically
/// first pair. values[s] holds the N - 1 ratios of sample s.
struct WTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  /// Largest relative span (max - min) / |first| over all ratio series.
  double max_relative_span() const;
};

/// Throws std::logic_error if any ratio is not strictly positive.
WTrace w_traces(const Trajectory& traj);

/// Summarize a trajectory. identity_residual is the maximum over the usable
/// samples.
ConjectureReport assess(const Trajectory& traj, std::string label = {});

struct ForwardRun {
  ConjectureReport report;
  Trajectory trajectory;
};

/// Build, integrate and assess one homographic spec on a certified
/// configuration (spec.cc is replaced by `cc`).
ForwardRun verify_forward_run(const CentralConfiguration& cc, HomographicSpec spec, double t_end,
                              const IntegratorSpec& integrator);

std::vector<ConjectureReport> verify_forward(const CentralConfiguration& cc, const std::vector<HomographicSpec>& specs,
                                             double t_end, const IntegratorSpec& integrator);

/// Random initial condition for sample `index` of a seeded probe: positions
/// uniform in [-1, 1]^dim (redrawn while any separation is below 0.1),
/// velocities uniform in [-0.5, 0.5]^dim, then the center of mass and the
/// total momentum are removed.
PhaseState sample_initial_state(const BodySystem& system, std::uint64_t seed, std::uint64_t index);

/// Quadrant counts over (measure_variation < kConstThreshold,
/// homographic_dev > kHomoThreshold).
struct ScatterSummary {
  std::size_t constant_homographic = 0;
  std::size_t constant_nonhomographic = 0;  ///< must stay empty
  std::size_t varying_homographic = 0;
  std::size_t varying_nonhomographic = 0;
  std::size_t collisions = 0;
  std::size_t step_failures = 0;

  std::size_t total() const noexcept {
    return constant_homographic + constant_nonhomographic + varying_homographic + varying_nonhomographic;
  }
  std::size_t violations() const noexcept { return constant_nonhomographic; }
};

struct ProbeResult {
  std::vector<ConjectureReport> reports;
  ScatterSummary summary;
};

/// Integrate n_samples random initial conditions and classify each. Samples
/// are spread over `jobs` worker threads; reports come back ordered by
/// sample index and do not depend on the thread count.
ProbeResult probe_converse(const BodySystem& system, std::size_t n_samples, std::uint64_t seed, double t_end,
                           const IntegratorSpec& integrator, std::size_t jobs = 1);

ScatterSummary summarize(const std::vector<ConjectureReport>& reports);

/// Angular-rate factor (of sqrt(lambda)) for the elliptic-like catalog orbits.
inline constexpr double kEllipticThetaScale = 0.8;
/// Initial radial rate of the homothetic catalog orbits (collapsing).
inline constexpr double kHomotheticRdot = -0.5;

/// One entry of the built-in forward-verification catalog.
struct CatalogEntry {
  std::string label;
  HomographicSpec spec;
};

/// Equal unit masses: equilateral/circular, equilateral/elliptic-like
/// (theta_dot0 = 0.8 sqrt(lambda)), collinear/homothetic and square/circular.
std::vector<CatalogEntry> forward_catalog(double alpha);

}  // namespace homolab
