#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "homolab/types.hpp"

namespace homolab {

/// Certification threshold on the stacked balance residual.
inline constexpr double kCertifiedResidual = 1e-12;

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::size_t iterations, double residual_norm)
      : std::runtime_error(what), iterations_(iterations), residual_norm_(residual_norm) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  std::size_t iterations_;
  double residual_norm_;
};

/// A planar configuration in which every acceleration equals -lambda times
/// the position relative to the center of mass.
///
/// Gauge: center of mass at the origin, moment of inertia equal to
/// sum_{i!=j} m_i m_j, and the first body not at the origin on the positive
/// x axis.
struct CentralConfiguration {
  BodySystem system;
  std::vector<double> positions;
  double lambda = 0.0;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

struct BalanceResidual {
  std::vector<double> residual;
  double lambda = 0.0;
  double norm = 0.0;
};

/// r_k = q''_k + lambda q_k with the least-squares multiplier
/// lambda = -(sum m_k q''_k . q_k) / (sum m_k |q_k|^2). Positions are taken
/// as given (center of mass assumed at the origin). Throws CollisionError.
BalanceResidual cc_residual(const BodySystem& system, std::span<const double> positions);

/// Moment of inertia targeted by the gauge.
double gauge_inertia(const BodySystem& system);

/// Translate, rescale and rotate a planar configuration into the gauge.
std::vector<double> regauge(const BodySystem& system, std::span<const double> positions);

struct SolverOptions {
  std::size_t max_iterations = 200;
  double target_residual = kCertifiedResidual;
};

/// Damped Gauss-Newton on the balance residual with the gauge constraints
/// linearized into the step. Throws NonConvergenceError when no certified
/// configuration is reached, CollisionError if an iterate collides, and
/// UnsupportedDimensionError unless dim == 2.
CentralConfiguration solve_central_config(const BodySystem& system, std::span<const double> seed_positions,
                                          const SolverOptions& options = {});

enum class SeedKind { equilateral, collinear, ngon };

SeedKind parse_seed_kind(std::string_view name);
std::string_view to_string(SeedKind kind);

/// Textbook planar seeds with the geometric centroid at the origin:
/// equilateral (n = 3, side `scale`), collinear (spacing `scale`),
/// ngon (circumradius `scale`, body 0 on the positive x axis).
std::vector<double> known_seeds(SeedKind kind, std::size_t n, double scale = 1.0);

/// Dense Jacobian of cc_residual, row-major (2n x 2n). Exposed for testing.
std::vector<double> cc_residual_jacobian(const BodySystem& system, std::span<const double> positions);

}  // namespace homolab
