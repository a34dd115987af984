#pragma once

#include <optional>
#include <span>
#include <vector>

#include "homolab/types.hpp"

namespace homolab {

/// Relative collision floor: a state is in collision once its smallest
/// separation drops below this fraction of the reference system scale.
inline constexpr double kCollisionFraction = 1e-8;

/// Mean-square-separation length scale sqrt(I / sum_{i!=j} m_i m_j).
double system_scale(const BodySystem& system, const PhaseState& state);

/// Absolute collision distance for a given reference scale.
inline double collision_distance(double reference_scale) { return kCollisionFraction * reference_scale; }

/// Squared distances for every unordered pair, with no collision check.
PairTable pair_table(const BodySystem& system, std::span<const double> positions);

/// Squared pair distances in lexicographic pair order. Throws CollisionError
/// when the smallest separation is below the collision floor. The floor is
/// taken relative to `reference_scale`, or to the state's own scale if none
/// is given.
PairTable pairwise_deltas(const BodySystem& system, const PhaseState& state,
                          std::optional<double> reference_scale = std::nullopt);

/// Smallest pairwise separation (not squared).
double min_separation(const PairTable& pairs);

/// q''_k = sum_{j != k} m_j (q_j - q_k) |q_j - q_k|^(-2 alpha - 2), written into
/// `out` (body-major, n*dim). Does not check for collisions.
void accelerations_into(const BodySystem& system, std::span<const double> positions, std::span<double> out);
void accelerations_into(const BodySystem& system, std::span<const long double> positions, std::span<long double> out);

std::vector<double> accelerations(const BodySystem& system, const PhaseState& state);

/// I = sum_{i != j} m_i m_j |q_i - q_j|^2, summed over the pair table in flat
/// pair order.
double moment_of_inertia(const BodySystem& system, const PhaseState& state);

double potential_U(const BodySystem& system, const PhaseState& state);

/// I^alpha U. Invariant under uniform scaling of the positions.
double configurational_measure(const BodySystem& system, const PhaseState& state);

/// Kinetic energy minus U / (4 alpha); conserved along solutions.
double energy(const BodySystem& system, const PhaseState& state);

double kinetic_energy(const BodySystem& system, const PhaseState& state);

std::vector<double> linear_momentum(const BodySystem& system, const PhaseState& state);

std::vector<double> center_of_mass(const BodySystem& system, const PhaseState& state);

/// Angular momentum about the center of mass: one component for dim 2
/// (the z component), three for dim 3. Other dimensions throw
/// UnsupportedDimensionError.
std::vector<double> angular_momentum(const BodySystem& system, const PhaseState& state);

// Value-level helpers shared by the dynamics and the identity check.

double inertia_from_pairs(const PairTable& pairs);
double potential_from_pairs(const PairTable& pairs, double alpha);

}  // namespace homolab
