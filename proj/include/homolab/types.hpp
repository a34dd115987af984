#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homolab {

/// Raised when two bodies come closer than the collision floor.
class CollisionError : public std::runtime_error {
 public:
  CollisionError(std::size_t body_a, std::size_t body_b, double distance);

  std::size_t body_a() const noexcept { return body_a_; }
  std::size_t body_b() const noexcept { return body_b_; }
  double distance() const noexcept { return distance_; }

 private:
  std::size_t body_a_;
  std::size_t body_b_;
  double distance_;
};

class UnsupportedDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem definition: n point masses interacting through the power-law
/// force m_j (q_j - q_k) |q_j - q_k|^(-2 alpha - 2). G is absorbed into the masses.
class BodySystem {
 public:
  /// Throws std::invalid_argument unless masses.size() >= 2, every mass > 0,
  /// alpha > 0 and dim >= 1.
  BodySystem(std::vector<double> masses, double alpha, std::size_t dim);

  std::size_t size() const noexcept { return masses_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double alpha() const noexcept { return alpha_; }
  std::span<const double> masses() const noexcept { return masses_; }
  double mass(std::size_t k) const { return masses_[k]; }
  double total_mass() const noexcept;

  /// Number of unordered body pairs, n(n-1)/2.
  std::size_t pair_count() const noexcept { return masses_.size() * (masses_.size() - 1) / 2; }

  /// Sum over ordered pairs i != j of m_i m_j.
  double ordered_mass_product_sum() const noexcept;

  bool operator==(const BodySystem&) const = default;

 private:
  std::vector<double> masses_;
  double alpha_;
  std::size_t dim_;
};

/// Positions and velocities of every body at one instant, stored body-major
/// (body k occupies [k*dim, (k+1)*dim)).
struct PhaseState {
  double t = 0.0;
  std::size_t dim = 0;
  std::vector<double> positions;
  std::vector<double> velocities;

  PhaseState() = default;
  PhaseState(double time, std::size_t dimension, std::vector<double> q, std::vector<double> v);

  /// Zero velocities.
  static PhaseState at_rest(std::size_t dimension, std::vector<double> q, double time = 0.0);

  std::size_t size() const noexcept { return dim == 0 ? 0 : positions.size() / dim; }

  std::span<const double> position(std::size_t k) const { return {positions.data() + k * dim, dim}; }
  std::span<double> position(std::size_t k) { return {positions.data() + k * dim, dim}; }
  std::span<const double> velocity(std::size_t k) const { return {velocities.data() + k * dim, dim}; }
  std::span<double> velocity(std::size_t k) { return {velocities.data() + k * dim, dim}; }

  bool operator==(const PhaseState&) const = default;
};

/// Throws std::invalid_argument if the state does not fit the system.
void check_compatible(const BodySystem& system, const PhaseState& state);

/// Unordered pair table. Pair j maps to bodies (i, k), i < k, in
/// lexicographic order; weights M_j = 2 m_i m_k reproduce the ordered double
/// sums over i != k exactly.
struct PairTable {
  std::vector<double> deltas;
  std::vector<double> weights;
  std::vector<std::pair<std::size_t, std::size_t>> pair_index;

  std::size_t size() const noexcept { return deltas.size(); }
};

}  // namespace homolab
