#include "homolab/types.hpp"

#include <cmath>
#include <sstream>

namespace homolab {

namespace {

std::string collision_message(std::size_t a, std::size_t b, double distance) {
  std::ostringstream os;
  os << "collision between bodies " << a << " and " << b << " (separation " << distance << ")";
  return os.str();
}

}  // namespace

CollisionError::CollisionError(std::size_t body_a, std::size_t body_b, double distance)
    : std::runtime_error(collision_message(body_a, body_b, distance)),
      body_a_(body_a),
      body_b_(body_b),
      distance_(distance) {}

BodySystem::BodySystem(std::vector<double> masses, double alpha, std::size_t dim)
    : masses_(std::move(masses)), alpha_(alpha), dim_(dim) {
  if (masses_.size() < 2) throw std::invalid_argument("a body system needs at least two bodies");
  for (double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("masses must be finite and strictly positive");
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw std::invalid_argument("alpha must be finite and positive");
  if (dim_ < 1) throw std::invalid_argument("spatial dimension must be at least 1");
}

double BodySystem::total_mass() const noexcept {
  double total = 0.0;
  for (double m : masses_) total += m;
  return total;
}

double BodySystem::ordered_mass_product_sum() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    for (std::size_t k = i + 1; k < masses_.size(); ++k) sum += 2.0 * masses_[i] * masses_[k];
  }
  return sum;
}

PhaseState::PhaseState(double time, std::size_t dimension, std::vector<double> q, std::vector<double> v)
    : t(time), dim(dimension), positions(std::move(q)), velocities(std::move(v)) {
  if (dim == 0) throw std::invalid_argument("phase state dimension must be positive");
  if (positions.size() % dim != 0) throw std::invalid_argument("position array length is not a multiple of dim");
  if (velocities.size() != positions.size()) throw std::invalid_argument("velocity and position arrays differ in length");
}

PhaseState PhaseState::at_rest(std::size_t dimension, std::vector<double> q, double time) {
  std::vector<double> v(q.size(), 0.0);
  return PhaseState(time, dimension, std::move(q), std::move(v));
}

void check_compatible(const BodySystem& system, const PhaseState& state) {
  if (state.dim != system.dim()) throw std::invalid_argument("state dimension does not match the system");
  if (state.positions.size() != system.size() * system.dim())
    throw std::invalid_argument("state body count does not match the system");
  if (state.velocities.size() != state.positions.size())
    throw std::invalid_argument("velocity and position arrays differ in length");
}

}  // namespace homolab
