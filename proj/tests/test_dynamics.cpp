#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace homolab;
using namespace homolab::testing;

namespace {

PhaseState unit_pair(double vx = 0.0) {
  return PhaseState(0.0, 2, {-0.5, 0.0, 0.5, 0.0}, {-vx, 0.0, vx, 0.0});
}

PhaseState rotate(const PhaseState& s, double angle, double dx, double dy) {
  PhaseState r = s;
  const double c = std::cos(angle);
  const double sn = std::sin(angle);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto q = s.position(k);
    const auto v = s.velocity(k);
    r.position(k)[0] = c * q[0] - sn * q[1] + dx;
    r.position(k)[1] = sn * q[0] + c * q[1] + dy;
    r.velocity(k)[0] = c * v[0] - sn * v[1];
    r.velocity(k)[1] = sn * v[0] + c * v[1];
  }
  return r;
}

}  // namespace

TEST_CASE("body system validation") {
  CHECK_THROWS_AS(BodySystem({1.0}, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(BodySystem({1.0, 0.0}, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(BodySystem({1.0, 1.0}, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(BodySystem({1.0, 1.0}, 0.5, 0), std::invalid_argument);
  BodySystem s({1.0, 2.0, 3.0}, 0.5, 2);
  CHECK(s.pair_count() == 3);
  CHECK(s.ordered_mass_product_sum() == doctest::Approx(2.0 * (2.0 + 3.0 + 6.0)));
  CHECK(equal_masses(5, 1.0).pair_count() == 10);
}

TEST_CASE("pair table is lexicographic with doubled weights") {
  BodySystem s({1.0, 2.0, 3.0}, 0.5, 2);
  const PairTable t = pair_table(s, std::vector<double>{0, 0, 1, 0, 0, 2});
  REQUIRE(t.size() == 3);
  CHECK(t.pair_index[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(t.pair_index[1] == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(t.pair_index[2] == std::pair<std::size_t, std::size_t>{1, 2});
  CHECK(t.deltas == std::vector<double>{1.0, 4.0, 5.0});
  CHECK(t.weights == std::vector<double>{4.0, 6.0, 12.0});
}

TEST_CASE("unit pair values") {
  const BodySystem s = equal_masses(2, 0.5);
  const PhaseState st = unit_pair();
  CHECK(moment_of_inertia(s, st) == 2.0);
  CHECK(potential_U(s, st) == 2.0);
  CHECK(energy(s, st) == -1.0);
  CHECK(configurational_measure(s, st) == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-15));
  const auto a = accelerations(s, st);
  CHECK(a[0] == 1.0);
  CHECK(a[2] == -1.0);
}

TEST_CASE("doubling velocities adds three times the kinetic energy") {
  auto [s, st] = random_case(4, 0.7, 3, 0);
  PhaseState fast = st;
  for (double& v : fast.velocities) v *= 2.0;
  double extra = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (double v : st.velocity(k)) extra += 1.5 * s.mass(k) * v * v;
  }
  CHECK(energy(s, fast) - energy(s, st) == doctest::Approx(extra).epsilon(1e-13));
}

TEST_CASE("momentum and angular momentum") {
  const BodySystem s = equal_masses(2, 0.5);
  CHECK(max_abs(linear_momentum(s, unit_pair(0.3))) == 0.0);

  PhaseState spin(0.0, 2, {-0.5, 0.0, 0.5, 0.0}, {0.0, -1.0, 0.0, 1.0});
  CHECK(angular_momentum(s, spin)[0] == doctest::Approx(1.0));

  auto [sys, st] = random_case(3, 0.5, 11, 2);
  const double l0 = angular_momentum(sys, st)[0];
  PhaseState moved = st;
  for (std::size_t k = 0; k < moved.size(); ++k) {
    moved.position(k)[0] += 3.0;
    moved.position(k)[1] -= 7.0;
  }
  CHECK(angular_momentum(sys, moved)[0] == doctest::Approx(l0).epsilon(1e-13));

  const BodySystem line({1.0, 1.0}, 0.5, 1);
  CHECK_THROWS_AS(angular_momentum(line, PhaseState(0.0, 1, {0.0, 1.0}, {0.0, 0.0})), UnsupportedDimensionError);
  const BodySystem space({1.0, 1.0}, 0.5, 3);
  CHECK(angular_momentum(space, PhaseState(0.0, 3, {0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 1, 0})).size() == 3);
}

TEST_CASE("collisions are reported") {
  const BodySystem s = equal_masses(3, 0.5);
  const PhaseState st = PhaseState::at_rest(2, {0.0, 0.0, 1.0, 0.0, 1.0, 1e-10});
  CHECK_THROWS_AS(potential_U(s, st), CollisionError);
  CHECK_THROWS_AS(accelerations(s, st), CollisionError);
  try {
    pairwise_deltas(s, st);
  } catch (const CollisionError& e) {
    CHECK(e.body_a() == 1);
    CHECK(e.body_b() == 2);
  }
  CHECK(moment_of_inertia(s, st) > 0.0);
}

TEST_CASE("third law") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    auto [s, st] = random_case(2 + i % 5, 0.3 + 0.1 * static_cast<double>(i % 8), 5, i, 2 + i % 2);
    const auto a = accelerations(s, st);
    std::vector<double> total(st.dim, 0.0);
    double biggest = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      double norm = 0.0;
      for (std::size_t c = 0; c < st.dim; ++c) {
        total[c] += s.mass(k) * a[k * st.dim + c];
        norm += a[k * st.dim + c] * a[k * st.dim + c];
      }
      biggest = std::max(biggest, s.mass(k) * std::sqrt(norm));
    }
    CHECK(max_abs(total) <= 1e-12 * biggest);
  }
}

TEST_CASE("scale invariance and homogeneity") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const double alpha = std::array{0.3, 0.5, 1.0, 2.0}[i % 4];
    auto [s, st] = random_case(2 + i % 4, alpha, 17, i);
    const double c0 = configurational_measure(s, st);
    const double u0 = potential_U(s, st);
    for (double lam : {0.5, 2.0, 10.0}) {
      PhaseState scaled = st;
      for (double& x : scaled.positions) x *= lam;
      CHECK(rel_diff(configurational_measure(s, scaled), c0) <= 1e-13);
      CHECK(rel_diff(potential_U(s, scaled), std::pow(lam, -2.0 * alpha) * u0) <= 1e-12);
    }
  }
}

TEST_CASE("euclidean equivariance") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    auto [s, st] = random_case(3 + i % 3, 0.5 + 0.25 * static_cast<double>(i % 3), 23, i);
    const double angle = 0.37 * static_cast<double>(i + 1);
    const PhaseState moved = rotate(st, angle, 1.5, -0.25);
    CHECK(rel_diff(moment_of_inertia(s, moved), moment_of_inertia(s, st)) <= 1e-12);
    CHECK(rel_diff(potential_U(s, moved), potential_U(s, st)) <= 1e-12);
    CHECK(rel_diff(energy(s, moved), energy(s, st)) <= 1e-12);

    const auto a = accelerations(s, st);
    const auto b = accelerations(s, moved);
    const double scale = max_abs(a);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double rx = std::cos(angle) * a[2 * k] - std::sin(angle) * a[2 * k + 1];
      const double ry = std::sin(angle) * a[2 * k] + std::cos(angle) * a[2 * k + 1];
      CHECK(std::abs(b[2 * k] - rx) <= 1e-12 * scale);
      CHECK(std::abs(b[2 * k + 1] - ry) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("accelerations match the finite-difference gradient of the energy potential") {
  for (double alpha : {0.5, 1.0, 1.7}) {
    for (std::uint64_t i = 0; i < 20; ++i) {
      auto [s, st] = random_case(2 + i % 4, alpha, 31, i, 2 + i % 2);
      const auto a = accelerations(s, st);
      const auto fd = fd_accelerations(s, st);
      for (std::size_t k = 0; k < s.size(); ++k) {
        double norm = 0.0;
        for (std::size_t c = 0; c < st.dim; ++c) norm += a[k * st.dim + c] * a[k * st.dim + c];
        norm = std::sqrt(norm);
        for (std::size_t c = 0; c < st.dim; ++c) {
          CHECK(std::abs(fd[k * st.dim + c] - a[k * st.dim + c]) <= 1e-6 * norm);
        }
      }
    }
  }
}

TEST_CASE("inertia from the pair table is bit-identical") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto [s, st] = random_case(2 + i % 5, 0.5, 41, i);
    const PairTable t = pair_table(s, st.positions);
    double sum = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) sum += t.weights[j] * t.deltas[j];
    CHECK(sum == moment_of_inertia(s, st));
  }
}

TEST_CASE("long double accelerations agree with double") {
  auto [s, st] = random_case(5, 0.8, 7, 1);
  std::vector<double> a(st.positions.size());
  accelerations_into(s, st.positions, a);
  std::vector<long double> q(st.positions.begin(), st.positions.end());
  std::vector<long double> b(q.size());
  accelerations_into(s, q, b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - static_cast<double>(b[i])) <= 1e-13 * max_abs(a));
}
