#include <cmath>
#include <numbers>

#include "doctest.h"
#include "homolab/integrator.hpp"
#include "support.hpp"

using namespace homolab;
using namespace homolab::testing;

namespace {

// Unit masses at +-(1/2, 0) rotating at omega = sqrt(2) (alpha = 1/2).
PhaseState circular_pair() {
  const double w = std::numbers::sqrt2;
  return PhaseState(0.0, 2, {-0.5, 0.0, 0.5, 0.0}, {0.0, -0.5 * w, 0.0, 0.5 * w});
}

double return_error(const BodySystem& s, const PhaseState& start, double t_end, const IntegratorSpec& spec) {
  const Trajectory out = integrate(s, start, t_end, spec);
  REQUIRE(out.termination == Termination::completed);
  PhaseState back = out.samples.back();
  back.t = 0.0;
  for (double& v : back.velocities) v = -v;
  const Trajectory home = integrate(s, back, t_end, spec);
  REQUIRE(home.termination == Termination::completed);
  double err = 0.0;
  for (std::size_t i = 0; i < start.positions.size(); ++i)
    err = std::max(err, std::abs(home.samples.back().positions[i] - start.positions[i]));
  return err / max_abs(start.positions);
}

}  // namespace

TEST_CASE("sample times") {
  CHECK(sample_times(0.0, 1.0, 0.25) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto t = sample_times(0.0, 1.0, 0.3);
  REQUIRE(t.size() == 5);
  CHECK(t.back() == 1.0);
  CHECK(t[3] == doctest::Approx(0.9));
  CHECK(sample_times(0.0, 10.0, 0.01).size() == 1001);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((IntegratorSpec{.rel_tol = 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((IntegratorSpec{.abs_tol = -1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((IntegratorSpec{.sample_dt = 0.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW(IntegratorSpec{}.validate());
}

TEST_CASE("stepper reproduces exp and its dense output") {
  Dop853 stepper([](double, std::span<const double> y, std::span<double> f) { f[0] = y[0]; }, 0.0, {1.0}, 1e-12,
                 1e-14);
  double worst_dense = 0.0;
  while (stepper.time() < 2.0) {
    REQUIRE(stepper.step(2.0) == Dop853::StepStatus::ok);
    const double mid = 0.5 * (stepper.previous_time() + stepper.time());
    worst_dense = std::max(worst_dense, std::abs(stepper.dense(mid)[0] - std::exp(mid)) / std::exp(mid));
  }
  CHECK(stepper.time() == 2.0);
  CHECK(std::abs(stepper.state()[0] - std::exp(2.0)) / std::exp(2.0) < 1e-11);
  CHECK(worst_dense < 1e-11);
}

TEST_CASE("stepper error shrinks with tolerance") {
  auto solve = [](double tol) {
    Dop853 stepper([](double, std::span<const double> y, std::span<double> f) {
      f[0] = y[1];
      f[1] = -y[0];
    }, 0.0, {1.0, 0.0}, tol, tol * 1e-2);
    while (stepper.time() < 20.0) stepper.step(20.0);
    return std::abs(stepper.state()[0] - std::cos(20.0));
  };
  const double loose = solve(1e-6);
  const double tight = solve(1e-10);
  CHECK(tight < loose);
  CHECK(tight < 1e-8);
}

TEST_CASE("two-body circular orbit conserves energy over ten revolutions") {
  const BodySystem s = equal_masses(2, 0.5);
  const double period = 2.0 * std::numbers::pi / std::numbers::sqrt2;
  const Trajectory traj = integrate(s, circular_pair(), 10.0 * period, IntegratorSpec{});
  REQUIRE(traj.termination == Termination::completed);
  REQUIRE(traj.diagnostics.size() == traj.samples.size());
  const double e0 = traj.diagnostics.front().energy;
  const double l0 = traj.diagnostics.front().angular_momentum[0];
  CHECK(l0 > 0.0);
  for (const auto& d : traj.diagnostics) {
    CHECK(std::abs(d.energy - e0) / std::abs(e0) <= 1e-9);
    CHECK(std::abs(d.angular_momentum[0] - l0) / l0 <= 1e-9);
    CHECK(max_abs(d.linear_momentum) <= 1e-12);
  }
  for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
}

TEST_CASE("symmetric drop from rest collides on the line") {
  const BodySystem s = equal_masses(2, 0.5);
  const Trajectory traj = integrate(s, PhaseState::at_rest(2, {-0.5, 0.0, 0.5, 0.0}), 5.0, IntegratorSpec{});
  CHECK(traj.termination == Termination::collision);
  CHECK(traj.samples.back().t < 5.0);
  for (const PhaseState& st : traj.samples) {
    CHECK(st.positions[1] == 0.0);
    CHECK(st.positions[3] == 0.0);
    CHECK(st.positions[0] == -st.positions[2]);
  }
}

TEST_CASE("time reversal returns to the start") {
  const BodySystem s = equal_masses(3, 0.5);
  const PhaseState start = PhaseState(0.0, 2, {-1.0, 0.0, 1.0, 0.0, 0.0, 0.8}, {0.0, -0.3, 0.0, 0.3, 0.2, 0.0});
  const double err = return_error(s, start, 5.0, IntegratorSpec{});
  CHECK(err <= 1e-6);

  // Halving the tolerance must not make the return worse beyond roundoff.
  double previous = return_error(s, start, 5.0, IntegratorSpec{.rel_tol = 1e-8, .abs_tol = 1e-10});
  for (double tol : {5e-9, 2.5e-9, 1.25e-9}) {
    const double now = return_error(s, start, 5.0, IntegratorSpec{.rel_tol = tol, .abs_tol = tol * 1e-2});
    CHECK(now <= previous * 1.01 + 1e-14);
    previous = now;
  }
}

TEST_CASE("integration is deterministic") {
  auto [s, st] = random_case(3, 0.5, 42, 3);
  const Trajectory a = integrate(s, st, 3.0, IntegratorSpec{});
  const Trajectory b = integrate(s, st, 3.0, IntegratorSpec{});
  CHECK(a.samples == b.samples);
  CHECK(a.steps == b.steps);
}

TEST_CASE("step budget exhaustion is a step failure") {
  const BodySystem s = equal_masses(2, 0.5);
  const Trajectory traj = integrate(s, circular_pair(), 10.0, IntegratorSpec{.max_steps = 1});
  CHECK(traj.termination == Termination::step_failure);
  CHECK(to_string(traj.termination) == "step-failure");
}

TEST_CASE("bad arguments are rejected") {
  const BodySystem s = equal_masses(2, 0.5);
  CHECK_THROWS_AS(integrate(s, circular_pair(), 0.0, IntegratorSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(s, PhaseState::at_rest(2, {0, 0, 0, 0}), 1.0, IntegratorSpec{}), CollisionError);
  CHECK_THROWS_AS(integrate(equal_masses(3, 0.5), circular_pair(), 1.0, IntegratorSpec{}), std::invalid_argument);
}
