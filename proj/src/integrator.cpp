#include "homolab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homolab/dynamics.hpp"

namespace homolab {

void IntegratorSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator tolerances must be positive");
  if (!(sample_dt > 0.0) || !std::isfinite(sample_dt)) throw std::invalid_argument("sample_dt must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

std::vector<double> sample_times(double t0, double t_end, double dt) {
  if (!(t_end > t0)) throw std::invalid_argument("t_end must be after the initial time");
  if (!(dt > 0.0)) throw std::invalid_argument("sample interval must be positive");
  const double span = t_end - t0;
  const auto count = static_cast<std::size_t>(std::floor(span / dt));
  std::vector<double> times;
  times.reserve(count + 2);
  for (std::size_t i = 0; i <= count; ++i) times.push_back(t0 + static_cast<double>(i) * dt);
  const double slack = 1e-9 * dt;
  if (t_end - times.back() > slack) {
    times.push_back(t_end);
  } else {
    times.back() = t_end;
  }
  if (times.size() >= 2 && times[times.size() - 2] >= times.back()) times.erase(times.end() - 2);
  return times;
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::completed:
      return "completed";
    case Termination::collision:
      return "collision";
    case Termination::step_failure:
      return "step-failure";
  }
  return "unknown";
}

SampleDiagnostics diagnose(const BodySystem& system, const PhaseState& state) {
  SampleDiagnostics d;
  const PairTable pairs = pair_table(system, state.positions);
  d.inertia = inertia_from_pairs(pairs);
  d.potential = potential_from_pairs(pairs, system.alpha());
  d.measure = std::pow(d.inertia, system.alpha()) * d.potential;
  d.energy = kinetic_energy(system, state) - d.potential / (4.0 * system.alpha());
  d.linear_momentum = linear_momentum(system, state);
  if (system.dim() == 2 || system.dim() == 3) d.angular_momentum = angular_momentum(system, state);
  return d;
}

namespace {

PhaseState unpack(double t, std::size_t dim, std::span<const double> y) {
  const std::size_t half = y.size() / 2;
  return PhaseState(t, dim, std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(half)),
                    std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(half), y.end()));
}

bool in_collision(const BodySystem& system, std::span<const double> positions, double floor) {
  const PairTable pairs = pair_table(system, positions);
  for (double d : pairs.deltas) {
    if (!(std::sqrt(d) >= floor)) return true;
  }
  return false;
}

std::vector<double> rounded(std::span<const long double> y) { return std::vector<double>(y.begin(), y.end()); }

}  // namespace

Trajectory integrate(const BodySystem& system, const PhaseState& initial, double t_end, const IntegratorSpec& spec) {
  using Extended = long double;
  spec.validate();
  check_compatible(system, initial);
  if (!(t_end > initial.t)) throw std::invalid_argument("t_end must be after the initial time");

  Trajectory traj{.system = system};
  traj.reference_scale = system_scale(system, initial);
  traj.t_end = t_end;
  pairwise_deltas(system, initial, traj.reference_scale);
  const double floor = collision_distance(traj.reference_scale);

  const std::size_t half = initial.positions.size();
  std::vector<Extended> y0(initial.positions.begin(), initial.positions.end());
  y0.insert(y0.end(), initial.velocities.begin(), initial.velocities.end());

  BasicDop853<Extended>::Rhs rhs = [&system, half](Extended, std::span<const Extended> y, std::span<Extended> dydt) {
    std::copy(y.begin() + static_cast<std::ptrdiff_t>(half), y.end(), dydt.begin());
    accelerations_into(system, y.first(half), dydt.subspan(half));
  };

  const std::vector<double> times = sample_times(initial.t, t_end, spec.sample_dt);
  traj.samples.reserve(times.size());
  traj.diagnostics.reserve(times.size());
  traj.samples.push_back(initial);
  traj.diagnostics.push_back(diagnose(system, initial));

  BasicDop853<Extended> stepper(rhs, initial.t, std::move(y0), spec.rel_tol, spec.abs_tol, spec.max_step);
  std::size_t next = 1;
  while (next < times.size()) {
    if (stepper.accepted_steps() >= spec.max_steps ||
        stepper.step(t_end) == BasicDop853<Extended>::StepStatus::step_too_small) {
      traj.termination = Termination::step_failure;
      break;
    }
    if (in_collision(system, rounded(std::span(stepper.state()).first(half)), floor)) {
      traj.termination = Termination::collision;
      break;
    }
    while (next < times.size() && times[next] <= stepper.time()) {
      const std::vector<double> y = rounded(stepper.dense(times[next]));
      if (in_collision(system, std::span(y).first(half), floor)) {
        traj.termination = Termination::collision;
        break;
      }
      traj.samples.push_back(unpack(times[next], system.dim(), y));
      traj.diagnostics.push_back(diagnose(system, traj.samples.back()));
      ++next;
    }
    if (traj.termination != Termination::completed) break;
  }
  traj.steps = stepper.accepted_steps();
  traj.rejected = stepper.rejected_steps();
  return traj;
}

std::vector<std::vector<double>> solve_sampled(const Dop853::Rhs& rhs, double t0, std::vector<double> y0,
                                               std::span<const double> times, const IntegratorSpec& spec) {
  spec.validate();
  std::vector<std::vector<double>> out;
  if (times.empty()) return out;
  if (times.front() != t0) throw std::invalid_argument("sample times must start at t0");
  out.reserve(times.size());
  out.push_back(y0);
  Dop853 stepper(rhs, t0, std::move(y0), spec.rel_tol, spec.abs_tol, spec.max_step);
  std::size_t next = 1;
  const double t_end = times.back();
  while (next < times.size()) {
    if (stepper.accepted_steps() >= spec.max_steps ||
        stepper.step(t_end) == Dop853::StepStatus::step_too_small) {
      throw std::runtime_error("step size underflow in reduced-model integration");
    }
    while (next < times.size() && times[next] <= stepper.time()) out.push_back(stepper.dense(times[next++]));
  }
  return out;
}

}  // namespace homolab
