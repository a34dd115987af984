#include "homolab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "homolab/dynamics.hpp"
#include "homolab/rng.hpp"

namespace homolab {

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::violation ? "VIOLATION" : "consistent";
}

Verdict classify(double measure_variation, double homographic_dev) {
  return (measure_variation < kConstThreshold && homographic_dev > kHomoThreshold) ? Verdict::violation
                                                                                  : Verdict::consistent;
}

double measure_variation(const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  std::vector<double> values;
  for (std::size_t s : usable_samples(traj)) values.push_back(traj.diagnostics[s].measure);
  if (values.empty()) return 0.0;

  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double median = values[mid];
  if (values.size() % 2 == 0) {
    const double below = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + below);
  }
  return span / median;
}

IdentityForms identity_forms(const BodySystem& system, const PhaseState& state) {
  const PairTable pairs = pairwise_deltas(system, state);
  const double alpha = system.alpha();
  IdentityForms out;
  out.direct = std::pow(inertia_from_pairs(pairs), alpha) * potential_from_pairs(pairs, alpha);

  const double base = pairs.deltas.front();
  double linear = pairs.weights.front();
  double inverse = pairs.weights.front();
  for (std::size_t j = 1; j < pairs.size(); ++j) {
    const double w = pairs.deltas[j] / base;
    linear += pairs.weights[j] * w;
    inverse += pairs.weights[j] * std::pow(w, -alpha);
  }
  out.via_ratios = std::pow(linear, alpha) * inverse;
  out.residual = std::abs(out.direct - out.via_ratios) / out.direct;
  return out;
}

double identity_check(const BodySystem& system, const PhaseState& state) {
  return identity_forms(system, state).residual;
}

double WTrace::max_relative_span() const {
  double span = 0.0;
  if (values.empty()) return span;
  for (std::size_t j = 0; j < values.front().size(); ++j) {
    double lo = values.front()[j];
    double hi = lo;
    for (const auto& row : values) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    span = std::max(span, (hi - lo) / std::abs(values.front()[j]));
  }
  return span;
}

WTrace w_traces(const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("empty trajectory");
  WTrace trace;
  trace.times.reserve(traj.samples.size());
  trace.values.reserve(traj.samples.size());
  for (const PhaseState& state : traj.samples) {
    const PairTable pairs = pair_table(traj.system, state.positions);
    std::vector<double> row(pairs.size() - 1);
    for (std::size_t j = 1; j < pairs.size(); ++j) {
      row[j - 1] = pairs.deltas[j] / pairs.deltas[0];
      if (!(row[j - 1] > 0.0) || !(pairs.deltas[j] > 0.0)) {
        throw std::logic_error("w-trace positivity violated at t = " + std::to_string(state.t));
      }
    }
    trace.times.push_back(state.t);
    trace.values.push_back(std::move(row));
  }
  return trace;
}

ConjectureReport assess(const Trajectory& traj, std::string label) {
  ConjectureReport report;
  report.label = std::move(label);
  report.measure_variation = measure_variation(traj);
  report.homographic_dev = homographic_deviation(traj);
  for (std::size_t s : usable_samples(traj)) {
    report.identity_residual = std::max(report.identity_residual, identity_check(traj.system, traj.samples[s]));
  }
  report.verdict = classify(report.measure_variation, report.homographic_dev);
  report.t_end = traj.t_end;
  report.termination = traj.termination;
  report.sample_count = traj.samples.size();
  report.pair_count = traj.system.pair_count();
  return report;
}

ForwardRun verify_forward_run(const CentralConfiguration& cc, HomographicSpec spec, double t_end,
                              const IntegratorSpec& integrator) {
  if (!(cc.residual_norm <= kCertifiedResidual)) throw std::invalid_argument("central configuration is not certified");
  spec.cc = cc;
  ForwardRun run{.trajectory = integrate(cc.system, make_homographic(spec), t_end, integrator)};
  run.report = assess(run.trajectory, "forward");
  run.report.forward_ok = run.report.measure_variation <= kForwardTolerance;
  return run;
}

std::vector<ConjectureReport> verify_forward(const CentralConfiguration& cc, const std::vector<HomographicSpec>& specs,
                                             double t_end, const IntegratorSpec& integrator) {
  std::vector<ConjectureReport> reports;
  reports.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    ConjectureReport report = verify_forward_run(cc, specs[i], t_end, integrator).report;
    report.sample_index = i;
    reports.push_back(std::move(report));
  }
  return reports;
}

PhaseState sample_initial_state(const BodySystem& system, std::uint64_t seed, std::uint64_t index) {
  const std::size_t n = system.size();
  const std::size_t dim = system.dim();
  CounterRng rng(seed, index);
  std::vector<double> q(n * dim);
  // The rejection loop needs a cap for systems that cannot fit in the box.
  for (int attempt = 0;; ++attempt) {
    if (attempt == 100000) throw std::runtime_error("could not place bodies at least 0.1 apart in [-1, 1]^dim");
    for (double& x : q) x = rng.uniform(-1.0, 1.0);
    if (min_separation(pair_table(system, q)) >= 0.1) break;
  }
  std::vector<double> v(n * dim);
  for (double& x : v) x = rng.uniform(-0.5, 0.5);

  PhaseState state(0.0, dim, std::move(q), std::move(v));
  const std::vector<double> com = center_of_mass(system, state);
  const std::vector<double> p = linear_momentum(system, state);
  const double total = system.total_mass();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < dim; ++c) {
      state.position(k)[c] -= com[c];
      state.velocity(k)[c] -= p[c] / total;
    }
  }
  return state;
}

ScatterSummary summarize(const std::vector<ConjectureReport>& reports) {
  ScatterSummary summary;
  for (const ConjectureReport& r : reports) {
    const bool constant = r.measure_variation < kConstThreshold;
    const bool homographic = !(r.homographic_dev > kHomoThreshold);
    if (constant && homographic) ++summary.constant_homographic;
    if (constant && !homographic) ++summary.constant_nonhomographic;
    if (!constant && homographic) ++summary.varying_homographic;
    if (!constant && !homographic) ++summary.varying_nonhomographic;
    if (r.termination == Termination::collision) ++summary.collisions;
    if (r.termination == Termination::step_failure) ++summary.step_failures;
  }
  return summary;
}

ProbeResult probe_converse(const BodySystem& system, std::size_t n_samples, std::uint64_t seed, double t_end,
                           const IntegratorSpec& integrator, std::size_t jobs) {
  if (n_samples < 1) throw std::invalid_argument("probe needs at least one sample");
  integrator.validate();
  ProbeResult result;
  result.reports.resize(n_samples);

  auto run_one = [&](std::size_t index) {
    const PhaseState initial = sample_initial_state(system, seed, index);
    const Trajectory traj = integrate(system, initial, t_end, integrator);
    ConjectureReport report = assess(traj, "probe");
    report.seed = seed;
    report.sample_index = index;
    result.reports[index] = std::move(report);
  };

  jobs = std::clamp<std::size_t>(jobs, 1, n_samples);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n_samples; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    {
      std::vector<std::jthread> workers;
      workers.reserve(jobs);
      for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (std::size_t i = next++; i < n_samples; i = next++) run_one(i);
          } catch (...) {
            errors[w] = std::current_exception();
            next = n_samples;
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  result.summary = summarize(result.reports);
  return result;
}

std::vector<CatalogEntry> forward_catalog(double alpha) {
  const BodySystem three({1.0, 1.0, 1.0}, alpha, 2);
  const BodySystem four({1.0, 1.0, 1.0, 1.0}, alpha, 2);
  const CentralConfiguration equilateral = solve_central_config(three, known_seeds(SeedKind::equilateral, 3));
  const CentralConfiguration collinear = solve_central_config(three, known_seeds(SeedKind::collinear, 3));
  const CentralConfiguration square = solve_central_config(four, known_seeds(SeedKind::ngon, 4));

  std::vector<CatalogEntry> catalog;
  catalog.push_back({"equilateral/circular",
                     {.cc = equilateral, .r0 = 1.0, .rdot0 = 0.0, .theta_dot0 = std::sqrt(equilateral.lambda)}});
  catalog.push_back({"equilateral/elliptic",
                     {.cc = equilateral,
                      .r0 = 1.0,
                      .rdot0 = 0.0,
                      .theta_dot0 = kEllipticThetaScale * std::sqrt(equilateral.lambda)}});
  catalog.push_back({"collinear/homothetic", {.cc = collinear, .r0 = 1.0, .rdot0 = kHomotheticRdot, .theta_dot0 = 0.0}});
  catalog.push_back({"ngon4/circular", {.cc = square, .r0 = 1.0, .rdot0 = 0.0, .theta_dot0 = std::sqrt(square.lambda)}});
  return catalog;
}

}  // namespace homolab
