#include "homolab/cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "homolab/central_config.hpp"
#include "homolab/config_io.hpp"
#include "homolab/dynamics.hpp"
#include "homolab/harness.hpp"
#include "homolab/homographic.hpp"
#include "homolab/report_io.hpp"
#include "json.hpp"

namespace homolab::cli {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::shared_ptr<spdlog::logger> logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto log = std::make_shared<spdlog::logger>("homolab", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    log->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::err;
    if (const char* env = std::getenv("HOMOLAB_LOG")) {
      const std::string value(env);
      if (value == "info") level = spdlog::level::info;
      if (value == "debug") level = spdlog::level::debug;
    }
    log->set_level(level);
    return log;
  }();
  return instance;
}

void emit_error(std::ostream& err, std::string_view kind, std::string_view message) {
  json doc;
  doc["error"] = kind;
  doc["message"] = message;
  err << doc.dump() << '\n';
}

/// Writes to a file when a path is given, otherwise to the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

const PhaseState& require_state(const SystemConfig& config, const std::string& path) {
  if (!config.state) throw UsageError("'" + path + "' has no positions");
  return *config.state;
}

struct OrbitOptions {
  std::string mode = "circular";
  std::optional<double> theta_dot_scale;
  std::optional<double> r_dot;
  double r0 = 1.0;
};

void add_orbit_options(CLI::App* cmd, OrbitOptions& opts) {
  cmd->add_option("--mode", opts.mode, "Orbit family")
      ->check(CLI::IsMember({"circular", "elliptic", "homothetic"}))
      ->capture_default_str();
  cmd->add_option("--theta-dot-scale", opts.theta_dot_scale,
                  "Initial angular rate in units of sqrt(lambda) (default 1 circular, 0.8 elliptic)");
  cmd->add_option("--r-dot", opts.r_dot, "Initial radial rate (default 0, homothetic -0.5)");
  cmd->add_option("--r0", opts.r0, "Initial scale factor")->check(CLI::PositiveNumber)->capture_default_str();
}

HomographicSpec build_spec(const CentralConfiguration& cc, const OrbitOptions& opts) {
  HomographicSpec spec{.cc = cc, .r0 = opts.r0};
  const double omega = std::sqrt(cc.lambda);
  if (opts.mode == "circular") {
    spec.theta_dot0 = opts.theta_dot_scale.value_or(1.0) * omega;
    spec.rdot0 = opts.r_dot.value_or(0.0);
  } else if (opts.mode == "elliptic") {
    spec.theta_dot0 = opts.theta_dot_scale.value_or(kEllipticThetaScale) * omega;
    spec.rdot0 = opts.r_dot.value_or(0.0);
  } else {
    if (opts.theta_dot_scale) throw UsageError("--theta-dot-scale does not apply to homothetic orbits");
    spec.theta_dot0 = 0.0;
    spec.rdot0 = opts.r_dot.value_or(kHomotheticRdot);
  }
  if (spec.is_static()) throw UsageError("orbit would start at rest; give a non-zero rate");
  return spec;
}

const CentralConfiguration& require_cc(const SystemConfig& config, const std::string& path) {
  if (!config.central_configuration) throw UsageError("'" + path + "' is not a central configuration (no lambda)");
  return *config.central_configuration;
}

int run_simulate(const std::string& path, double t_end, const std::string& out_path, std::ostream& out) {
  const SystemConfig config = load_system_config(path);
  const Trajectory traj = integrate(config.system, require_state(config, path), t_end, config.integrator);
  logger()->info("simulate: {} samples, {} steps, termination {}", traj.samples.size(), traj.steps,
                 to_string(traj.termination));
  Sink sink(out_path, out);
  write_trajectory_csv(sink.stream(), traj);
  return traj.termination == Termination::step_failure ? kNumericalFailure : kSuccess;
}

int run_central_config(const std::string& path, const std::string& seed_kind, double seed_scale,
                       const std::string& out_path, std::ostream& out) {
  const SystemConfig config = load_system_config(path);
  std::vector<double> seed;
  if (!seed_kind.empty()) {
    seed = known_seeds(parse_seed_kind(seed_kind), config.system.size(), seed_scale);
  } else {
    seed = require_state(config, path).positions;
  }
  const CentralConfiguration cc = solve_central_config(config.system, seed);
  logger()->info("central-config: residual {} after {} iterations, lambda {}", cc.residual_norm, cc.iterations,
                 cc.lambda);
  Sink sink(out_path, out);
  sink.stream() << central_config_to_json(cc);
  return kSuccess;
}

int run_make_orbit(const std::string& path, const OrbitOptions& opts, const std::string& out_path,
                   std::ostream& out) {
  const SystemConfig config = load_system_config(path);
  const CentralConfiguration& cc = require_cc(config, path);
  const PhaseState state = make_homographic(build_spec(cc, opts));
  Sink sink(out_path, out);
  sink.stream() << system_config_to_json(cc.system, state);
  return kSuccess;
}

int run_verify(const std::string& path, double t_end, const OrbitOptions& opts, const std::string& trajectory_path,
               std::ostream& out) {
  const SystemConfig config = load_system_config(path);
  ConjectureReport report;
  std::optional<Trajectory> traj;
  if (config.central_configuration) {
    ForwardRun run = verify_forward_run(*config.central_configuration, build_spec(*config.central_configuration, opts),
                                        t_end, config.integrator);
    report = std::move(run.report);
    report.label = "forward/" + opts.mode;
    traj = std::move(run.trajectory);
  } else {
    traj = integrate(config.system, require_state(config, path), t_end, config.integrator);
    report = assess(*traj, "trajectory");
  }
  if (!trajectory_path.empty()) {
    Sink sink(trajectory_path, out);
    write_trajectory_csv(sink.stream(), *traj);
  }
  out << report_json(report) << '\n';
  if (report.verdict == Verdict::violation) return kViolation;
  if (report.termination == Termination::step_failure || !report.forward_ok) return kNumericalFailure;
  return kSuccess;
}

int run_scan(const std::string& path, std::size_t samples, std::uint64_t seed, double t_end, std::size_t jobs,
             const std::string& out_path, std::ostream& out) {
  const SystemConfig config = load_system_config(path);
  const ProbeResult result = probe_converse(config.system, samples, seed, t_end, config.integrator, jobs);
  Sink sink(out_path, out);
  for (const ConjectureReport& report : result.reports) sink.stream() << report_json(report) << '\n';
  sink.stream() << summary_json(result.summary, samples, seed, t_end) << '\n';
  logger()->info("scan: {} samples, {} violations, {} collisions", samples, result.summary.violations(),
                 result.summary.collisions);
  return result.summary.violations() > 0 ? kViolation : kSuccess;
}

int run_identity_check(const std::string& path, std::optional<std::size_t> random, std::uint64_t seed,
                       std::ostream& out) {
  const SystemConfig config = load_system_config(path);
  json doc;
  doc["pair_count"] = config.system.pair_count();
  double worst = 0.0;
  if (random) {
    for (std::size_t i = 0; i < *random; ++i) {
      worst = std::max(worst, identity_check(config.system, sample_initial_state(config.system, seed, i)));
    }
    doc["states"] = *random;
    doc["seed"] = seed;
  } else {
    const IdentityForms forms = identity_forms(config.system, require_state(config, path));
    worst = forms.residual;
    doc["states"] = 1;
    doc["direct"] = forms.direct;
    doc["via_ratios"] = forms.via_ratios;
  }
  doc["max_residual"] = worst;
  doc["tolerance"] = kIdentityTolerance;
  out << doc.dump() << '\n';
  return worst <= kIdentityTolerance ? kSuccess : kNumericalFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homographic-orbit laboratory for power-law n-body problems", "homolab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  double t_end = 0.0;

  auto* simulate = app.add_subcommand("simulate", "Integrate a configuration and write a trajectory CSV");
  simulate->add_option("config", config_path, "System configuration")->required()->check(CLI::ExistingFile);
  simulate->add_option("--t-end", t_end, "Final time")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--out", out_path, "Output CSV (default: stdout)");

  std::string seed_kind;
  double seed_scale = 1.0;
  auto* central = app.add_subcommand("central-config", "Solve and certify a planar central configuration");
  central->add_option("config", config_path, "System configuration")->required()->check(CLI::ExistingFile);
  central->add_option("--seed-kind", seed_kind, "Textbook seed (default: the config's positions)")
      ->check(CLI::IsMember({"equilateral", "collinear", "ngon"}));
  central->add_option("--seed-scale", seed_scale, "Seed size")->check(CLI::PositiveNumber)->capture_default_str();
  central->add_option("--out", out_path, "Output JSON (default: stdout)");

  OrbitOptions orbit;
  auto* make_orbit = app.add_subcommand("make-orbit", "Emit initial conditions for a homographic orbit");
  make_orbit->add_option("cc", config_path, "Central configuration JSON")->required()->check(CLI::ExistingFile);
  add_orbit_options(make_orbit, orbit);
  make_orbit->add_option("--out", out_path, "Output config (default: stdout)");

  std::string trajectory_path;
  auto* verify = app.add_subcommand("verify", "Integrate and report measure constancy and homographic deviation");
  verify->add_option("input", config_path, "System configuration or central configuration")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--t-end", t_end, "Final time")->required()->check(CLI::PositiveNumber);
  add_orbit_options(verify, orbit);
  verify->add_option("--trajectory-out", trajectory_path, "Also write the integrated trajectory CSV");

  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  auto* scan = app.add_subcommand("scan", "Probe random initial conditions for constant-measure orbits");
  scan->add_option("config", config_path, "System configuration")->required()->check(CLI::ExistingFile);
  scan->add_option("--samples", samples, "Number of samples")->required()->check(CLI::PositiveNumber);
  scan->add_option("--seed", seed, "RNG seed")->required();
  scan->add_option("--t-end", t_end, "Final time")->required()->check(CLI::PositiveNumber);
  scan->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  scan->add_option("--out", out_path, "JSON-lines output (default: stdout)");

  std::optional<std::size_t> random_states;
  auto* identity = app.add_subcommand("identity-check", "Compare C = I^alpha U with its pair-ratio form");
  identity->add_option("config", config_path, "System configuration")->required()->check(CLI::ExistingFile);
  identity->add_option("--random", random_states, "Check N random states instead of the config's state")
      ->check(CLI::PositiveNumber);
  identity->add_option("--seed", seed, "RNG seed for --random")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kSuccess;
    }
    emit_error(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (*simulate) return run_simulate(config_path, t_end, out_path, out);
    if (*central) return run_central_config(config_path, seed_kind, seed_scale, out_path, out);
    if (*make_orbit) return run_make_orbit(config_path, orbit, out_path, out);
    if (*verify) return run_verify(config_path, t_end, orbit, trajectory_path, out);
    if (*scan) return run_scan(config_path, samples, seed, t_end, jobs, out_path, out);
    if (*identity) return run_identity_check(config_path, random_states, seed, out);
  } catch (const ConfigError& e) {
    emit_error(err, "config", e.what());
    return kUsage;
  } catch (const CollisionError& e) {
    emit_error(err, "collision", e.what());
    return kNumericalFailure;
  } catch (const NonConvergenceError& e) {
    emit_error(err, "non-convergence", e.what());
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "usage", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    emit_error(err, "numerical", e.what());
    return kNumericalFailure;
  }
  emit_error(err, "usage", "no subcommand");
  return kUsage;
}

}  // namespace homolab::cli
