#include "homolab/report_io.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"

namespace homolab {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.system.size();
  const std::size_t dim = traj.system.dim();
  out << "t";
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < dim; ++c) out << ",q" << k << '_' << c;
    for (std::size_t c = 0; c < dim; ++c) out << ",v" << k << '_' << c;
  }
  out << ",I,U,measure,E,P,L\n";

  for (std::size_t s = 0; s < traj.samples.size(); ++s) {
    const PhaseState& state = traj.samples[s];
    const SampleDiagnostics& d = traj.diagnostics[s];
    out << format_double(state.t);
    for (std::size_t k = 0; k < n; ++k) {
      for (double x : state.position(k)) out << ',' << format_double(x);
      for (double x : state.velocity(k)) out << ',' << format_double(x);
    }
    double p = 0.0;
    for (double x : d.linear_momentum) p += x * x;
    double l = std::nan("");
    if (d.angular_momentum.size() == 1) {
      l = d.angular_momentum[0];
    } else if (d.angular_momentum.size() == 3) {
      l = std::hypot(d.angular_momentum[0], d.angular_momentum[1], d.angular_momentum[2]);
    }
    out << ',' << format_double(d.inertia) << ',' << format_double(d.potential) << ',' << format_double(d.measure)
        << ',' << format_double(d.energy) << ',' << format_double(std::sqrt(p)) << ',' << format_double(l) << '\n';
  }
}

std::string report_json(const ConjectureReport& report) {
  json doc;
  if (!report.label.empty()) doc["label"] = report.label;
  doc["verdict"] = std::string(to_string(report.verdict));
  doc["measure_variation"] = report.measure_variation;
  doc["homographic_dev"] = report.homographic_dev;
  doc["identity_residual"] = report.identity_residual;
  doc["forward_ok"] = report.forward_ok;
  doc["seed"] = report.seed;
  doc["sample_index"] = report.sample_index;
  doc["t_end"] = report.t_end;
  doc["termination"] = std::string(to_string(report.termination));
  doc["samples"] = report.sample_count;
  doc["pair_count"] = report.pair_count;
  return doc.dump();
}

std::string summary_json(const ScatterSummary& summary, std::size_t samples, std::uint64_t seed, double t_end) {
  json doc;
  doc["summary"] = {
      {"samples", samples},
      {"seed", seed},
      {"t_end", t_end},
      {"constant_homographic", summary.constant_homographic},
      {"constant_nonhomographic", summary.constant_nonhomographic},
      {"varying_homographic", summary.varying_homographic},
      {"varying_nonhomographic", summary.varying_nonhomographic},
      {"violations", summary.violations()},
      {"collisions", summary.collisions},
      {"step_failures", summary.step_failures},
  };
  return doc.dump();
}

}  // namespace homolab
