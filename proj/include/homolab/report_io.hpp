#pragma once

#include <ostream>
#include <string>

#include "homolab/harness.hpp"
#include "homolab/integrator.hpp"

namespace homolab {

/// CSV with header. Columns: t, then per body q<k>_<c> for each component
/// followed by v<k>_<c>, then I, U, measure, E, P (|linear momentum|) and L
/// (signed z component in 2D, magnitude in 3D, nan otherwise). Numbers use
/// the shortest round-trip representation.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Single-line JSON object for one report.
std::string report_json(const ConjectureReport& report);

/// Single-line JSON object for a probe's quadrant counts.
std::string summary_json(const ScatterSummary& summary, std::size_t samples, std::uint64_t seed, double t_end);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace homolab
