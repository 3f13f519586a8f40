#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "adyn/bifurcation.hpp"
#include "adyn/types.hpp"

namespace adyn {

inline constexpr const char* tool_version = "0.1.0";

/// Shortest representation that round-trips a double (up to 17 significant
/// digits), '.' decimal point, no locale.
std::string format_double(double x);

/// Header t,m_1..m_n,v_1..v_n,w_1..w_n; one row per recorded step.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec);

/// Header alpha,w_sample,period_label; one row per (alpha, sampled w
/// component); diverged samples contribute no rows. Footer comment line
/// `# predicted_bifurcation=<value>`.
void write_orbit_csv(std::ostream& os, const OrbitDiagram& diagram);

std::string period_label(const AttractorSample& s);

/// Run manifest: every emitted data file is listed; replaying the stored
/// argv reproduces the files byte for byte.
std::string make_manifest_json(const std::string& command,
                               const std::vector<std::string>& argv,
                               const std::map<std::string, std::string>& parameters,
                               const std::vector<std::string>& output_files);

}  // namespace adyn
