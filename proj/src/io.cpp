#include "adyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include <json.hpp>

namespace adyn {

std::string format_double(double x) {
    // shortest decimal that parses back to the same double, max 17 digits
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec) {
    const std::size_t n = rec.states.empty() ? 0 : rec.states.front().x.dim();
    os << "t";
    for (const char* blk : {"m", "v", "w"})
        for (std::size_t i = 1; i <= n; ++i) os << ',' << blk << '_' << i;
    os << '\n';
    for (const auto& s : rec.states) {
        os << s.t;
        for (const auto* block : {&s.x.m, &s.x.v, &s.x.w})
            for (double c : *block) os << ',' << format_double(c);
        os << '\n';
    }
}

std::string period_label(const AttractorSample& s) {
    if (s.diverged) return "diverged";
    if (!s.period) return "aperiodic";
    return std::to_string(*s.period);
}

void write_orbit_csv(std::ostream& os, const OrbitDiagram& diagram) {
    os << "alpha,w_sample,period_label\n";
    for (const auto& s : diagram.samples) {
        if (s.diverged) continue;  // plotted as gaps
        const std::string label = period_label(s);
        for (const auto& w : s.w_samples)
            for (double c : w)
                os << format_double(s.param_value) << ',' << format_double(c) << ','
                   << label << '\n';
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", diagram.predicted_bifurcation);
    os << "# predicted_bifurcation=" << buf << '\n';
}

std::string make_manifest_json(const std::string& command,
                               const std::vector<std::string>& argv,
                               const std::map<std::string, std::string>& parameters,
                               const std::vector<std::string>& output_files) {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["argv"] = argv;
    j["parameters"] = parameters;
    j["tool_version"] = tool_version;
    j["output_files"] = output_files;
    return j.dump(2) + "\n";
}

}  // namespace adyn
