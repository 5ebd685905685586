#include "report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace unmix::cli {

json make_report(const std::string& command) {
    json r;
    r["schema_version"] = "1.0";
    r["command"] = command;
    r["inputs"] = json::object();
    r["metrics"] = json::object();
    r["artifacts"] = json::object();
    r["timing_s"] = json::object();
    r["warnings"] = json::array();
    r["status"] = "ok";
    return r;
}

json config_to_json(const SolverConfig& cfg) {
    return json{{"alpha_c", cfg.weights.alpha_c},
                {"alpha_p", cfg.weights.alpha_p},
                {"omega_w", cfg.weights.omega_w},
                {"omega_s", cfg.weights.omega_s},
                {"lambda1", cfg.weights.lambda1},
                {"lambda2", cfg.weights.lambda2},
                {"d_max", cfg.d_max},
                {"levels", cfg.levels},
                {"iters_per_level", cfg.iters_per_level},
                {"step_size", cfg.step_size},
                {"rms_decay", cfg.rms_decay},
                {"rms_epsilon", cfg.rms_epsilon},
                {"seed", cfg.seed}};
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checksum: cannot open " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
    return out;
}

void write_report(const json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << report.dump(2) << "\n";
}

void write_trace_csv(const std::vector<TraceEntry>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "level,iter,content_left,content_right,prior_left,prior_right,"
           "warp_left,warp_right,smooth_left,smooth_right,total\n";
    char line[512];
    for (const TraceEntry& e : trace) {
        std::snprintf(line, sizeof(line),
                      "%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      e.level, e.iter, e.breakdown.content_left, e.breakdown.content_right,
                      e.breakdown.prior_left, e.breakdown.prior_right, e.breakdown.warp_left,
                      e.breakdown.warp_right, e.breakdown.smooth_left, e.breakdown.smooth_right,
                      e.breakdown.total);
        out << line;
    }
}

}  // namespace unmix::cli
