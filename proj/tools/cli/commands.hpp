#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "wmtrack/spectra.hpp"

namespace wmtrack::cli {

inline constexpr const char* kOutDirEnv = "WMTRACK_OUT_DIR";

// flag, then environment, then config, then "out"
std::string resolve_out_dir(const RunConfig& cfg, const std::optional<std::string>& flag);

struct SimResult {
    double t_s = 0.0;
    double t0 = 0.0;
    std::vector<double> samples;
    std::vector<std::uint64_t> counts;
    std::map<std::string, double> meta;
};

SimResult simulate(const RunConfig& cfg, const Protocol& protocol, int jobs = 1);
std::string trace_csv(const RunConfig& cfg, const SimResult& r);

struct SummaryRow {
    double axis = 0.0;
    FitResult fit;
    bool ok = false;
    std::string error;
};

SummaryRow fit_row(double axis, const SimResult& r);

// each returns the files it wrote
std::vector<std::string> cmd_simulate(const RunConfig& cfg, const std::string& out_dir, int jobs = 1);
std::vector<std::string> cmd_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs = 1);
std::vector<std::string> cmd_analyze(const RunConfig& cfg, const std::string& trace_path, const std::string& out_dir);
std::vector<std::string> cmd_filter(const RunConfig& cfg, const std::string& out_dir);

}  // namespace wmtrack::cli
