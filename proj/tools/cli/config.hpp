#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wmtrack/engine.hpp"
#include "wmtrack/protocol.hpp"

namespace wmtrack::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// values are kept in the units they are written in, so a config survives a write/read cycle bit for bit
struct NucleusConfig {
    double a_par_hz = 0.0;
    double a_perp_hz = 0.0;
};

struct SystemConfig {
    double b0_t = 0.0;
    double gamma_n = gamma_c13;
    std::vector<NucleusConfig> nuclei;
};

struct EngineConfig {
    std::string kind = "dm";
    Coupling coupling = Coupling::cpmg;
    RecordMode record = RecordMode::ensemble;
    double dephasing_rate = 0.0;
    int runs = 1;
    bool reinit_kicks = false;
    bool photons = false;
    double readout_repetitions = 1.0;
    bool check_invariants = false;
};

struct NoiseConfig {
    std::optional<DriftModel> drift;
    ReadoutModel readout;
};

enum class SweepAxis { beta, t_s, t_beta, alpha, polarization };

struct SweepConfig {
    SweepAxis axis = SweepAxis::beta;
    std::vector<double> values;  // may be empty for alpha: the preset dwell grid is used
};

struct AnalysisConfig {
    int pad_factor = 4;
    double threshold = 4.0;
    bool normalize = false;
    std::optional<Band> noise_band;
    bool unfold = false;
    int max_peaks = 10;  // strongest first
};

struct FilterConfig {
    std::optional<double> t_beta;
    std::optional<double> tau;
    std::optional<double> t_s;
    std::optional<double> f_lo_hz;
    std::optional<double> f_hi_hz;
    int points = 2001;
};

struct RunConfig {
    SystemConfig system;
    ProtocolConfig protocol;
    EngineConfig engine;
    NoiseConfig noise;
    std::optional<SweepConfig> sweep;
    AnalysisConfig analysis;
    FilterConfig filter;
    std::uint64_t seed = 1;
    std::optional<std::string> output_dir;
};

std::string sweep_axis_name(SweepAxis a);

// strict: unknown keys and type mismatches are collected and thrown as one ConfigError
RunConfig parse_config(const json& j);
// accepts a JSON file or any CSV written by this tool (reads its embedded config line)
RunConfig load_config(const std::string& path);
json to_json(const RunConfig& cfg);

// the config as embedded in outputs; output_dir is left out so the location does not change the content
std::string canonical(const RunConfig& cfg);

SpinSystem to_system(const RunConfig& cfg);
EngineOptions to_engine_options(const RunConfig& cfg);
ProtocolConfig to_protocol_config(const RunConfig& cfg);

// physical checks beyond the schema; throws ConfigError
void validate(const RunConfig& cfg, bool need_sweep);

struct SweepPoint {
    double axis_value = 0.0;
    Protocol protocol;
    RunConfig config;
};

std::vector<SweepPoint> sweep_points(const RunConfig& cfg);

}  // namespace wmtrack::cli
