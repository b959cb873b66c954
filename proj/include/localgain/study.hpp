#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "localgain/analysis.hpp"
#include "localgain/certify.hpp"
#include "localgain/devices.hpp"
#include "localgain/domain.hpp"
#include "localgain/netmodel.hpp"

namespace localgain {

const char* version();

enum class NetworkMode { kStatic, kDynamic };

struct AxisConfig {
    std::string name;
    double      min = 0.1;
    double      max = 20.0;
    std::size_t count = 40;
    bool        log_scale = false;
};

struct SweepConfig {
    std::vector<AxisConfig>                        gfm;      // default axes for GFM devices
    std::vector<AxisConfig>                        gfl;      // default axes for GFL devices
    std::map<std::string, std::vector<AxisConfig>> devices;  // per-device overrides
};

struct SimulationConfig {
    std::string device;
    double      magnitude = 0.1;
    double      start = 1.0;
    double      horizon = 60.0;
    double      dt = 0.01;
};

struct ExecutionConfig {
    std::size_t workers = 0;  // 0 = available parallelism
    std::string output = "out";
};

struct StudyConfig {
    GridTopology                    topology;
    std::vector<DeviceSpec>         devices;
    ProhibitedDomain                domain;
    double                          spacing = 0.01;
    CertifyOptions                  certify;
    NetworkMode                     network = NetworkMode::kStatic;
    std::optional<SweepConfig>      sweep;
    std::optional<SimulationConfig> simulation;
    ExecutionConfig                 execution;
};

/// Parses and validates a JSON study file. Defaults are injected for every omitted optional field.
/// Throws ConfigError with the offending line/column or field path.
StudyConfig load_config(const std::filesystem::path& path);
StudyConfig parse_config(const std::string& text);

// Full effective configuration, defaults included.
nlohmann::json to_json(const StudyConfig& cfg);

// 64-bit FNV-1a of the effective configuration, as 16 hex digits.
std::string config_digest(const StudyConfig& cfg);

std::map<std::size_t, ParameterGrid> sweep_grids(const StudyConfig& cfg);

struct RunReport {
    std::string                              command;
    std::string                              digest;
    nlohmann::json                           effective_config;
    std::vector<MarginReport>                margins;
    std::map<std::size_t, std::string>       device_errors;
    std::map<std::size_t, FeasibilityMask>   masks;
    std::optional<PoleReport>                poles;
    std::optional<StepResponse>              response;
    std::vector<SettlingMetrics>             settling;  // per device, on electrical power
    BoundarySamples                          boundary;
    std::vector<std::string>                 notes;
    std::vector<std::pair<std::string, double>> timings;  // seconds per phase
    std::string                              verdict;
    int                                      exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificateFail = 2;
inline constexpr int kExitConfigError = 3;
inline constexpr int kExitInconsistent = 4;

RunReport cmd_certify(const StudyConfig& cfg);
RunReport cmd_sweep(const StudyConfig& cfg);
RunReport cmd_poles(const StudyConfig& cfg);
RunReport cmd_simulate(const StudyConfig& cfg);

/// Plain-text report; the trailing [timing] section is the only part that varies between identical runs.
void write_report(std::ostream& os, const StudyConfig& cfg, const RunReport& report);

/// report.txt plus mask_<device>.tsv, poles.tsv, response.tsv and boundary.tsv as produced by the command.
void write_outputs(const std::filesystem::path& dir, const StudyConfig& cfg, const RunReport& report);

}  // namespace localgain
