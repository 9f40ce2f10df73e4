#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmab::cli {

inline constexpr const char* artifact_version = "1.0.0";

// Configuration error naming the offending field; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    std::string command; // simulate | regret | profile | oracle-check | chernoff-check
    double p01 = 0.5;
    double p11 = 0.5;
    int channels = 2;
    std::string schedule = "log"; // const:c | log | sqrt | linear
    long horizon = 10000;
    std::vector<long> checkpoints;   // empty: chosen automatically for `regret`
    long reps = 100;                 // replications, or trials for chernoff-check
    std::uint64_t seed = 0;          // default comes from RMAB_LAB_SEED
    std::string belief = "stationary"; // stationary | w1,w2,...
    std::string out = ".";
    int jobs = 1;
    long burnin = -1;                // profile; -1 means horizon / 10
    int oracle_length = 12;          // oracle-check
    double mu = 0.5;                 // chernoff-check
    double cdrift = 0.1;
    double brange = 1.0;
    long nlen = 100;
    double aoffset = 0.0;
    std::string generator = "both"; // const | drift | both
};

struct ResultBundle {
    std::filesystem::path manifest_path;
    std::vector<std::filesystem::path> csv_paths;
    std::string summary;
    int exit_code = 0; // 0 ok, 3 failed acceptance check
};

// Loads a flat key=value config or manifest file into config.
void load_config_file(const std::filesystem::path& path, ExperimentConfig& config);

// Full command-line parse: `--config FILE` first, flags override.
// Throws ConfigError on bad input; returns false if --help was printed.
bool parse_command_line(int argc, const char* const* argv, ExperimentConfig& config);

// Validates, dispatches, and writes manifest + CSVs + summary.
ResultBundle run_experiment(const ExperimentConfig& config);

} // namespace rmab::cli
