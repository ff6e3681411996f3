#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "qrbm/cd_trainer.hpp"
#include "qrbm/cross_validation.hpp"
#include "qrbm/simulators.hpp"

namespace qrbm {

enum class Mode { simulate, train, cv, evaluate, classify, compare };

/// Input files; relative paths in a config document resolve against the
/// directory holding the document.
struct ExperimentInputs {
    std::optional<std::filesystem::path> responses;    // R
    std::optional<std::filesystem::path> q_hat;        // estimated Q
    std::optional<std::filesystem::path> q_true;       // reference Q for evaluate
    std::optional<std::filesystem::path> q_reference;  // expert Q for compare
    std::optional<std::filesystem::path> weights;      // W
    std::optional<std::filesystem::path> visible_bias; // b, one value per line
    std::optional<std::filesystem::path> hidden_bias;  // c, one value per line
    std::optional<std::filesystem::path> attributes;   // true A for classify
    std::optional<std::filesystem::path> trace;        // trace.csv for evaluate
};

struct ExperimentConfig {
    Mode mode = Mode::simulate;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    SimulationConfig simulation;
    TrainerConfig trainer;
    CvConfig cv;
    ExperimentInputs inputs;
    bool compare_match_columns = false;
    double classify_threshold = 0.5;
    bool classify_orient = true;
};

/// Throws ConfigError on malformed documents, unknown keys or wrong types.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// The "simulation" section on its own.
SimulationConfig parse_simulation_config(std::string_view json_text);

/// Lambda grid 0.003..0.015 step 0.001 and gamma0 grid 0.5..5.5 step 0.5.
std::vector<double> default_lambda_grid();
std::vector<double> default_gamma0_grid();

/// Runs one command and writes its artifacts into `out_dir` (created if
/// needed). Returns the written paths in write order.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config,
                                                  const std::filesystem::path& out_dir);

} // namespace qrbm
