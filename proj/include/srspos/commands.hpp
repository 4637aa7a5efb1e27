#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srspos/dnn.hpp"
#include "srspos/pipeline.hpp"
#include "srspos/scenario.hpp"
#include "srspos/trajectory.hpp"

namespace srspos::cli {

struct SessionSpec {
    std::string name;
    synth::TrajectoryKind kind = synth::TrajectoryKind::dense_walk;
    double duration_s = 60.0;
    std::optional<std::uint64_t> seed;  // derived from the scenario seed when unset
};

struct RunConfig {
    std::string scenario_path;
    synth::Scenario scenario;
    std::vector<SessionSpec> train_sessions;
    std::vector<SessionSpec> validation_sessions;
    std::vector<SessionSpec> test_sessions;
    double target_noise_sigma_m = 3.5;
    bool root_features = true;
    dnn::Architecture arch = dnn::Architecture::default_arch();
    dnn::TrainConfig train;
    std::string out_dir = "out";
    std::int64_t base_utc_ms = 1600000000000;

    // session lists pairwise disjoint by name, unique seeds, valid names
    void validate() const;

    std::uint64_t session_seed(pipeline::Split split, std::size_t index) const;
    std::int64_t session_start_utc_ms(pipeline::Split split, std::size_t index) const;
    const std::vector<SessionSpec>& sessions(pipeline::Split split) const;

    std::string session_log_path(const std::string& name) const;
    std::string session_gnss_path(const std::string& name) const;
    std::string dataset_path(pipeline::Split split) const;
    std::string normalizer_path() const;
    std::string checkpoint_path() const;
    std::string history_path() const;
    std::string report_path(pipeline::Split split) const;
    std::string per_sample_path(pipeline::Split split) const;
};

RunConfig load_run_config(const std::string& path);

// default configuration reference, generated from the built-in defaults
std::string config_reference();

void cmd_generate(const RunConfig& config);
void cmd_prepare(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);

struct PredictArgs {
    std::string checkpoint_path;
    std::string log_path;
    std::string gnss_path;  // optional; adds truth columns and per-sample error
    std::string out_path;
};

void cmd_predict(const PredictArgs& args);

}  // namespace srspos::cli
