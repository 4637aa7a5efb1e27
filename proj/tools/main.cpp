#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "srspos/commands.hpp"
#include "srspos/errors.hpp"

namespace {

srspos::cli::RunConfig load_config(const std::string& config_path,
                                   const std::optional<std::uint64_t>& seed_override,
                                   const std::string& out_override) {
    srspos::cli::RunConfig config = srspos::cli::load_run_config(config_path);
    if (seed_override) {
        config.scenario.seed = *seed_override;
        config.train.seed = *seed_override;
        config.validate();
    }
    if (!out_override.empty()) {
        config.out_dir = out_override;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SRS channel-fingerprint positioning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_override;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--seed", seed_override, "override the scenario and training seed");
        cmd->add_option("--out", out_override, "override the output directory");
    };

    CLI::App* generate = app.add_subcommand("generate", "synthesize SRS logs and GNSS traces");
    add_common(generate);
    CLI::App* prepare = app.add_subcommand("prepare", "build train/validation/test datasets");
    add_common(prepare);
    CLI::App* train = app.add_subcommand("train", "train the positioning network");
    add_common(train);
    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate the stored checkpoint");
    add_common(evaluate);

    CLI::App* predict = app.add_subcommand("predict", "run inference over an SRS log");
    srspos::cli::PredictArgs predict_args;
    predict->add_option("--checkpoint", predict_args.checkpoint_path, "model checkpoint")
        ->required();
    predict->add_option("--log", predict_args.log_path, "SRS log file")->required();
    predict->add_option("--gnss", predict_args.gnss_path,
                        "optional GNSS CSV; adds truth columns and per-sample error");
    predict->add_option("--out", predict_args.out_path, "output CSV")->required();

    CLI::App* reference =
        app.add_subcommand("config-reference", "print the generated configuration reference");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reference->parsed()) {
            std::cout << srspos::cli::config_reference();
            return 0;
        }
        if (predict->parsed()) {
            srspos::cli::cmd_predict(predict_args);
            return 0;
        }
        const srspos::cli::RunConfig config =
            load_config(config_path, seed_override, out_override);
        if (generate->parsed()) {
            srspos::cli::cmd_generate(config);
        } else if (prepare->parsed()) {
            srspos::cli::cmd_prepare(config);
        } else if (train->parsed()) {
            srspos::cli::cmd_train(config);
        } else if (evaluate->parsed()) {
            srspos::cli::cmd_evaluate(config);
        }
        return 0;
    } catch (const srspos::error& e) {
        std::cerr << "error: [" << srspos::error_category_name(e.category()) << "] " << e.what()
                  << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: [internal] " << e.what() << "\n";
        return static_cast<int>(srspos::error_category::internal);
    }
}
