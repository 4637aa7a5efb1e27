#include "srspos/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "srspos/errors.hpp"
#include "srspos/eval.hpp"
#include "srspos/session.hpp"

namespace srspos::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitSeedBase[3] = {0x10000, 0x20000, 0x30000};

bool valid_session_name(const std::string& name) {
    if (name.empty() || name.size() > 64) {
        return false;
    }
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.contains(key)) {
            throw config_error("unknown key '" + path + key + "'");
        }
    }
}

std::vector<SessionSpec> parse_sessions(const json& j, const std::string& path) {
    if (!j.is_array()) {
        throw config_error("'" + path + "' must be an array of sessions");
    }
    std::vector<SessionSpec> specs;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& sj = j[i];
        const std::string spath = path + "[" + std::to_string(i) + "].";
        reject_unknown_keys(sj, {"name", "kind", "duration_s", "seed"}, spath);
        SessionSpec spec;
        if (!sj.contains("name")) {
            throw config_error("'" + spath + "name' is required");
        }
        spec.name = sj["name"];
        if (sj.contains("kind")) {
            spec.kind = synth::trajectory_kind_from_string(sj["kind"]);
        }
        if (sj.contains("duration_s")) {
            spec.duration_s = sj["duration_s"];
        }
        if (sj.contains("seed")) {
            spec.seed = sj["seed"].get<std::uint64_t>();
        }
        if (spec.duration_s <= 0.0) {
            throw config_error("'" + spath + "duration_s' must be positive");
        }
        specs.push_back(spec);
    }
    return specs;
}

void check_split_nonempty(const RunConfig& config) {
    if (config.train_sessions.empty() || config.validation_sessions.empty() ||
        config.test_sessions.empty()) {
        throw config_error("train, validation and test splits each need at least one session");
    }
}

std::vector<std::string> names_of(const std::vector<SessionSpec>& specs) {
    std::vector<std::string> names;
    names.reserve(specs.size());
    for (const SessionSpec& s : specs) {
        names.push_back(s.name);
    }
    return names;
}

}  // namespace

void RunConfig::validate() const {
    scenario.validate();
    train.validate();
    arch.validate();
    if (target_noise_sigma_m < 0.0) {
        throw config_error("pipeline.target_noise_sigma_m must be nonnegative");
    }
    if (out_dir.empty()) {
        throw config_error("out_dir must not be empty");
    }

    std::set<std::string> seen;
    const std::vector<const std::vector<SessionSpec>*> splits = {
        &train_sessions, &validation_sessions, &test_sessions};
    const char* split_names[] = {"train", "validation", "test"};
    for (std::size_t s = 0; s < splits.size(); ++s) {
        for (const SessionSpec& spec : *splits[s]) {
            if (!valid_session_name(spec.name)) {
                throw config_error("invalid session name '" + spec.name +
                                   "' (letters, digits, '_', '-', '.')");
            }
            if (!seen.insert(spec.name).second) {
                throw provenance_error("session '" + spec.name +
                                       "' appears in more than one split (" +
                                       split_names[s] + " reuses it)");
            }
        }
    }

    // identical seeds would replay the same acquisition in two splits
    std::set<std::uint64_t> seeds;
    for (std::size_t s = 0; s < splits.size(); ++s) {
        const auto split = static_cast<pipeline::Split>(s);
        for (std::size_t i = 0; i < splits[s]->size(); ++i) {
            const std::uint64_t seed = session_seed(split, i);
            if (!seeds.insert(seed).second) {
                throw provenance_error("session '" + (*splits[s])[i].name +
                                       "' shares its seed with another session");
            }
        }
    }
}

const std::vector<SessionSpec>& RunConfig::sessions(pipeline::Split split) const {
    switch (split) {
        case pipeline::Split::train: return train_sessions;
        case pipeline::Split::validation: return validation_sessions;
        case pipeline::Split::test: return test_sessions;
    }
    return train_sessions;
}

std::uint64_t RunConfig::session_seed(pipeline::Split split, std::size_t index) const {
    const SessionSpec& spec = sessions(split)[index];
    if (spec.seed) {
        return *spec.seed;
    }
    return derive_seed(scenario.seed,
                       kSplitSeedBase[static_cast<std::size_t>(split)] + index);
}

std::int64_t RunConfig::session_start_utc_ms(pipeline::Split split, std::size_t index) const {
    // sessions are laid out back to back with a gap, in train/val/test order
    std::int64_t start = base_utc_ms;
    constexpr std::int64_t kGapMs = 60000;
    for (int s = 0; s <= static_cast<int>(split); ++s) {
        const auto& specs = sessions(static_cast<pipeline::Split>(s));
        const std::size_t limit =
            s == static_cast<int>(split) ? index : specs.size();
        for (std::size_t i = 0; i < limit; ++i) {
            start += static_cast<std::int64_t>(std::ceil(specs[i].duration_s * 1000.0)) + kGapMs;
        }
    }
    return start;
}

std::string RunConfig::session_log_path(const std::string& name) const {
    return out_dir + "/sessions/" + name + ".srs.log";
}

std::string RunConfig::session_gnss_path(const std::string& name) const {
    return out_dir + "/sessions/" + name + ".gnss.csv";
}

std::string RunConfig::dataset_path(pipeline::Split split) const {
    return out_dir + "/datasets/" + pipeline::to_string(split) + ".csv";
}

std::string RunConfig::normalizer_path() const { return out_dir + "/datasets/normalizer.json"; }

std::string RunConfig::checkpoint_path() const { return out_dir + "/model.ckpt"; }

std::string RunConfig::history_path() const { return out_dir + "/history.csv"; }

std::string RunConfig::report_path(pipeline::Split split) const {
    return out_dir + "/report_" + std::string(pipeline::to_string(split)) + ".json";
}

std::string RunConfig::per_sample_path(pipeline::Split split) const {
    return out_dir + "/per_sample_" + std::string(pipeline::to_string(split)) + ".csv";
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw config_error("config file '" + path + "': " + e.what());
    }

    RunConfig config;
    try {
        reject_unknown_keys(j,
                            {"scenario", "out_dir", "base_utc_ms", "sessions", "pipeline",
                             "train", "architecture"},
                            "");
        if (!j.contains("scenario")) {
            throw config_error("'scenario' (path to a scenario file) is required");
        }
        config.scenario_path = j["scenario"];
        if (j.contains("out_dir")) {
            config.out_dir = j["out_dir"];
        }
        if (j.contains("base_utc_ms")) {
            config.base_utc_ms = j["base_utc_ms"];
        }
        if (j.contains("sessions")) {
            const json& sj = j["sessions"];
            reject_unknown_keys(sj, {"train", "validation", "test"}, "sessions.");
            if (sj.contains("train")) {
                config.train_sessions = parse_sessions(sj["train"], "sessions.train");
            }
            if (sj.contains("validation")) {
                config.validation_sessions =
                    parse_sessions(sj["validation"], "sessions.validation");
            }
            if (sj.contains("test")) {
                config.test_sessions = parse_sessions(sj["test"], "sessions.test");
            }
        }
        if (j.contains("pipeline")) {
            const json& pj = j["pipeline"];
            reject_unknown_keys(pj, {"target_noise_sigma_m", "root_features"}, "pipeline.");
            if (pj.contains("target_noise_sigma_m")) {
                config.target_noise_sigma_m = pj["target_noise_sigma_m"];
            }
            if (pj.contains("root_features")) {
                config.root_features = pj["root_features"];
            }
        }
        if (j.contains("train")) {
            const json& tj = j["train"];
            reject_unknown_keys(tj,
                                {"learning_rate", "beta1", "beta2", "epsilon", "batch_size",
                                 "epochs", "seed", "l1_loss"},
                                "train.");
            if (tj.contains("learning_rate")) config.train.learning_rate = tj["learning_rate"];
            if (tj.contains("beta1")) config.train.beta1 = tj["beta1"];
            if (tj.contains("beta2")) config.train.beta2 = tj["beta2"];
            if (tj.contains("epsilon")) config.train.epsilon = tj["epsilon"];
            if (tj.contains("batch_size")) config.train.batch_size = tj["batch_size"];
            if (tj.contains("epochs")) config.train.epochs = tj["epochs"];
            if (tj.contains("seed")) config.train.seed = tj["seed"].get<std::uint64_t>();
            if (tj.contains("l1_loss")) config.train.l1_loss = tj["l1_loss"];
        }
        if (j.contains("architecture")) {
            const json& aj = j["architecture"];
            reject_unknown_keys(aj,
                                {"input_block", "center_layers", "center_width",
                                 "positioning_block", "dropout_hidden", "dropout_p"},
                                "architecture.");
            if (aj.contains("input_block")) {
                config.arch.input_block = aj["input_block"].get<std::vector<int>>();
            }
            if (aj.contains("center_layers")) config.arch.center_layers = aj["center_layers"];
            if (aj.contains("center_width")) config.arch.center_width = aj["center_width"];
            if (aj.contains("positioning_block")) {
                config.arch.positioning_block = aj["positioning_block"].get<std::vector<int>>();
            }
            if (aj.contains("dropout_hidden")) config.arch.dropout_hidden = aj["dropout_hidden"];
            if (aj.contains("dropout_p")) {
                config.arch.dropout_p = aj["dropout_p"].get<std::vector<double>>();
            }
        }
    } catch (const json::exception& e) {
        throw config_error("config file '" + path + "': " + e.what());
    }

    // scenario paths are resolved relative to the config file
    fs::path scenario_file(config.scenario_path);
    if (scenario_file.is_relative()) {
        scenario_file = fs::path(path).parent_path() / scenario_file;
    }
    if (!fs::exists(scenario_file)) {
        throw config_error("scenario file '" + scenario_file.string() + "' does not exist");
    }
    config.scenario = synth::load_scenario(scenario_file.string());

    // the target noise default follows the scenario's GNSS accuracy
    if (!j.contains("pipeline") || !j["pipeline"].contains("target_noise_sigma_m")) {
        config.target_noise_sigma_m = config.scenario.gnss_accuracy_mean_m;
    }
    config.train.target_noise_sigma_m = config.target_noise_sigma_m;

    config.validate();
    return config;
}

std::string config_reference() {
    const RunConfig defaults;
    const synth::Scenario scenario;
    json j;
    j["scenario"] = "scenario.json";
    j["out_dir"] = defaults.out_dir;
    j["base_utc_ms"] = defaults.base_utc_ms;
    j["sessions"] = {
        {"train", json::array({{{"name", "train0"},
                                {"kind", "dense_walk"},
                                {"duration_s", 1200.0}}})},
        {"validation",
         json::array({{{"name", "val0"}, {"kind", "dense_walk"}, {"duration_s", 300.0}}})},
        {"test",
         json::array({{{"name", "test0"}, {"kind", "dense_walk"}, {"duration_s", 300.0}}})}};
    j["pipeline"] = {{"target_noise_sigma_m", defaults.target_noise_sigma_m},
                     {"root_features", defaults.root_features}};
    j["train"] = {{"learning_rate", defaults.train.learning_rate},
                  {"beta1", defaults.train.beta1},
                  {"beta2", defaults.train.beta2},
                  {"epsilon", defaults.train.epsilon},
                  {"batch_size", defaults.train.batch_size},
                  {"epochs", defaults.train.epochs},
                  {"seed", defaults.train.seed},
                  {"l1_loss", defaults.train.l1_loss}};
    j["architecture"] = {{"input_block", defaults.arch.input_block},
                         {"center_layers", defaults.arch.center_layers},
                         {"center_width", defaults.arch.center_width},
                         {"positioning_block", defaults.arch.positioning_block},
                         {"dropout_hidden", defaults.arch.dropout_hidden}};

    std::string out;
    out += "Run configuration reference (all values show their defaults)\n";
    out += "=============================================================\n\n";
    out += j.dump(2);
    out += "\n\nNotes:\n";
    out += "  scenario            path to a scenario JSON, relative to the config file\n";
    out += "  sessions.*.kind     dense_walk | path_back_and_forth\n";
    out += "  sessions.*.seed     optional; derived from the scenario seed when omitted\n";
    out += "  pipeline.target_noise_sigma_m  defaults to the scenario GNSS accuracy\n";
    out += "  pipeline.root_features         false narrows features to 192 amplitudes\n";
    out += "  train.l1_loss       per-coordinate absolute loss instead of Euclidean\n";
    out += "  architecture        defaults to 384-128-32-32-32-16-2 with dropout 0.1\n";
    out += "\nScenario file defaults:\n\n";
    json sc;
    sc["bs_position"] = {scenario.bs_position.x, scenario.bs_position.y, scenario.bs_position.z};
    sc["center_frequency_hz"] = scenario.center_frequency_hz;
    sc["bandwidth_hz"] = scenario.bandwidth_hz;
    sc["channel_frequencies_hz"] = scenario.channel_frequencies_hz;
    sc["ue_height_m"] = scenario.ue_height_m;
    sc["reference_amplitude"] = scenario.reference_amplitude;
    sc["reference_distance_m"] = scenario.reference_distance_m;
    sc["reflectors"] = json::array();
    sc["blockers"] = json::array();
    sc["shadowing"] = {{"sigma_db", scenario.shadowing.sigma_db},
                       {"correlation_m", scenario.shadowing.correlation_m}};
    sc["region_half_extent_m"] = scenario.region_half_extent_m;
    sc["walk_area"] = {{"center", {scenario.walk_area.center.x, scenario.walk_area.center.y}},
                       {"side_m", scenario.walk_area.side_m}};
    sc["path"] = {{"a", {scenario.path.a.x, scenario.path.a.y}},
                  {"b", {scenario.path.b.x, scenario.path.b.y}}};
    sc["gnss_accuracy_mean_m"] = scenario.gnss_accuracy_mean_m;
    sc["gnss_accuracy_spread_m"] = scenario.gnss_accuracy_spread_m;
    sc["seed"] = scenario.seed;
    out += sc.dump(2);
    out += "\n";
    return out;
}

void cmd_generate(const RunConfig& config) {
    fs::create_directories(config.out_dir + "/sessions");
    const synth::ChannelModel model(config.scenario);
    for (int s = 0; s < 3; ++s) {
        const auto split = static_cast<pipeline::Split>(s);
        const auto& specs = config.sessions(split);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const SessionSpec& spec = specs[i];
            const synth::Trajectory traj =
                synth::sample_trajectory(config.scenario, spec.kind, spec.duration_s,
                                         config.session_seed(split, i),
                                         config.session_start_utc_ms(split, i));
            const synth::SessionOutput out =
                synth::simulate_session(model, traj, config.session_seed(split, i));
            srslog::write_log_file(out.log, config.session_log_path(spec.name));
            pipeline::write_gnss_csv(out.gnss, config.session_gnss_path(spec.name));
            std::cout << "generated session " << spec.name << ": " << out.log.records.size()
                      << " records, " << out.gnss.size() << " fixes\n";
        }
    }
}

namespace {

pipeline::RowBlock load_session_rows(const RunConfig& config, const SessionSpec& spec) {
    const srslog::SrsLog log = srslog::read_log_file(config.session_log_path(spec.name));
    const std::vector<synth::GnssFix> gnss =
        pipeline::read_gnss_csv(config.session_gnss_path(spec.name));
    return pipeline::build_rows(log, gnss);
}

void append_block(pipeline::RowBlock& into, const pipeline::RowBlock& block) {
    into.utc_ms.insert(into.utc_ms.end(), block.utc_ms.begin(), block.utc_ms.end());
    into.targets.insert(into.targets.end(), block.targets.begin(), block.targets.end());
    into.amplitudes.insert(into.amplitudes.end(), block.amplitudes.begin(),
                           block.amplitudes.end());
}

}  // namespace

void cmd_prepare(const RunConfig& config) {
    check_split_nonempty(config);
    fs::create_directories(config.out_dir + "/datasets");

    // train rows first: the normalizer sees nothing else
    pipeline::RowBlock train_rows;
    for (const SessionSpec& spec : config.train_sessions) {
        append_block(train_rows, load_session_rows(config, spec));
    }
    const pipeline::Normalizer normalizer = pipeline::Normalizer::fit(train_rows.amplitudes);
    const std::vector<std::string> train_names = names_of(config.train_sessions);

    for (int s = 0; s < 3; ++s) {
        const auto split = static_cast<pipeline::Split>(s);
        pipeline::RowBlock rows;
        if (split == pipeline::Split::train) {
            rows = std::move(train_rows);
        } else {
            for (const SessionSpec& spec : config.sessions(split)) {
                append_block(rows, load_session_rows(config, spec));
            }
        }
        pipeline::Dataset ds =
            pipeline::finalize_dataset(rows, normalizer, split, config.root_features);
        ds.sessions = names_of(config.sessions(split));
        ds.normalizer_sessions = train_names;
        pipeline::write_dataset(ds, config.dataset_path(split));
        std::cout << "prepared " << pipeline::to_string(split) << ": " << ds.n_rows()
                  << " rows, feature width " << ds.feature_width << "\n";
    }

    nlohmann::json nj;
    nj["max_amplitude"] = normalizer.max_amplitude();
    nj["fitted_on"] = train_names;
    std::ofstream out(config.normalizer_path());
    if (!out) {
        throw io_error("cannot create '" + config.normalizer_path() + "'");
    }
    out << nj.dump(2) << "\n";
}

void cmd_train(const RunConfig& config) {
    const pipeline::Dataset train_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::train));
    const pipeline::Dataset val_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::validation));
    if (train_ds.split != pipeline::Split::train || val_ds.split != pipeline::Split::validation) {
        throw provenance_error("dataset split tags do not match their roles");
    }
    if (train_ds.normalizer_max != val_ds.normalizer_max) {
        throw provenance_error("train and validation datasets use different normalizers");
    }

    dnn::Architecture arch = config.arch;
    if (arch.input_width() != train_ds.feature_width) {
        throw config_error("architecture input width " + std::to_string(arch.input_width()) +
                           " does not match the dataset feature width " +
                           std::to_string(train_ds.feature_width));
    }

    dnn::Checkpoint ckpt;
    ckpt.normalizer_max = train_ds.normalizer_max;
    ckpt.root_features = train_ds.feature_width == pipeline::kFeatureWidth;
    ckpt.sessions_seen = train_ds.sessions;
    ckpt.sessions_seen.insert(ckpt.sessions_seen.end(), val_ds.sessions.begin(),
                              val_ds.sessions.end());

    const dnn::NetworkState initial = dnn::init_network(arch, config.train.seed);

    // written up front so a divergence abort always leaves a loadable state
    ckpt.net = initial;
    dnn::save_checkpoint(ckpt, config.checkpoint_path());

    std::ofstream history(config.history_path());
    if (!history) {
        throw io_error("cannot create '" + config.history_path() + "'");
    }
    history << "epoch,train_loss,val_medl\n";

    // the best checkpoint so far is persisted every epoch so that a divergence
    // abort still leaves the last good state on disk
    const auto on_epoch = [&](const dnn::EpochStats& stats, const dnn::NetworkState& best) {
        char buf[96];
        const int n = std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", stats.epoch,
                                    stats.train_loss, stats.val_medl);
        history.write(buf, n);
        history.flush();
        ckpt.net = best;
        dnn::save_checkpoint(ckpt, config.checkpoint_path());
    };

    try {
        const dnn::TrainResult result = dnn::train(initial, train_ds, val_ds, config.train,
                                                   on_epoch);
        ckpt.net = result.best;
        dnn::save_checkpoint(ckpt, config.checkpoint_path());
        if (!result.history.empty()) {
            const double best_val =
                std::min_element(result.history.begin(), result.history.end(),
                                 [](const auto& a, const auto& b) {
                                     return a.val_medl < b.val_medl;
                                 })
                    ->val_medl;
            std::cout << "trained " << result.history.size() << " epochs, best val MEDL "
                      << best_val << " m\n";
        } else {
            std::cout << "epochs=0: wrote the initial checkpoint\n";
        }
    } catch (const internal_error&) {
        std::cerr << "training aborted; the last good checkpoint is retained at "
                  << config.checkpoint_path() << "\n";
        throw;
    }
}

void cmd_evaluate(const RunConfig& config) {
    const dnn::Checkpoint ckpt = dnn::load_checkpoint(config.checkpoint_path());
    const pipeline::Dataset train_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::train));
    for (const pipeline::Split split :
         {pipeline::Split::validation, pipeline::Split::test}) {
        const pipeline::Dataset ds = pipeline::read_dataset(config.dataset_path(split));
        const eval::EvalReport report = eval::evaluate(ckpt, ds, train_ds);
        eval::write_report_json(report, config.report_path(split));
        eval::write_per_sample_csv(report, ds, config.per_sample_path(split));
        std::cout << pipeline::to_string(split) << ": mean " << report.mean_euclidean_error_m
                  << " m over " << report.n_samples << " samples (centroid "
                  << report.centroid_baseline_m << " m, knn " << report.knn_baseline_m
                  << " m)\n";
    }
}

void cmd_predict(const PredictArgs& args) {
    const dnn::Checkpoint ckpt = dnn::load_checkpoint(args.checkpoint_path);
    const srslog::SrsLog log = srslog::read_log_file(args.log_path);

    const bool with_truth = !args.gnss_path.empty();
    pipeline::RowBlock rows;
    if (with_truth) {
        rows = pipeline::build_rows(log, pipeline::read_gnss_csv(args.gnss_path));
    } else {
        rows = pipeline::build_rows_unlabeled(log);
    }

    const pipeline::Normalizer normalizer(ckpt.normalizer_max);
    const auto width = static_cast<std::size_t>(ckpt.net.arch.input_width());
    std::vector<double> features;
    features.reserve(rows.n_rows() * width);
    std::array<double, pipeline::kAveragedAmplitudeCount> scaled;
    for (std::size_t r = 0; r < rows.n_rows(); ++r) {
        std::copy_n(rows.amplitudes.begin() +
                        static_cast<std::ptrdiff_t>(r * pipeline::kAveragedAmplitudeCount),
                    pipeline::kAveragedAmplitudeCount, scaled.begin());
        normalizer.apply(scaled);
        if (ckpt.root_features) {
            const auto feats = pipeline::root_features(scaled);
            features.insert(features.end(), feats.begin(), feats.end());
        } else {
            features.insert(features.end(), scaled.begin(), scaled.end());
        }
    }
    if (rows.n_rows() > 0 && features.size() / rows.n_rows() != width) {
        throw validation_error("feature width does not match the checkpoint input width");
    }

    std::vector<double> preds;
    if (rows.n_rows() > 0) {
        preds = dnn::forward_eval(ckpt.net, features.data(), rows.n_rows());
    }

    std::ofstream out(args.out_path);
    if (!out) {
        throw io_error("cannot create '" + args.out_path + "'");
    }
    out << (with_truth ? "utc_ms,pred_x,pred_y,true_x,true_y,error_m\n"
                       : "utc_ms,pred_x,pred_y\n");
    char buf[192];
    for (std::size_t r = 0; r < rows.n_rows(); ++r) {
        int n;
        if (with_truth) {
            const double dx = preds[2 * r] - rows.targets[2 * r];
            const double dy = preds[2 * r + 1] - rows.targets[2 * r + 1];
            n = std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                              static_cast<long long>(rows.utc_ms[r]), preds[2 * r],
                              preds[2 * r + 1], rows.targets[2 * r], rows.targets[2 * r + 1],
                              std::sqrt(dx * dx + dy * dy));
        } else {
            n = std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                              static_cast<long long>(rows.utc_ms[r]), preds[2 * r],
                              preds[2 * r + 1]);
        }
        out.write(buf, n);
    }
    out.flush();
    if (!out) {
        throw io_error("failed writing '" + args.out_path + "'");
    }
    std::cout << "predicted " << rows.n_rows() << " positions\n";
}

}  // namespace srspos::cli
