// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "srspos/commands.hpp"
#include "srspos/errors.hpp"
#include "srspos/eval.hpp"
#include "srspos/rng.hpp"
#include "srspos/session.hpp"

namespace fs = std::filesystem;
using namespace srspos;

namespace {

int g_failures = 0;

void run_criterion(int id, const std::string& name, const std::function<void()>& body) {
    try {
        body();
        std::printf("[PASS] criterion %d: %s\n", id, name.c_str());
    } catch (const std::exception& e) {
        ++g_failures;
        std::printf("[FAIL] criterion %d: %s — %s\n", id, name.c_str(), e.what());
    }
    std::fflush(stdout);
}

void require(bool cond, const std::string& what) {
    if (!cond) {
        throw std::runtime_error(what);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- criterion 1

void criterion_format_round_trip() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xF0F0);
    for (int trial = 0; trial < 10000; ++trial) {
        srslog::SrsLog log;
        const std::size_t n = rng.below(16);
        std::int64_t utc = 1600000000000 + static_cast<std::int64_t>(rng.below(1000000));
        for (std::size_t i = 0; i < n; ++i) {
            srslog::SrsRecord rec;
            rec.utc_ms = utc;
            rec.sfn = static_cast<int>(rng.below(1024));
            rec.pair_index = static_cast<int>(rng.below(12));
            for (auto& g : rec.gains) {
                g.re = static_cast<std::int16_t>(rng.bits());
                g.im = static_cast<std::int16_t>(rng.bits());
            }
            log.records.push_back(rec);
            if (rng.bernoulli(0.6)) {
                utc += static_cast<std::int64_t>(rng.below(200));
            }
        }
        std::ostringstream out;
        srslog::write_log(log, out);
        std::istringstream in(out.str());
        const srslog::SrsLog back = srslog::parse_log(in);
        require(back == log, "round-trip mismatch at trial " + std::to_string(trial));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 10.0, "round-trip of 10^4 logs took " + std::to_string(secs) + " s (>= 10 s)");
}

// ---------------------------------------------------------------- criterion 2

void criterion_forward_fill_oracle() {
    Rng rng(0xFF11);
    srslog::SrsLog log;
    std::int64_t utc = 1600000000000;
    for (int occ = 0; occ < 10000; ++occ) {
        bool any = false;
        for (int p = 0; p < pipeline::kPairCount; ++p) {
            if (rng.bernoulli(0.5)) {
                any = true;
                srslog::SrsRecord rec;
                rec.utc_ms = utc;
                rec.sfn = occ % 1024;
                rec.pair_index = p;
                rec.gains[0].re = static_cast<std::int16_t>(rng.below(30000));
                rec.gains[63].im = static_cast<std::int16_t>(rng.below(30000));
                log.records.push_back(rec);
            }
        }
        if (!any) {
            srslog::SrsRecord rec;
            rec.utc_ms = utc;
            rec.pair_index = static_cast<int>(rng.below(12));
            log.records.push_back(rec);
        }
        utc += 35 + static_cast<std::int64_t>(rng.below(76));
    }

    const auto snaps = pipeline::assemble_snapshots(log);
    require(snaps.size() == 10000, "expected 10^4 snapshots");
    const auto filled = pipeline::forward_fill(snaps);

    // brute force: scan back for the last fresh occurrence of each pair
    std::size_t first_complete = snaps.size();
    std::array<bool, pipeline::kPairCount> seen{};
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        for (int p = 0; p < pipeline::kPairCount; ++p) {
            seen[static_cast<std::size_t>(p)] =
                seen[static_cast<std::size_t>(p)] || snaps[i].fresh[static_cast<std::size_t>(p)];
        }
        if (std::all_of(seen.begin(), seen.end(), [](bool s) { return s; })) {
            first_complete = i;
            break;
        }
    }
    require(filled.size() == snaps.size() - first_complete, "warm-up drop count mismatch");
    for (std::size_t out = 0; out < filled.size(); ++out) {
        const std::size_t i = first_complete + out;
        for (int p = 0; p < pipeline::kPairCount; ++p) {
            std::size_t src = i;
            while (!snaps[src].fresh[static_cast<std::size_t>(p)]) {
                --src;
            }
            for (int b = 0; b < pipeline::kBeamCount; ++b) {
                const auto idx = static_cast<std::size_t>(p * pipeline::kBeamCount + b);
                require(filled[out].h[idx] == snaps[src].h[idx],
                        "forward-fill mismatch at snapshot " + std::to_string(i));
            }
        }
    }
}

// ---------------------------------------------------------------- criterion 3

void criterion_gradient_check() {
    Rng rng(0x6AD5);
    for (int trial = 0; trial < 4; ++trial) {
        dnn::Architecture arch;
        const int input = 6 + static_cast<int>(rng.below(8));
        const int hidden = 3 + static_cast<int>(rng.below(4));
        arch.input_block = {input, hidden};
        arch.center_layers = 0;
        arch.positioning_block = {2};
        arch.dropout_hidden = 0.0;
        dnn::NetworkState net = dnn::init_network(arch, 100 + static_cast<std::uint64_t>(trial));

        const std::size_t n = 3;
        std::vector<double> x(n * static_cast<std::size_t>(input));
        std::vector<double> t(n * 2);
        for (double& v : x) {
            v = rng.uniform(-1.0, 1.0);
        }
        for (double& v : t) {
            v = rng.uniform(-2.0, 2.0);
        }

        Rng dropout_rng(1);
        const dnn::ForwardTrace trace = dnn::forward_train(net, x.data(), n, dropout_rng);
        const dnn::LossGrad lg = dnn::medl_loss(trace.predictions.data(), t.data(), n);
        const dnn::Gradients grads = dnn::backward(net, trace, n, lg.dpred.data());

        const double step = 1e-5;
        const auto loss_now = [&] {
            const auto pred = dnn::forward_eval(net, x.data(), n);
            return dnn::medl_loss(pred.data(), t.data(), n).loss;
        };
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const auto check = [&](std::vector<double>& theta, const std::vector<double>& g) {
                for (std::size_t i = 0; i < theta.size(); ++i) {
                    const double saved = theta[i];
                    theta[i] = saved + step;
                    const double up = loss_now();
                    theta[i] = saved - step;
                    const double down = loss_now();
                    theta[i] = saved;
                    const double fd = (up - down) / (2.0 * step);
                    const double rel =
                        std::abs(g[i] - fd) / std::max({std::abs(fd), std::abs(g[i]), 1e-8});
                    require(rel <= 1e-4, "gradient rel err " + std::to_string(rel) +
                                             " at layer " + std::to_string(l));
                }
            };
            check(net.layers[l].w, grads.layers[l].w);
            check(net.layers[l].b, grads.layers[l].b);
        }
    }

    // ADAM two-step scalar trace against the hand-computed update rule
    dnn::Architecture arch;
    arch.input_block = {1, 1};
    arch.center_layers = 0;
    arch.positioning_block = {2};
    arch.dropout_hidden = 0.0;
    dnn::NetworkState net = dnn::init_network(arch, 1);
    dnn::TrainConfig cfg;
    dnn::Gradients ones;
    ones.layers = net.layers;
    for (dnn::Layer& l : ones.layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    ones.layers[0].w[0] = 1.0;
    const double theta0 = net.layers[0].w[0];
    dnn::adam_step(net, ones, cfg);
    double m = 0.1;
    double v = 0.001;
    double theta = theta0 - 1e-3 * (m / 0.1) / (std::sqrt(v / 0.001) + 1e-8);
    require(std::abs(net.layers[0].w[0] - theta) <= 1e-12, "ADAM step 1 deviates");
    dnn::adam_step(net, ones, cfg);
    m = 0.9 * m + 0.1;
    v = 0.999 * v + 0.001;
    theta -= 1e-3 * (m / (1.0 - 0.81)) / (std::sqrt(v / (1.0 - 0.998001)) + 1e-8);
    require(std::abs(net.layers[0].w[0] - theta) <= 1e-12, "ADAM step 2 deviates");
}

// ------------------------------------------------------- shared run machinery

cli::RunConfig make_run_config(const std::string& out_dir, bool nlos, double train_s,
                               double eval_s, int epochs) {
    cli::RunConfig config;
    synth::Scenario& sc = config.scenario;
    sc.seed = 20240817;
    sc.walk_area = {{0.0, 70.0}, 50.0};
    sc.reflectors = {{{40.0, 30.0, 8.0}, 0.5},
                     {{-45.0, 60.0, 10.0}, 0.45},
                     {{10.0, 100.0, 6.0}, 0.4}};
    sc.shadowing.sigma_db = 4.0;
    sc.shadowing.correlation_m = 15.0;
    sc.gnss_accuracy_mean_m = 3.5;
    sc.gnss_accuracy_spread_m = 0.0;
    if (nlos) {
        // a wall between the BS and the walk area blocks every direct ray;
        // extra scatterers around the area carry the remaining energy
        sc.blockers = {{{-60.0, 35.0, 0.0}, {60.0, 40.0, 30.0}}};
        sc.reflectors.push_back({{-20.0, 25.0, 5.0}, 0.5});
        sc.reflectors.push_back({{55.0, 85.0, 12.0}, 0.4});
    }
    config.train_sessions = {{"train0", synth::TrajectoryKind::dense_walk, train_s, {}}};
    config.validation_sessions = {{"val0", synth::TrajectoryKind::dense_walk, eval_s, {}}};
    config.test_sessions = {{"test0", synth::TrajectoryKind::dense_walk, eval_s, {}}};
    config.target_noise_sigma_m = 3.5;
    config.train.target_noise_sigma_m = 3.5;
    config.train.epochs = epochs;
    config.train.batch_size = 64;
    config.train.learning_rate = 1e-3;
    config.train.seed = 99;
    config.out_dir = out_dir;
    config.validate();
    return config;
}

eval::EvalReport run_end_to_end(const cli::RunConfig& config) {
    fs::remove_all(config.out_dir);
    cli::cmd_generate(config);
    cli::cmd_prepare(config);
    cli::cmd_train(config);
    cli::cmd_evaluate(config);
    const dnn::Checkpoint ckpt = dnn::load_checkpoint(config.checkpoint_path());
    const pipeline::Dataset train_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::train));
    const pipeline::Dataset test_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::test));
    return eval::evaluate(ckpt, test_ds, train_ds);
}

// ---------------------------------------------------------------- criterion 4

void criterion_constants(const cli::RunConfig& learnability_config) {
    require(pipeline::full_capacity() == 35072, "full capacity is not 35072");
    require(pipeline::sparse_raw_count() == 768, "sparse raw count is not 768");
    for (const pipeline::Split split :
         {pipeline::Split::train, pipeline::Split::validation, pipeline::Split::test}) {
        const pipeline::Dataset ds =
            pipeline::read_dataset(learnability_config.dataset_path(split));
        require(ds.feature_width == 384, "feature width is not 384");
        require(ds.features.size() == ds.n_rows() * 384,
                "row storage does not hold 384 features per row");
    }
}

// ---------------------------------------------------------------- criterion 5

void criterion_normalizer(const cli::RunConfig& config) {
    const pipeline::Dataset train_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::train));
    const pipeline::Dataset val_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::validation));
    const pipeline::Dataset test_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::test));

    // training max maps to exactly 1.0 (sqrt block of the max row is 1.0)
    double train_max = 0.0;
    for (std::size_t r = 0; r < train_ds.n_rows(); ++r) {
        for (int f = 0; f < 192; ++f) {
            train_max = std::max(train_max,
                                 train_ds.features[r * 384 + static_cast<std::size_t>(f)]);
        }
    }
    require(train_max == 1.0, "training amplitude max does not map to exactly 1.0");

    // values above the training max pass through unclipped
    const pipeline::Normalizer normalizer(train_ds.normalizer_max);
    std::vector<double> probe = {1.2 * train_ds.normalizer_max, 0.0};
    normalizer.apply(probe);
    require(std::abs(probe[0] - 1.2) <= 1e-12, "a value 1.2x the training max was clipped");
    require(probe[1] == 0.0, "zero does not map to zero");
    // and the persisted val/test features were written through the same
    // unclipped path (nothing saturates exactly at 1.0 unless it equals the
    // training max bit-for-bit)
    for (const pipeline::Dataset* ds : {&val_ds, &test_ds}) {
        for (double f : ds->features) {
            require(std::isfinite(f) && f >= 0.0, "val/test features must be nonnegative");
        }
    }

    // provenance: the normalizer was fitted on train sessions only
    require(train_ds.normalizer_sessions == train_ds.sessions,
            "normalizer provenance does not match the train sessions");
    require(val_ds.normalizer_sessions == train_ds.sessions,
            "validation normalizer provenance mismatch");
    require(test_ds.normalizer_sessions == train_ds.sessions,
            "test normalizer provenance mismatch");
    for (const std::string& s : test_ds.sessions) {
        require(std::find(test_ds.normalizer_sessions.begin(),
                          test_ds.normalizer_sessions.end(),
                          s) == test_ds.normalizer_sessions.end(),
                "test session leaked into the normalizer fit");
    }

    // fitting on a non-train split is refused
    bool threw = false;
    try {
        const srslog::SrsLog log = srslog::read_log_file(config.session_log_path("test0"));
        const auto gnss = pipeline::read_gnss_csv(config.session_gnss_path("test0"));
        pipeline::build_dataset(log, gnss, nullptr, pipeline::Split::test);
    } catch (const provenance_error&) {
        threw = true;
    }
    require(threw, "fitting a normalizer on the test split was not refused");
}

// ---------------------------------------------------------------- criterion 6

void criterion_learnability(const cli::RunConfig& config, double elapsed_s) {
    const std::string report_json = read_file(config.report_path(pipeline::Split::test));
    const dnn::Checkpoint ckpt = dnn::load_checkpoint(config.checkpoint_path());
    const pipeline::Dataset train_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::train));
    const pipeline::Dataset test_ds =
        pipeline::read_dataset(config.dataset_path(pipeline::Split::test));
    const eval::EvalReport report = eval::evaluate(ckpt, test_ds, train_ds);

    std::printf("       test MEDL %.3f m | centroid %.3f m | knn(k=5) %.3f m | runtime %.0f s\n",
                report.mean_euclidean_error_m, report.centroid_baseline_m,
                report.knn_baseline_m, elapsed_s);
    require(report.mean_euclidean_error_m <= 5.0,
            "test mean error " + std::to_string(report.mean_euclidean_error_m) + " m > 5 m");
    require(report.mean_euclidean_error_m <= 0.5 * report.centroid_baseline_m,
            "test mean error is not half the centroid baseline");
    require(report.mean_euclidean_error_m <= 2.0 * report.knn_baseline_m,
            "test mean error exceeds twice the k-NN baseline");
    require(elapsed_s <= 900.0,
            "end-to-end runtime " + std::to_string(elapsed_s) + " s exceeds 15 min");
}

// ---------------------------------------------------------------- criterion 7

void criterion_nlos() {
    const cli::RunConfig config =
        make_run_config("/tmp/srspos_accept_nlos", true, 1200.0, 300.0, 60);
    const eval::EvalReport report = run_end_to_end(config);
    std::printf("       NLoS test MEDL %.3f m | centroid %.3f m\n",
                report.mean_euclidean_error_m, report.centroid_baseline_m);
    require(report.mean_euclidean_error_m <= 0.7 * report.centroid_baseline_m,
            "NLoS mean error " + std::to_string(report.mean_euclidean_error_m) +
                " m does not beat the centroid baseline by 30% (centroid " +
                std::to_string(report.centroid_baseline_m) + " m)");
    fs::remove_all(config.out_dir);
}

// ---------------------------------------------------------------- criterion 8

void criterion_determinism() {
    const auto run_all = [](const std::string& out_dir) {
        cli::RunConfig config = make_run_config(out_dir, false, 60.0, 30.0, 2);
        fs::remove_all(out_dir);
        cli::cmd_generate(config);
        cli::cmd_prepare(config);
        cli::cmd_train(config);
        return config;
    };
    const cli::RunConfig a = run_all("/tmp/srspos_accept_det_a");
    const cli::RunConfig b = run_all("/tmp/srspos_accept_det_b");

    const std::vector<std::pair<std::string, std::string>> pairs = {
        {a.session_log_path("train0"), b.session_log_path("train0")},
        {a.session_gnss_path("train0"), b.session_gnss_path("train0")},
        {a.session_log_path("val0"), b.session_log_path("val0")},
        {a.session_log_path("test0"), b.session_log_path("test0")},
        {a.dataset_path(pipeline::Split::train), b.dataset_path(pipeline::Split::train)},
        {a.dataset_path(pipeline::Split::validation),
         b.dataset_path(pipeline::Split::validation)},
        {a.dataset_path(pipeline::Split::test), b.dataset_path(pipeline::Split::test)},
        {a.history_path(), b.history_path()},
        {a.checkpoint_path(), b.checkpoint_path()},
    };
    for (const auto& [pa, pb] : pairs) {
        require(read_file(pa) == read_file(pb), "byte mismatch between " + pa + " and " + pb);
    }
    fs::remove_all(a.out_dir);
    fs::remove_all(b.out_dir);
}

// ---------------------------------------------------------------- criterion 9

void criterion_test_isolation() {
    cli::RunConfig config = make_run_config("/tmp/srspos_accept_iso", false, 30.0, 30.0, 1);
    // reuse the test session inside the train split
    config.train_sessions.push_back(config.test_sessions.front());
    bool threw = false;
    try {
        config.validate();
    } catch (const provenance_error&) {
        threw = true;
    }
    require(threw, "a test session inside the train split was not rejected");
}

}  // namespace

int main() {
    run_criterion(1, "format round-trip on 10^4 randomized logs under 10 s",
                  criterion_format_round_trip);
    run_criterion(2, "forward-fill equals the brute-force oracle on 10^4 snapshots",
                  criterion_forward_fill_oracle);
    run_criterion(3, "gradient finite-difference check and ADAM scalar trace",
                  criterion_gradient_check);

    // the learnability run feeds criteria 4-6
    cli::RunConfig learn_config =
        make_run_config("/tmp/srspos_accept_learn", false, 1200.0, 300.0, 60);
    double elapsed_s = 0.0;
    bool learn_ok = false;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        run_end_to_end(learn_config);
        elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        learn_ok = true;
    } catch (const std::exception& e) {
        std::printf("[FAIL] criteria 4-6 setup: end-to-end run failed — %s\n", e.what());
        g_failures += 3;
    }
    if (learn_ok) {
        run_criterion(4, "capacity 35072 / sparse 768 / feature width 384 on every row",
                      [&] { criterion_constants(learn_config); });
        run_criterion(5, "normalizer contract and train-only provenance",
                      [&] { criterion_normalizer(learn_config); });
        run_criterion(6, "synthetic LoS dense-walk learnability with calibrated gates",
                      [&] { criterion_learnability(learn_config, elapsed_s); });
        fs::remove_all(learn_config.out_dir);
    }

    run_criterion(7, "NLoS scenario beats the centroid baseline by 30%", criterion_nlos);
    run_criterion(8, "generate/prepare/train are byte-identical across reruns",
                  criterion_determinism);
    run_criterion(9, "a test session in the train split aborts with a provenance error",
                  criterion_test_isolation);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
