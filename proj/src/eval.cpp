#include "srspos/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "srspos/errors.hpp"
#include "srspos/kernels.hpp"

namespace srspos::eval {

namespace {

std::vector<double> per_row_distance(std::span<const double> preds,
                                     std::span<const double> truth) {
    if (preds.size() != truth.size() || preds.size() % 2 != 0) {
        throw validation_error("prediction and truth arrays must both be n x 2");
    }
    const std::size_t n = preds.size() / 2;
    std::vector<double> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double dx = preds[2 * r] - truth[2 * r];
        const double dy = preds[2 * r + 1] - truth[2 * r + 1];
        dist[r] = std::sqrt(dx * dx + dy * dy);
    }
    return dist;
}

bool sessions_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      std::string* which) {
    for (const std::string& s : a) {
        if (std::find(b.begin(), b.end(), s) != b.end()) {
            *which = s;
            return true;
        }
    }
    return false;
}

}  // namespace

double mean_euclidean_error(std::span<const double> preds, std::span<const double> truth) {
    if (preds.empty()) {
        throw validation_error("mean Euclidean error requires at least one row");
    }
    const std::vector<double> dist = per_row_distance(preds, truth);
    return kernels::pairwise_sum(dist.data(), dist.size()) / static_cast<double>(dist.size());
}

double percentile_nearest_rank(std::vector<double> values, double pct) {
    if (values.empty()) {
        throw validation_error("percentile of an empty series");
    }
    if (pct <= 0.0 || pct > 100.0) {
        throw validation_error("percentile must lie in (0, 100]");
    }
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(pct / 100.0 * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

std::array<double, 2> centroid_predictor(std::span<const double> train_targets) {
    if (train_targets.empty() || train_targets.size() % 2 != 0) {
        throw validation_error("centroid requires at least one training target");
    }
    const std::size_t n = train_targets.size() / 2;
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    for (std::size_t r = 0; r < n; ++r) {
        xs[r] = train_targets[2 * r];
        ys[r] = train_targets[2 * r + 1];
    }
    return {kernels::pairwise_sum(xs.data(), n) / static_cast<double>(n),
            kernels::pairwise_sum(ys.data(), n) / static_cast<double>(n)};
}

namespace {

struct Neighbor {
    double dist2;
    std::size_t index;

    bool operator<(const Neighbor& o) const {
        return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
    }
};

std::array<double, 2> knn_one(const double* train_features, const double* train_targets,
                              std::size_t n_train, std::size_t width, std::size_t k,
                              const double* query) {
    // running top-k ordered by (distance, index); scanning indices in
    // ascending order makes exact ties resolve to the lower index
    std::vector<Neighbor> best;
    best.reserve(k + 1);
    for (std::size_t t = 0; t < n_train; ++t) {
        const double* row = train_features + t * width;
        double acc = 0.0;
        for (std::size_t i = 0; i < width; ++i) {
            const double d = query[i] - row[i];
            acc += d * d;
        }
        const Neighbor cand{acc, t};
        if (best.size() < k) {
            best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        } else if (cand < best.back()) {
            best.pop_back();
            best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        }
    }
    double x = 0.0;
    double y = 0.0;
    for (const Neighbor& nb : best) {
        x += train_targets[2 * nb.index];
        y += train_targets[2 * nb.index + 1];
    }
    const auto count = static_cast<double>(best.size());
    return {x / count, y / count};
}

}  // namespace

std::array<double, 2> knn_predict(std::span<const double> train_features,
                                  std::span<const double> train_targets, std::size_t n_train,
                                  std::size_t width, int k, std::span<const double> query) {
    if (n_train == 0) {
        throw validation_error("k-NN requires a nonempty training set");
    }
    if (k < 1 || static_cast<std::size_t>(k) > n_train) {
        throw validation_error("k must lie in [1, n_train]");
    }
    if (query.size() != width || train_features.size() != n_train * width ||
        train_targets.size() != 2 * n_train) {
        throw validation_error("k-NN input shapes are inconsistent");
    }
    return knn_one(train_features.data(), train_targets.data(), n_train, width,
                   static_cast<std::size_t>(k), query.data());
}

void knn_predict_batch(std::span<const double> train_features,
                       std::span<const double> train_targets, std::size_t n_train,
                       std::size_t width, int k, std::span<const double> queries,
                       std::size_t n_queries, double* out_xy) {
    if (n_train == 0) {
        throw validation_error("k-NN requires a nonempty training set");
    }
    if (k < 1 || static_cast<std::size_t>(k) > n_train) {
        throw validation_error("k must lie in [1, n_train]");
    }
    if (queries.size() != n_queries * width) {
        throw validation_error("k-NN query shapes are inconsistent");
    }
    const double* tf = train_features.data();
    const double* tt = train_targets.data();
    const double* q = queries.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_queries); ++i) {
        const auto xy = knn_one(tf, tt, n_train, width, static_cast<std::size_t>(k),
                                q + static_cast<std::size_t>(i) * width);
        out_xy[2 * i] = xy[0];
        out_xy[2 * i + 1] = xy[1];
    }
}

EvalReport evaluate(const dnn::Checkpoint& ckpt, const pipeline::Dataset& ds,
                    const pipeline::Dataset& train_ds, int knn_k) {
    if (ds.feature_width != ckpt.net.arch.input_width()) {
        throw validation_error("dataset feature width " + std::to_string(ds.feature_width) +
                               " does not match the checkpoint input width " +
                               std::to_string(ckpt.net.arch.input_width()));
    }
    if (ds.n_rows() == 0) {
        throw validation_error("cannot evaluate an empty dataset");
    }
    if (ds.split == pipeline::Split::test) {
        std::string which;
        if (sessions_overlap(ds.sessions, ckpt.sessions_seen, &which)) {
            throw provenance_error("test session '" + which +
                                   "' was seen during training or model selection");
        }
        if (sessions_overlap(ds.sessions, ds.normalizer_sessions, &which)) {
            throw provenance_error("test session '" + which +
                                   "' contributed to the normalizer fit");
        }
    }

    EvalReport report;
    report.split = pipeline::to_string(ds.split);
    report.n_samples = ds.n_rows();
    report.knn_k = knn_k;
    report.predictions = dnn::forward_eval(ckpt.net, ds.features.data(), ds.n_rows());
    report.per_sample_error_m = per_row_distance(report.predictions, ds.targets);
    report.mean_euclidean_error_m = kernels::pairwise_sum(report.per_sample_error_m.data(),
                                                          report.per_sample_error_m.size()) /
                                    static_cast<double>(report.per_sample_error_m.size());
    report.p50_m = percentile_nearest_rank(report.per_sample_error_m, 50.0);
    report.p90_m = percentile_nearest_rank(report.per_sample_error_m, 90.0);
    report.p95_m = percentile_nearest_rank(report.per_sample_error_m, 95.0);
    report.max_m =
        *std::max_element(report.per_sample_error_m.begin(), report.per_sample_error_m.end());

    const auto center = centroid_predictor(train_ds.targets);
    std::vector<double> centroid_preds(2 * ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        centroid_preds[2 * r] = center[0];
        centroid_preds[2 * r + 1] = center[1];
    }
    report.centroid_baseline_m = mean_euclidean_error(centroid_preds, ds.targets);

    if (train_ds.feature_width != ds.feature_width) {
        throw validation_error("train and evaluation datasets disagree on feature width");
    }
    std::vector<double> knn_preds(2 * ds.n_rows());
    knn_predict_batch(train_ds.features, train_ds.targets, train_ds.n_rows(),
                      static_cast<std::size_t>(ds.feature_width), knn_k, ds.features,
                      ds.n_rows(), knn_preds.data());
    report.knn_baseline_m = mean_euclidean_error(knn_preds, ds.targets);
    return report;
}

void write_report_json(const EvalReport& report, const std::string& path) {
    nlohmann::json j;
    j["split"] = report.split;
    j["n_samples"] = report.n_samples;
    j["mean_euclidean_error_m"] = report.mean_euclidean_error_m;
    j["percentiles_m"] = {{"p50", report.p50_m}, {"p90", report.p90_m}, {"p95", report.p95_m}};
    j["max_error_m"] = report.max_m;
    j["baselines_m"] = {{"centroid", report.centroid_baseline_m},
                        {"knn", report.knn_baseline_m}};
    j["knn_k"] = report.knn_k;
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot create report '" + path + "'");
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw io_error("failed writing report '" + path + "'");
    }
}

void write_per_sample_csv(const EvalReport& report, const pipeline::Dataset& ds,
                          const std::string& path) {
    if (report.n_samples != ds.n_rows()) {
        throw validation_error("report and dataset row counts differ");
    }
    std::ofstream out(path);
    if (!out) {
        throw io_error("cannot create per-sample file '" + path + "'");
    }
    out << "utc_ms,true_x,true_y,pred_x,pred_y,error_m\n";
    char buf[192];
    for (std::size_t r = 0; r < report.n_samples; ++r) {
        const int n = std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                                    static_cast<long long>(ds.utc_ms[r]), ds.targets[2 * r],
                                    ds.targets[2 * r + 1], report.predictions[2 * r],
                                    report.predictions[2 * r + 1],
                                    report.per_sample_error_m[r]);
        out.write(buf, n);
    }
    out.flush();
    if (!out) {
        throw io_error("failed writing per-sample file '" + path + "'");
    }
}

}  // namespace srspos::eval
