#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srspos/dnn.hpp"
#include "srspos/pipeline.hpp"

namespace srspos::eval {

inline constexpr int kDefaultKnnK = 5;

struct EvalReport {
    std::string split;
    std::size_t n_samples = 0;
    double mean_euclidean_error_m = 0.0;
    double p50_m = 0.0;
    double p90_m = 0.0;
    double p95_m = 0.0;
    double max_m = 0.0;
    double centroid_baseline_m = 0.0;
    double knn_baseline_m = 0.0;
    int knn_k = kDefaultKnnK;
    std::vector<double> predictions;         // n x 2
    std::vector<double> per_sample_error_m;  // n
};

// Mean over rows of the Euclidean distance; preds and truth are n x 2 flat.
double mean_euclidean_error(std::span<const double> preds, std::span<const double> truth);

// Nearest-rank percentile, pct in (0, 100].
double percentile_nearest_rank(std::vector<double> values, double pct);

// Constant predictor at the mean training target.
std::array<double, 2> centroid_predictor(std::span<const double> train_targets);

// Mean target of the k nearest training rows under Euclidean feature distance;
// exact ties broken toward the lower training row index.
std::array<double, 2> knn_predict(std::span<const double> train_features,
                                  std::span<const double> train_targets, std::size_t n_train,
                                  std::size_t width, int k, std::span<const double> query);

// All queries at once (parallel over queries); out_xy is n_queries x 2.
void knn_predict_batch(std::span<const double> train_features,
                       std::span<const double> train_targets, std::size_t n_train,
                       std::size_t width, int k, std::span<const double> queries,
                       std::size_t n_queries, double* out_xy);

// Eval-mode inference over a dataset plus baselines from the train split.
// Refuses to evaluate a test dataset whose sessions the checkpoint or the
// normalizer have seen.
EvalReport evaluate(const dnn::Checkpoint& ckpt, const pipeline::Dataset& ds,
                    const pipeline::Dataset& train_ds, int knn_k = kDefaultKnnK);

void write_report_json(const EvalReport& report, const std::string& path);

// CSV: utc_ms,true_x,true_y,pred_x,pred_y,error_m
void write_per_sample_csv(const EvalReport& report, const pipeline::Dataset& ds,
                          const std::string& path);

}  // namespace srspos::eval
