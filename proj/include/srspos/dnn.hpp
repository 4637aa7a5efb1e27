#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srspos/pipeline.hpp"
#include "srspos/rng.hpp"

namespace srspos::dnn {

inline constexpr double kSafeDistanceEps = 1e-12;  // guards the loss gradient at zero distance
inline constexpr int kOutputWidth = 2;
inline constexpr int kMaxHiddenLayers = 15;
inline constexpr int kMaxWidthAfterFirstHidden = 128;
inline constexpr int kCenterWidthMin = 20;
inline constexpr int kCenterWidthMax = 40;

// Three-block fully-connected architecture: a shrinking input block into a
// bottleneck, identical center layers of 20-40 units, and a positioning block
// ending in the two output coordinates.
struct Architecture {
    std::vector<int> input_block{384, 128, 32};  // starts at the feature width
    int center_layers = 2;
    int center_width = 32;
    std::vector<int> positioning_block{16, 2};
    double dropout_hidden = 0.1;    // applied to every hidden layer...
    std::vector<double> dropout_p;  // ...unless overridden per hidden layer

    static Architecture default_arch(int input_width = pipeline::kFeatureWidth);

    // full width chain: input, hidden layers, output
    std::vector<int> widths() const;
    int input_width() const;
    int layer_count() const { return static_cast<int>(widths().size()) - 1; }
    std::vector<double> dropout_per_hidden_layer() const;

    void validate() const;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch_size = 64;
    int epochs = 100;
    double target_noise_sigma_m = 3.5;
    std::uint64_t seed = 1;
    bool l1_loss = false;  // per-coordinate absolute loss instead of Euclidean

    void validate() const;
};

struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
};

struct NetworkState {
    Architecture arch;
    std::vector<Layer> layers;
    std::vector<Layer> moment1;  // ADAM first moments, same shapes
    std::vector<Layer> moment2;  // ADAM second moments
    std::int64_t step = 0;
    std::uint64_t dropout_seed = 0;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero, deterministic per seed.
NetworkState init_network(const Architecture& arch, std::uint64_t seed);

// Deterministic inference without dropout; returns n x 2 predictions.
std::vector<double> forward_eval(const NetworkState& net, const double* x, std::size_t n);

// Activations recorded by a train-mode pass, needed for backpropagation.
struct ForwardTrace {
    std::vector<std::vector<double>> relu_out;       // per hidden layer, before dropout
    std::vector<std::vector<double>> dropout_scale;  // inverted-dropout factor per element
    std::vector<std::vector<double>> layer_in;       // input to each affine layer
    std::vector<double> predictions;                 // n x 2
};

ForwardTrace forward_train(const NetworkState& net, const double* x, std::size_t n,
                           Rng& dropout_rng);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> dpred;  // n x 2
};

// Mean Euclidean distance between predictions and targets plus its gradient.
LossGrad medl_loss(const double* pred, const double* target, std::size_t n);
// Mean per-coordinate absolute error; the optional L1 reading of the loss.
LossGrad mean_l1_loss(const double* pred, const double* target, std::size_t n);

struct Gradients {
    std::vector<Layer> layers;  // same shapes as the network
};

// Exact reverse-mode gradients of the loss through the traced forward pass.
Gradients backward(const NetworkState& net, const ForwardTrace& trace, std::size_t n,
                   const double* dpred);

void adam_step(NetworkState& net, const Gradients& grads, const TrainConfig& config);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_medl = 0.0;
};

struct TrainResult {
    NetworkState best;  // parameters with the lowest validation MEDL
    std::vector<EpochStats> history;
};

// Seeded shuffling, fresh target noise every epoch, minibatch ADAM updates and
// best-on-validation parameter selection. Throws internal_error on divergence.
TrainResult train(const NetworkState& net, const pipeline::Dataset& train_ds,
                  const pipeline::Dataset& val_ds, const TrainConfig& config,
                  const std::function<void(const EpochStats&, const NetworkState&)>& on_epoch = {});

// Self-contained persisted model: parameters, optimizer state, the fitted
// normalizer max, the feature mode and split provenance.
struct Checkpoint {
    NetworkState net;
    double normalizer_max = 0.0;
    bool root_features = true;
    std::vector<std::string> sessions_seen;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace srspos::dnn
