#include "srspos/dnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srspos/errors.hpp"
#include "srspos/kernels.hpp"

namespace srspos::dnn {

Architecture Architecture::default_arch(int input_width) {
    Architecture arch;
    arch.input_block = {input_width, 128, 32};
    arch.center_layers = 2;
    arch.center_width = 32;
    arch.positioning_block = {16, 2};
    arch.dropout_hidden = 0.1;
    return arch;
}

std::vector<int> Architecture::widths() const {
    std::vector<int> w = input_block;
    for (int i = 0; i < center_layers; ++i) {
        w.push_back(center_width);
    }
    w.insert(w.end(), positioning_block.begin(), positioning_block.end());
    return w;
}

int Architecture::input_width() const {
    if (input_block.empty()) {
        throw validation_error("architecture input block is empty");
    }
    return input_block.front();
}

std::vector<double> Architecture::dropout_per_hidden_layer() const {
    const auto hidden = static_cast<std::size_t>(layer_count() - 1);
    if (!dropout_p.empty()) {
        if (dropout_p.size() != hidden) {
            throw validation_error("dropout_p must list one probability per hidden layer (" +
                                   std::to_string(hidden) + ")");
        }
        return dropout_p;
    }
    return std::vector<double>(hidden, dropout_hidden);
}

void Architecture::validate() const {
    if (input_block.size() < 2) {
        throw validation_error("input block needs the input width and at least one layer");
    }
    for (std::size_t i = 1; i < input_block.size(); ++i) {
        if (input_block[i] > input_block[i - 1]) {
            throw validation_error("input block widths must be nonincreasing");
        }
    }
    if (center_layers < 0) {
        throw validation_error("center layer count must be nonnegative");
    }
    if (center_layers > 0 &&
        (center_width < kCenterWidthMin || center_width > kCenterWidthMax)) {
        throw validation_error("center width must lie in [" + std::to_string(kCenterWidthMin) +
                               ", " + std::to_string(kCenterWidthMax) + "]");
    }
    if (positioning_block.empty() || positioning_block.back() != kOutputWidth) {
        throw validation_error("last width must be 2");
    }
    const std::vector<int> w = widths();
    for (int width : w) {
        if (width < 1) {
            throw validation_error("layer widths must be positive");
        }
    }
    for (std::size_t i = 2; i < w.size(); ++i) {
        if (w[i] > kMaxWidthAfterFirstHidden) {
            throw validation_error("widths after the input and first hidden layer must be <= " +
                                   std::to_string(kMaxWidthAfterFirstHidden));
        }
    }
    const int hidden = layer_count() - 1;
    if (hidden < 1) {
        throw validation_error("architecture needs at least one hidden layer");
    }
    if (hidden > kMaxHiddenLayers) {
        throw validation_error("hidden layer total must be <= " +
                               std::to_string(kMaxHiddenLayers));
    }
    for (double p : dropout_per_hidden_layer()) {
        if (p < 0.0 || p >= 1.0) {
            throw validation_error("dropout probabilities must lie in [0, 1)");
        }
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw validation_error("learning rate must be positive");
    }
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw validation_error("ADAM betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) {
        throw validation_error("ADAM epsilon must be positive");
    }
    if (batch_size < 1) {
        throw validation_error("batch size must be >= 1");
    }
    if (epochs < 0) {
        throw validation_error("epoch count must be nonnegative");
    }
    if (target_noise_sigma_m < 0.0) {
        throw validation_error("target noise sigma must be nonnegative");
    }
}

namespace {

std::vector<Layer> zero_like(const std::vector<Layer>& layers) {
    std::vector<Layer> z;
    z.reserve(layers.size());
    for (const Layer& l : layers) {
        Layer zl;
        zl.in = l.in;
        zl.out = l.out;
        zl.w.assign(l.w.size(), 0.0);
        zl.b.assign(l.b.size(), 0.0);
        z.push_back(std::move(zl));
    }
    return z;
}

}  // namespace

NetworkState init_network(const Architecture& arch, std::uint64_t seed) {
    arch.validate();
    NetworkState net;
    net.arch = arch;
    net.dropout_seed = derive_seed(seed, 0xD0);
    Rng rng(seed);
    const std::vector<int> w = arch.widths();
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        Layer layer;
        layer.in = w[l];
        layer.out = w[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        layer.w.resize(static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out));
        for (double& v : layer.w) {
            v = rng.uniform(-bound, bound);
        }
        layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
        net.layers.push_back(std::move(layer));
    }
    net.moment1 = zero_like(net.layers);
    net.moment2 = zero_like(net.layers);
    return net;
}

std::vector<double> forward_eval(const NetworkState& net, const double* x, std::size_t n) {
    if (net.layers.empty()) {
        throw validation_error("network has no layers");
    }
    std::vector<double> cur(x, x + n * static_cast<std::size_t>(net.layers.front().in));
    std::vector<double> next;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        next.resize(n * static_cast<std::size_t>(layer.out));
        kernels::dense_forward(cur.data(), n, static_cast<std::size_t>(layer.in),
                               layer.w.data(), layer.b.data(),
                               static_cast<std::size_t>(layer.out), next.data());
        if (l + 1 < net.layers.size()) {
            for (double& v : next) {
                v = v > 0.0 ? v : 0.0;
            }
        }
        cur.swap(next);
    }
    return cur;
}

ForwardTrace forward_train(const NetworkState& net, const double* x, std::size_t n,
                           Rng& dropout_rng) {
    if (net.layers.empty()) {
        throw validation_error("network has no layers");
    }
    const std::vector<double> dropout = net.arch.dropout_per_hidden_layer();
    ForwardTrace trace;
    trace.layer_in.resize(net.layers.size());
    trace.relu_out.resize(net.layers.size() - 1);
    trace.dropout_scale.resize(net.layers.size() - 1);

    std::vector<double> cur(x, x + n * static_cast<std::size_t>(net.layers.front().in));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        trace.layer_in[l] = cur;
        std::vector<double> z(n * static_cast<std::size_t>(layer.out));
        kernels::dense_forward(cur.data(), n, static_cast<std::size_t>(layer.in),
                               layer.w.data(), layer.b.data(),
                               static_cast<std::size_t>(layer.out), z.data());
        if (l + 1 == net.layers.size()) {
            trace.predictions = z;
            return trace;
        }
        for (double& v : z) {
            v = v > 0.0 ? v : 0.0;
        }
        trace.relu_out[l] = z;
        // inverted dropout: zero with probability p, scale survivors by 1/(1-p)
        const double p = dropout[l];
        std::vector<double> scale(z.size(), 1.0);
        if (p > 0.0) {
            const double keep_scale = 1.0 / (1.0 - p);
            for (double& s : scale) {
                s = dropout_rng.bernoulli(p) ? 0.0 : keep_scale;
            }
            for (std::size_t i = 0; i < z.size(); ++i) {
                z[i] *= scale[i];
            }
        }
        trace.dropout_scale[l] = std::move(scale);
        cur = std::move(z);
    }
    return trace;  // unreachable
}

LossGrad medl_loss(const double* pred, const double* target, std::size_t n) {
    if (n == 0) {
        throw validation_error("loss requires at least one row");
    }
    LossGrad lg;
    lg.dpred.resize(2 * n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double dx = pred[2 * r] - target[2 * r];
        const double dy = pred[2 * r + 1] - target[2 * r + 1];
        const double dist = std::sqrt(dx * dx + dy * dy);
        acc += dist;
        const double denom = (dist + kSafeDistanceEps) * static_cast<double>(n);
        lg.dpred[2 * r] = dx / denom;
        lg.dpred[2 * r + 1] = dy / denom;
    }
    lg.loss = acc / static_cast<double>(n);
    return lg;
}

LossGrad mean_l1_loss(const double* pred, const double* target, std::size_t n) {
    if (n == 0) {
        throw validation_error("loss requires at least one row");
    }
    LossGrad lg;
    lg.dpred.resize(2 * n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            const double d = pred[2 * r + c] - target[2 * r + c];
            acc += std::abs(d);
            lg.dpred[2 * r + c] =
                (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / static_cast<double>(n);
        }
    }
    lg.loss = acc / static_cast<double>(n);
    return lg;
}

Gradients backward(const NetworkState& net, const ForwardTrace& trace, std::size_t n,
                   const double* dpred) {
    const std::size_t n_layers = net.layers.size();
    if (trace.layer_in.size() != n_layers) {
        throw validation_error("forward trace does not match the network");
    }
    Gradients grads;
    grads.layers = zero_like(net.layers);

    std::vector<double> delta(dpred, dpred + 2 * n);
    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& layer = net.layers[li];
        Layer& g = grads.layers[li];
        kernels::dense_backward_params(delta.data(), trace.layer_in[li].data(), n,
                                       static_cast<std::size_t>(layer.in),
                                       static_cast<std::size_t>(layer.out), g.w.data(),
                                       g.b.data());
        if (li == 0) {
            break;
        }
        std::vector<double> dinput(n * static_cast<std::size_t>(layer.in));
        kernels::dense_backward_input(delta.data(), layer.w.data(), n,
                                      static_cast<std::size_t>(layer.in),
                                      static_cast<std::size_t>(layer.out), dinput.data());
        // back through dropout and ReLU of hidden layer li-1
        const std::vector<double>& relu = trace.relu_out[li - 1];
        const std::vector<double>& scale = trace.dropout_scale[li - 1];
        for (std::size_t i = 0; i < dinput.size(); ++i) {
            dinput[i] *= scale[i] * (relu[i] > 0.0 ? 1.0 : 0.0);
        }
        delta = std::move(dinput);
    }
    return grads;
}

void adam_step(NetworkState& net, const Gradients& grads, const TrainConfig& config) {
    if (grads.layers.size() != net.layers.size()) {
        throw validation_error("gradient shapes do not match the network");
    }
    net.step += 1;
    const double t = static_cast<double>(net.step);
    const double bc1 = 1.0 - std::pow(config.beta1, t);
    const double bc2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        Layer& m = net.moment1[l];
        Layer& v = net.moment2[l];
        const Layer& g = grads.layers[l];
        if (g.w.size() != layer.w.size() || g.b.size() != layer.b.size()) {
            throw validation_error("gradient shapes do not match layer " + std::to_string(l));
        }
        const auto update = [&](std::vector<double>& theta, std::vector<double>& mm,
                                std::vector<double>& vv, const std::vector<double>& gg) {
            for (std::size_t i = 0; i < theta.size(); ++i) {
                mm[i] = config.beta1 * mm[i] + (1.0 - config.beta1) * gg[i];
                vv[i] = config.beta2 * vv[i] + (1.0 - config.beta2) * gg[i] * gg[i];
                const double m_hat = mm[i] / bc1;
                const double v_hat = vv[i] / bc2;
                theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
            }
        };
        update(layer.w, m.w, v.w, g.w);
        update(layer.b, m.b, v.b, g.b);
    }
}

namespace {

double mean_euclidean(const std::vector<double>& pred, const std::vector<double>& truth) {
    const std::size_t n = pred.size() / 2;
    std::vector<double> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double dx = pred[2 * r] - truth[2 * r];
        const double dy = pred[2 * r + 1] - truth[2 * r + 1];
        dist[r] = std::sqrt(dx * dx + dy * dy);
    }
    return kernels::pairwise_sum(dist.data(), n) / static_cast<double>(n);
}

}  // namespace

TrainResult train(const NetworkState& net, const pipeline::Dataset& train_ds,
                  const pipeline::Dataset& val_ds, const TrainConfig& config,
                  const std::function<void(const EpochStats&, const NetworkState&)>& on_epoch) {
    config.validate();
    if (train_ds.feature_width != val_ds.feature_width) {
        throw validation_error("train and validation datasets disagree on feature width");
    }
    if (train_ds.feature_width != net.arch.input_width()) {
        throw validation_error("dataset feature width " +
                               std::to_string(train_ds.feature_width) +
                               " does not match the network input width " +
                               std::to_string(net.arch.input_width()));
    }
    if (train_ds.n_rows() == 0 || val_ds.n_rows() == 0) {
        throw validation_error("training requires nonempty train and validation datasets");
    }

    TrainResult result;
    result.best = net;
    if (config.epochs == 0) {
        return result;
    }

    NetworkState current = net;
    const std::size_t n = train_ds.n_rows();
    const auto width = static_cast<std::size_t>(train_ds.feature_width);
    const auto batch = static_cast<std::size_t>(config.batch_size);

    std::vector<std::size_t> order(n);
    std::vector<double> bx(batch * width);
    std::vector<double> bt(batch * 2);
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<double> noisy_targets = train_ds.targets;
        pipeline::inject_target_noise(noisy_targets, config.target_noise_sigma_m, config.seed,
                                      static_cast<std::uint64_t>(epoch));
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(derive_seed(config.seed, 2 * static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);
        Rng dropout_rng(derive_seed(current.dropout_seed, static_cast<std::uint64_t>(epoch)));

        double loss_acc = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t bn = std::min(batch, n - start);
            for (std::size_t r = 0; r < bn; ++r) {
                const std::size_t src = order[start + r];
                std::copy_n(train_ds.features.begin() + static_cast<std::ptrdiff_t>(src * width),
                            width, bx.begin() + static_cast<std::ptrdiff_t>(r * width));
                bt[2 * r] = noisy_targets[2 * src];
                bt[2 * r + 1] = noisy_targets[2 * src + 1];
            }
            const ForwardTrace trace = forward_train(current, bx.data(), bn, dropout_rng);
            const LossGrad lg = config.l1_loss
                                    ? mean_l1_loss(trace.predictions.data(), bt.data(), bn)
                                    : medl_loss(trace.predictions.data(), bt.data(), bn);
            if (!std::isfinite(lg.loss)) {
                throw internal_error("training diverged at epoch " + std::to_string(epoch) +
                                     ": batch loss is not finite");
            }
            loss_acc += lg.loss * static_cast<double>(bn);
            const Gradients grads = backward(current, trace, bn, lg.dpred.data());
            adam_step(current, grads, config);
        }

        const std::vector<double> val_pred =
            forward_eval(current, val_ds.features.data(), val_ds.n_rows());
        const double val_medl = mean_euclidean(val_pred, val_ds.targets);
        if (!std::isfinite(val_medl)) {
            throw internal_error("training diverged at epoch " + std::to_string(epoch) +
                                 ": validation error is not finite");
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_acc / static_cast<double>(n);
        stats.val_medl = val_medl;
        result.history.push_back(stats);
        if (val_medl < best_val) {
            best_val = val_medl;
            result.best = current;
        }
        if (on_epoch) {
            on_epoch(stats, result.best);
        }
    }
    return result;
}

}  // namespace srspos::dnn
