#pragma once

#include <cstdint>

#include "handpose/geometry.hpp"
#include "handpose/nn/network.hpp"
#include "handpose/prior.hpp"
#include "handpose/rng.hpp"

namespace handpose::nn {

enum class NetScale { Full, Desk };

enum class ArchPreset {
    ResNet,        // initial conv + pool + four residual modules
    Original,      // three plain conv+pool stages
    OriginalWide,  // same stages with residual-level filter counts
};

struct PoseNetOptions {
    NetScale scale = NetScale::Desk;
    ArchPreset arch = ArchPreset::ResNet;
    int joints = 14;
    int pca_k = 30;
    double dropout = 0.3;
    bool basic_blocks = false;
    bool freeze_prior = false;
    int fc_width = 0;  // 0 picks the scale default (1024 full, 256 desk)

    int input_resolution() const { return scale == NetScale::Full ? 128 : 64; }
    int fc() const { return fc_width > 0 ? fc_width : (scale == NetScale::Full ? 1024 : 256); }
};

struct RefineNetOptions {
    NetScale scale = NetScale::Desk;
    double dropout = 0.3;
    int fc_width = 0;  // 0 picks the scale default (1024 full, 128 desk)

    int input_resolution() const { return scale == NetScale::Full ? 128 : 64; }
    int fc() const { return fc_width > 0 ? fc_width : (scale == NetScale::Full ? 1024 : 128); }
};

namespace detail {

template <class T>
void he_init(Tensor<T>& w, int fan_in, Rng& rng, double gain = 1.0) {
    const double stddev = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : w.values) v = static_cast<T>(rng.normal(0.0, stddev));
}

template <class T>
void init_conv(Conv2d<T>& c, Rng& rng) {
    const int fan_in = c.in_channels() * c.kernel_size() * c.kernel_size();
    he_init(c.weight(), fan_in, rng);
}

template <class T>
void init_fc(FullyConnected<T>& fc, Rng& rng, double gain = 1.0) {
    he_init(fc.weight(), fc.in_features(), rng, gain);
}

template <class T>
void init_residual(ResidualBlock<T>& block, Rng& rng) {
    init_conv(block.conv(0), rng);
    init_conv(block.conv(1), rng);
    if (block.bottleneck()) init_conv(block.conv(2), rng);
    if (block.has_projection()) init_conv(block.conv(3), rng);
}

}  // namespace detail

/// Pose regression network ending in FC(k) + prior layer, so the output is a
/// normalized 3J vector constrained to the prior's affine span.
template <class T>
Network<T> build_posenet(const PoseNetOptions& opt, const PcaPrior& prior, std::uint64_t seed) {
    const int dim = 3 * opt.joints;
    if (prior.dim() != dim) throw ShapeError("build_posenet: prior dimension != 3*joints");
    if (prior.k() != opt.pca_k) throw ShapeError("build_posenet: prior k mismatch");

    Rng rng(mix_seed(seed, 0x706f7365ull));  // weight-init stream
    Network<T> net;
    const int res = opt.input_resolution();
    net.set_input_shape({1, res, res});

    const bool full = opt.scale == NetScale::Full;
    int channels = 0;
    int spatial = res;

    if (opt.arch == ArchPreset::ResNet) {
        const int c0 = full ? 64 : 16;
        const int k0 = full ? 5 : 3;
        auto stem = std::make_unique<Conv2d<T>>(1, c0, k0, 1, k0 / 2);
        detail::init_conv(*stem, rng);
        net.add(std::move(stem));
        net.add(std::make_unique<ReLU<T>>());
        net.add(std::make_unique<MaxPool2d<T>>(2));
        channels = c0;
        spatial /= 2;

        const int stage_filters[4] = {full ? 64 : 16, full ? 128 : 32, full ? 256 : 64,
                                      full ? 256 : 64};
        for (int f : stage_filters) {
            auto block = std::make_unique<ResidualBlock<T>>(channels, f, 2, !opt.basic_blocks);
            detail::init_residual(*block, rng);
            net.add(std::move(block));
            channels = f;
            spatial /= 2;
        }
    } else {
        const bool wide = opt.arch == ArchPreset::OriginalWide;
        const int base[3] = {wide ? (full ? 64 : 16) : 8, wide ? (full ? 128 : 32) : 8,
                             wide ? (full ? 256 : 64) : 8};
        const int k0 = full ? 5 : 3;
        const int ks[3] = {k0, k0, 3};
        for (int i = 0; i < 3; ++i) {
            auto conv = std::make_unique<Conv2d<T>>(i == 0 ? 1 : base[i - 1], base[i], ks[i], 1,
                                                    ks[i] / 2);
            detail::init_conv(*conv, rng);
            net.add(std::move(conv));
            net.add(std::make_unique<ReLU<T>>());
            if (i < 2) {
                net.add(std::make_unique<MaxPool2d<T>>(2));
                spatial /= 2;
            }
        }
        channels = base[2];
    }

    const int flat = channels * spatial * spatial;
    const int fc_width = opt.fc();
    for (int i = 0; i < 2; ++i) {
        auto fc = std::make_unique<FullyConnected<T>>(i == 0 ? flat : fc_width, fc_width);
        detail::init_fc(*fc, rng);
        net.add(std::move(fc));
        net.add(std::make_unique<ReLU<T>>());
        net.add(std::make_unique<Dropout<T>>(opt.dropout));
    }

    // Coefficient layer: small init keeps initial predictions near the mean pose.
    auto coeff = std::make_unique<FullyConnected<T>>(fc_width, opt.pca_k);
    detail::init_fc(*coeff, rng, 0.01);
    net.add(std::move(coeff));

    const OutputLayerInit init = init_output_layer(prior);
    auto prior_layer = std::make_unique<PriorLayer<T>>(init.k, init.dim);
    for (int d = 0; d < init.dim; ++d)
        for (int c = 0; c < init.k; ++c)
            prior_layer->weight().values[static_cast<std::size_t>(c) * init.dim + d] =
                static_cast<T>(init.weights[static_cast<std::size_t>(d) * init.k + c]);
    for (int d = 0; d < init.dim; ++d)
        prior_layer->bias().values[d] = static_cast<T>(init.bias[d]);
    prior_layer->set_trainable(!opt.freeze_prior);
    net.add(std::move(prior_layer));
    return net;
}

/// Localization refinement network: three conv+pool stages, two FC+dropout,
/// and a 3-way output interpreted as a normalized offset to the reference
/// joint.
template <class T>
Network<T> build_refinenet(const RefineNetOptions& opt, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x726566696eull));
    Network<T> net;
    const int res = opt.input_resolution();
    net.set_input_shape({1, res, res});

    const bool full = opt.scale == NetScale::Full;
    const int filters[3] = {full ? 32 : 8, full ? 64 : 8, full ? 64 : 16};
    const int ks[3] = {full ? 5 : 3, full ? 5 : 3, 3};
    int channels = 1;
    int spatial = res;
    for (int i = 0; i < 3; ++i) {
        auto conv = std::make_unique<Conv2d<T>>(channels, filters[i], ks[i], 1, ks[i] / 2);
        detail::init_conv(*conv, rng);
        net.add(std::move(conv));
        net.add(std::make_unique<ReLU<T>>());
        net.add(std::make_unique<MaxPool2d<T>>(2));
        channels = filters[i];
        spatial /= 2;
    }

    const int flat = channels * spatial * spatial;
    const int fc_width = opt.fc();
    for (int i = 0; i < 2; ++i) {
        auto fc = std::make_unique<FullyConnected<T>>(i == 0 ? flat : fc_width, fc_width);
        detail::init_fc(*fc, rng);
        net.add(std::move(fc));
        net.add(std::make_unique<ReLU<T>>());
        net.add(std::make_unique<Dropout<T>>(opt.dropout));
    }
    auto out = std::make_unique<FullyConnected<T>>(fc_width, 3);
    detail::init_fc(*out, rng, 0.01);
    net.add(std::move(out));
    return net;
}

/// Eval-mode forward pass of a single patch; returns the raw normalized
/// output vector.
template <class T>
std::vector<double> forward_vector(Network<T>& net, const NormalizedPatch& patch) {
    const auto& in = net.input_shape();
    if (!in.empty() && (in[1] != patch.resolution || in[2] != patch.resolution))
        throw ShapeError("forward_vector: patch resolution does not match network input");
    Tensor<T> x({1, 1, patch.resolution, patch.resolution});
    for (std::size_t i = 0; i < patch.values.size(); ++i)
        x.values[i] = static_cast<T>(patch.values[i]);
    const Mode saved = net.mode();
    net.set_mode(Mode::Eval);
    const Tensor<T> y = net.forward(x);
    net.set_mode(saved);
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = static_cast<double>(y.values[i]);
    return out;
}

/// Full prediction: forward pass plus denormalization against the patch cube.
template <class T>
Pose3D predict(Network<T>& net, const NormalizedPatch& patch) {
    return denormalize_joints(forward_vector(net, patch), patch.cube);
}

}  // namespace handpose::nn
