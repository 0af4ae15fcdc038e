#pragma once

#include <memory>
#include <vector>

#include "handpose/nn/layers.hpp"

namespace handpose::nn {

/// Ordered layer stack with explicit train/eval mode. Forward in eval mode is
/// pure; train mode draws dropout masks from the supplied rng.
template <class T>
class Network {
public:
    Network() = default;

    void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }

    std::size_t layer_count() const { return layers_.size(); }
    Layer<T>& layer(std::size_t i) { return *layers_[i]; }
    const Layer<T>& layer(std::size_t i) const { return *layers_[i]; }

    void set_mode(Mode m) { mode_ = m; }
    Mode mode() const { return mode_; }

    void set_input_shape(std::vector<int> chw) { input_shape_ = std::move(chw); }
    const std::vector<int>& input_shape() const { return input_shape_; }

    Tensor<T> forward(const Tensor<T>& x, Rng* rng = nullptr) {
        if (!input_shape_.empty()) {
            if (x.shape.size() != 4 || x.dim(1) != input_shape_[0] ||
                x.dim(2) != input_shape_[1] || x.dim(3) != input_shape_[2])
                throw ShapeError("network: input shape mismatch");
        }
        Tensor<T> v = x;
        for (auto& layer : layers_) v = layer->forward(v, mode_, rng);
        return v;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) {
        Tensor<T> g = grad_out;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
        return g;
    }

    std::vector<ParamRef<T>> parameters() {
        std::vector<ParamRef<T>> out;
        for (auto& layer : layers_) layer->collect_params(out);
        return out;
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (const auto& p : parameters()) n += p.value->size();
        return n;
    }

    void zero_grads() {
        for (auto& p : parameters()) p.grad->fill(T{0});
    }

    nlohmann::json arch() const {
        nlohmann::json layers = nlohmann::json::array();
        for (const auto& layer : layers_) layers.push_back(layer->spec());
        return {{"input", input_shape_}, {"layers", layers}};
    }

    static Network from_arch(const nlohmann::json& arch) {
        Network net;
        net.set_input_shape(arch.at("input").get<std::vector<int>>());
        for (const auto& spec : arch.at("layers")) net.add(make_layer<T>(spec));
        return net;
    }

private:
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::vector<int> input_shape_;
    Mode mode_ = Mode::Eval;
};

}  // namespace handpose::nn
