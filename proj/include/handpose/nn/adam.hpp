#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "handpose/nn/network.hpp"

namespace handpose::nn {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Per-parameter first/second moments plus the shared step counter.
template <class T>
struct AdamState {
    AdamConfig cfg;
    std::int64_t step = 0;
    std::vector<Tensor<T>> m;
    std::vector<Tensor<T>> v;

    void init(const std::vector<ParamRef<T>>& params) {
        m.clear();
        v.clear();
        for (const auto& p : params) {
            m.emplace_back(p.value->shape);
            v.emplace_back(p.value->shape);
        }
        step = 0;
    }
};

/// One ADAM update with bias correction. Frozen parameters keep their moment
/// slots but are not touched.
template <class T>
void adam_step(const std::vector<ParamRef<T>>& params, AdamState<T>& state) {
    if (state.m.size() != params.size()) state.init(params);
    state.step += 1;
    const double b1 = state.cfg.beta1;
    const double b2 = state.cfg.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

    for (std::size_t p = 0; p < params.size(); ++p) {
        if (!params[p].trainable) continue;
        Tensor<T>& value = *params[p].value;
        const Tensor<T>& grad = *params[p].grad;
        Tensor<T>& m = state.m[p];
        Tensor<T>& v = state.v[p];
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = static_cast<double>(grad.values[i]);
            if (!std::isfinite(g)) throw TrainingError("adam_step: non-finite gradient");
            const double mi = b1 * static_cast<double>(m.values[i]) + (1.0 - b1) * g;
            const double vi = b2 * static_cast<double>(v.values[i]) + (1.0 - b2) * g * g;
            m.values[i] = static_cast<T>(mi);
            v.values[i] = static_cast<T>(vi);
            const double m_hat = mi / corr1;
            const double v_hat = vi / corr2;
            value.values[i] = static_cast<T>(static_cast<double>(value.values[i]) -
                                             state.cfg.lr * m_hat / (std::sqrt(v_hat) + state.cfg.eps));
        }
    }
}

}  // namespace handpose::nn
