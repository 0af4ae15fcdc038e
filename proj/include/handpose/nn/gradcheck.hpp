#pragma once

#include <string>

#include "handpose/nn/network.hpp"

namespace handpose::nn {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t coordinates_checked = 0;
    std::string worst;  // human-readable location of the worst coordinate

    bool passed(double tolerance) const { return max_rel_error <= tolerance; }
};

/// Compare analytic gradients against central finite differences for the
/// scalar objective L = mean((net(x) - target)^2). Checks parameters and the
/// input; `max_per_tensor` = 0 checks every coordinate, otherwise a
/// deterministic subsample per tensor. Double precision only.
inline GradCheckReport gradient_check(Network<double>& net, const Tensor<double>& input,
                                      const Tensor<double>& target, std::size_t max_per_tensor = 0,
                                      std::uint64_t seed = 7) {
    net.set_mode(Mode::Eval);
    Tensor<double> x = input;

    const auto loss = [&]() {
        const Tensor<double> y = net.forward(x);
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = y.values[i] - target.values[i];
            acc += d * d;
        }
        return acc / static_cast<double>(y.size());
    };

    // Analytic gradients.
    const Tensor<double> y = net.forward(x);
    Tensor<double> dloss(y.shape);
    const double inv_n = 1.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        dloss.values[i] = 2.0 * (y.values[i] - target.values[i]) * inv_n;
    net.zero_grads();
    const Tensor<double> dinput = net.backward(dloss);

    GradCheckReport report;
    Rng rng(seed);

    const auto check_coord = [&](double* value, double analytic, const std::string& where) {
        const double saved = *value;
        const double h = 1e-5 * std::max(1.0, std::abs(saved));
        *value = saved + h;
        const double up = loss();
        *value = saved - h;
        const double down = loss();
        *value = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        const double rel = std::abs(analytic - numeric) / denom;
        ++report.coordinates_checked;
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst = where;
        }
    };

    const auto check_tensor = [&](Tensor<double>& value, const Tensor<double>& grad,
                                  const std::string& name) {
        const std::size_t n = value.size();
        if (max_per_tensor == 0 || n <= max_per_tensor) {
            for (std::size_t i = 0; i < n; ++i)
                check_coord(&value.values[i], grad.values[i], name + "[" + std::to_string(i) + "]");
        } else {
            for (std::size_t s = 0; s < max_per_tensor; ++s) {
                const std::size_t i = rng.below(n);
                check_coord(&value.values[i], grad.values[i], name + "[" + std::to_string(i) + "]");
            }
        }
    };

    auto params = net.parameters();
    for (std::size_t p = 0; p < params.size(); ++p)
        check_tensor(*params[p].value, *params[p].grad, "param" + std::to_string(p));
    check_tensor(x, dinput, "input");
    return report;
}

}  // namespace handpose::nn
