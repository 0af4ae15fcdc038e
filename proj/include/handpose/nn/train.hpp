#pragma once

#include <chrono>
#include <functional>

#include "handpose/augmentation.hpp"
#include "handpose/nn/adam.hpp"
#include "handpose/nn/network.hpp"

namespace handpose::nn {

struct TrainConfig {
    int epochs = 100;
    int batch_size = 128;
    AdamConfig adam;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> epoch_loss;  // mean squared error per epoch
};

using ProgressFn = std::function<void(int epoch, int total_epochs, double loss, double seconds)>;

/// Minibatch training over the online-augmentation stream with an MSE loss on
/// normalized target vectors. Everything is a deterministic function of the
/// seed: visiting order, augmentation draws, and dropout masks.
template <class T>
TrainResult train(Network<T>& net, const TrainingStream& stream, const TrainConfig& cfg,
                  const ProgressFn& progress = nullptr) {
    TrainResult result;
    if (cfg.epochs <= 0) return result;
    if (stream.size() == 0) throw InsufficientDataError("train: empty stream");

    const int res = stream.sample(0, 0).patch.resolution;
    const int dim = stream.target_dim();
    const int batch = std::max(1, cfg.batch_size);

    AdamState<T> adam;
    adam.cfg = cfg.adam;
    adam.init(net.parameters());

    Rng dropout_rng(mix_seed(cfg.seed, 0x64726f70ull));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<std::size_t> order = stream.epoch_order(epoch);
        net.set_mode(Mode::Train);

        double sq_error_sum = 0.0;
        std::size_t value_count = 0;

        for (std::size_t start = 0; start < order.size(); start += batch) {
            const int b = static_cast<int>(std::min<std::size_t>(batch, order.size() - start));
            Tensor<T> x({b, 1, res, res});
            Tensor<T> target({b, dim});
            for (int s = 0; s < b; ++s) {
                const TrainingSample sample = stream.sample(epoch, order[start + s]);
                if (sample.patch.resolution != res || static_cast<int>(sample.target.size()) != dim)
                    throw ShapeError("train: inconsistent sample shapes in stream");
                T* xrow = x.data() + static_cast<std::size_t>(s) * res * res;
                for (std::size_t i = 0; i < sample.patch.values.size(); ++i)
                    xrow[i] = static_cast<T>(sample.patch.values[i]);
                T* trow = target.data() + static_cast<std::size_t>(s) * dim;
                for (int i = 0; i < dim; ++i) trow[i] = static_cast<T>(sample.target[i]);
            }

            const Tensor<T> pred = net.forward(x, &dropout_rng);

            Tensor<T> grad(pred.shape);
            double batch_sq = 0.0;
            const double inv_n = 1.0 / static_cast<double>(pred.size());
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double diff =
                    static_cast<double>(pred.values[i]) - static_cast<double>(target.values[i]);
                batch_sq += diff * diff;
                grad.values[i] = static_cast<T>(2.0 * diff * inv_n);
            }
            if (!std::isfinite(batch_sq))
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch));
            sq_error_sum += batch_sq;
            value_count += pred.size();

            net.zero_grads();
            net.backward(grad);
            adam_step(net.parameters(), adam);
        }

        const double loss = sq_error_sum / static_cast<double>(value_count);
        if (!std::isfinite(loss))
            throw TrainingError("train: non-finite epoch loss at epoch " + std::to_string(epoch));
        result.epoch_loss.push_back(loss);
        if (progress) {
            const double sec =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            progress(epoch + 1, cfg.epochs, loss, sec);
        }
    }
    net.set_mode(Mode::Eval);
    return result;
}

}  // namespace handpose::nn
