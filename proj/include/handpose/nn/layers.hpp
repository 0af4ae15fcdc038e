#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "handpose/nn/tensor.hpp"
#include "handpose/rng.hpp"

namespace handpose::nn {

enum class Mode { Train, Eval };

template <class T>
struct ParamRef {
    Tensor<T>* value;
    Tensor<T>* grad;
    bool trainable;
};

template <class T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual std::string kind() const = 0;
    /// Runs the layer and caches whatever backward needs.
    virtual Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng* rng) = 0;
    /// Accumulates parameter gradients and returns the input gradient.
    virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
    virtual void collect_params(std::vector<ParamRef<T>>&) {}
    virtual nlohmann::json spec() const = 0;
};

// ---------------------------------------------------------------------------
// Convolution (cross-correlation) with zero padding.
// ---------------------------------------------------------------------------

template <class T>
class Conv2d : public Layer<T> {
public:
    Conv2d(int in_c, int out_c, int ksize, int stride = 1, int pad = 0)
        : in_c_(in_c),
          out_c_(out_c),
          ksize_(ksize),
          stride_(stride),
          pad_(pad),
          weight_({out_c, in_c, ksize, ksize}),
          bias_({out_c}),
          dweight_({out_c, in_c, ksize, ksize}),
          dbias_({out_c}) {
        if (in_c < 1 || out_c < 1 || ksize < 1 || stride < 1 || pad < 0)
            throw ShapeError("conv2d: invalid layer parameters");
    }

    std::string kind() const override { return "conv"; }

    Tensor<T>& weight() { return weight_; }
    Tensor<T>& bias() { return bias_; }
    int in_channels() const { return in_c_; }
    int out_channels() const { return out_c_; }
    int kernel_size() const { return ksize_; }

    static int out_extent(int in, int ksize, int stride, int pad) {
        return (in + 2 * pad - ksize) / stride + 1;
    }

    Tensor<T> forward(const Tensor<T>& x, Mode, Rng*) override {
        if (x.shape.size() != 4 || x.dim(1) != in_c_)
            throw ShapeError("conv2d: expected NCHW input with matching channels");
        input_ = x;
        const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
        const int oh = out_extent(h, ksize_, stride_, pad_);
        const int ow = out_extent(w, ksize_, stride_, pad_);
        if (oh < 1 || ow < 1) throw ShapeError("conv2d: output would be empty");

        Tensor<T> y({n, out_c_, oh, ow});
        const std::size_t k_total = static_cast<std::size_t>(in_c_) * ksize_ * ksize_;
        const std::size_t spatial = static_cast<std::size_t>(oh) * ow;
        col_.assign(k_total * spatial, T{0});

        for (int s = 0; s < n; ++s) {
            im2col(x, s, oh, ow);
            for (int oc = 0; oc < out_c_; ++oc) {
                T* yrow = y.data() + (static_cast<std::size_t>(s) * out_c_ + oc) * spatial;
                std::fill(yrow, yrow + spatial, bias_.values[oc]);
                const T* wrow = weight_.data() + static_cast<std::size_t>(oc) * k_total;
                for (std::size_t k = 0; k < k_total; ++k)
                    axpy(yrow, wrow[k], col_.data() + k * spatial, spatial);
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        const int n = input_.dim(0), h = input_.dim(2), w = input_.dim(3);
        const int oh = grad_out.dim(2), ow = grad_out.dim(3);
        const std::size_t k_total = static_cast<std::size_t>(in_c_) * ksize_ * ksize_;
        const std::size_t spatial = static_cast<std::size_t>(oh) * ow;

        Tensor<T> dx({n, in_c_, h, w});
        dcol_.assign(k_total * spatial, T{0});

        for (int s = 0; s < n; ++s) {
            im2col(input_, s, oh, ow);
            std::fill(dcol_.begin(), dcol_.end(), T{0});
            for (int oc = 0; oc < out_c_; ++oc) {
                const T* grow = grad_out.data() + (static_cast<std::size_t>(s) * out_c_ + oc) * spatial;
                T acc{0};
                for (std::size_t i = 0; i < spatial; ++i) acc += grow[i];
                dbias_.values[oc] += acc;

                T* dwrow = dweight_.data() + static_cast<std::size_t>(oc) * k_total;
                const T* wrow = weight_.data() + static_cast<std::size_t>(oc) * k_total;
                for (std::size_t k = 0; k < k_total; ++k) {
                    dwrow[k] += dot4(grow, col_.data() + k * spatial, spatial);
                    axpy(dcol_.data() + k * spatial, wrow[k], grow, spatial);
                }
            }
            col2im(dx, s, oh, ow);
        }
        return dx;
    }

    void collect_params(std::vector<ParamRef<T>>& out) override {
        out.push_back({&weight_, &dweight_, true});
        out.push_back({&bias_, &dbias_, true});
    }

    nlohmann::json spec() const override {
        return {{"kind", "conv"}, {"in", in_c_},     {"out", out_c_},
                {"ksize", ksize_}, {"stride", stride_}, {"pad", pad_}};
    }

private:
    void im2col(const Tensor<T>& x, int s, int oh, int ow) {
        const int h = x.dim(2), w = x.dim(3);
        const std::size_t spatial = static_cast<std::size_t>(oh) * ow;
        const T* base = x.data() + static_cast<std::size_t>(s) * in_c_ * h * w;
        std::size_t k = 0;
        for (int ic = 0; ic < in_c_; ++ic) {
            const T* plane = base + static_cast<std::size_t>(ic) * h * w;
            for (int ky = 0; ky < ksize_; ++ky) {
                for (int kx = 0; kx < ksize_; ++kx, ++k) {
                    T* row = col_.data() + k * spatial;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride_ - pad_ + ky;
                        T* dst = row + static_cast<std::size_t>(oy) * ow;
                        if (iy < 0 || iy >= h) {
                            std::fill(dst, dst + ow, T{0});
                            continue;
                        }
                        const T* src = plane + static_cast<std::size_t>(iy) * w;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * stride_ - pad_ + kx;
                            dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T{0};
                        }
                    }
                }
            }
        }
    }

    void col2im(Tensor<T>& dx, int s, int oh, int ow) {
        const int h = dx.dim(2), w = dx.dim(3);
        const std::size_t spatial = static_cast<std::size_t>(oh) * ow;
        T* base = dx.data() + static_cast<std::size_t>(s) * in_c_ * h * w;
        std::size_t k = 0;
        for (int ic = 0; ic < in_c_; ++ic) {
            T* plane = base + static_cast<std::size_t>(ic) * h * w;
            for (int ky = 0; ky < ksize_; ++ky) {
                for (int kx = 0; kx < ksize_; ++kx, ++k) {
                    const T* row = dcol_.data() + k * spatial;
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * stride_ - pad_ + ky;
                        if (iy < 0 || iy >= h) continue;
                        T* dst = plane + static_cast<std::size_t>(iy) * w;
                        const T* src = row + static_cast<std::size_t>(oy) * ow;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * stride_ - pad_ + kx;
                            if (ix >= 0 && ix < w) dst[ix] += src[ox];
                        }
                    }
                }
            }
        }
    }

    int in_c_, out_c_, ksize_, stride_, pad_;
    Tensor<T> weight_, bias_, dweight_, dbias_;
    Tensor<T> input_;
    std::vector<T> col_, dcol_;
};

// ---------------------------------------------------------------------------
// Max pooling; inputs not divisible by the pool size are padded with -inf.
// Gradient goes to the argmax, first index on ties.
// ---------------------------------------------------------------------------

template <class T>
class MaxPool2d : public Layer<T> {
public:
    explicit MaxPool2d(int pool) : pool_(pool) {
        if (pool < 1) throw ShapeError("maxpool2d: pool size must be positive");
    }

    std::string kind() const override { return "maxpool"; }

    Tensor<T> forward(const Tensor<T>& x, Mode, Rng*) override {
        if (x.shape.size() != 4) throw ShapeError("maxpool2d: expected NCHW input");
        in_shape_ = x.shape;
        const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
        const int oh = (h + pool_ - 1) / pool_;
        const int ow = (w + pool_ - 1) / pool_;

        Tensor<T> y({n, c, oh, ow});
        argmax_.assign(y.size(), 0);
        std::size_t o = 0;
        for (int s = 0; s < n; ++s) {
            for (int ch = 0; ch < c; ++ch) {
                const T* plane = x.data() + (static_cast<std::size_t>(s) * c + ch) * h * w;
                const std::size_t plane_off = (static_cast<std::size_t>(s) * c + ch) *
                                              static_cast<std::size_t>(h) * w;
                for (int oy = 0; oy < oh; ++oy) {
                    for (int ox = 0; ox < ow; ++ox, ++o) {
                        T best = -std::numeric_limits<T>::infinity();
                        std::size_t best_idx = 0;
                        for (int py = oy * pool_; py < std::min((oy + 1) * pool_, h); ++py) {
                            for (int px = ox * pool_; px < std::min((ox + 1) * pool_, w); ++px) {
                                const T v = plane[static_cast<std::size_t>(py) * w + px];
                                if (v > best) {
                                    best = v;
                                    best_idx = plane_off + static_cast<std::size_t>(py) * w + px;
                                }
                            }
                        }
                        y.values[o] = best;
                        argmax_[o] = best_idx;
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        Tensor<T> dx(in_shape_);
        for (std::size_t i = 0; i < grad_out.size(); ++i) dx.values[argmax_[i]] += grad_out.values[i];
        return dx;
    }

    nlohmann::json spec() const override { return {{"kind", "maxpool"}, {"pool", pool_}}; }

private:
    int pool_;
    std::vector<int> in_shape_;
    std::vector<std::size_t> argmax_;
};

// ---------------------------------------------------------------------------

template <class T>
class ReLU : public Layer<T> {
public:
    std::string kind() const override { return "relu"; }

    Tensor<T> forward(const Tensor<T>& x, Mode, Rng*) override {
        Tensor<T> y = x;
        mask_.assign(x.size(), 0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y.values[i] > T{0}) {
                mask_[i] = 1;
            } else {
                y.values[i] = T{0};
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        Tensor<T> dx = grad_out;
        for (std::size_t i = 0; i < dx.size(); ++i)
            if (!mask_[i]) dx.values[i] = T{0};
        return dx;
    }

    nlohmann::json spec() const override { return {{"kind", "relu"}}; }

private:
    std::vector<std::uint8_t> mask_;
};

// ---------------------------------------------------------------------------
// Inverted dropout: training multiplies kept units by 1/(1-rate); evaluation
// is the identity.
// ---------------------------------------------------------------------------

template <class T>
class Dropout : public Layer<T> {
public:
    explicit Dropout(double rate) : rate_(rate) {
        if (rate < 0.0 || rate >= 1.0) throw ShapeError("dropout: rate must be in [0,1)");
    }

    std::string kind() const override { return "dropout"; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng* rng) override {
        if (mode == Mode::Eval || rate_ == 0.0) {
            active_ = false;
            return x;
        }
        if (rng == nullptr) throw TrainingError("dropout: training forward needs an rng");
        active_ = true;
        const T inv_keep = static_cast<T>(1.0 / (1.0 - rate_));
        mask_.assign(x.size(), T{0});
        Tensor<T> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (rng->uniform() >= rate_) {
                mask_[i] = inv_keep;
                y.values[i] *= inv_keep;
            } else {
                y.values[i] = T{0};
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        if (!active_) return grad_out;
        Tensor<T> dx = grad_out;
        for (std::size_t i = 0; i < dx.size(); ++i) dx.values[i] *= mask_[i];
        return dx;
    }

    nlohmann::json spec() const override { return {{"kind", "dropout"}, {"rate", rate_}}; }

    double rate() const { return rate_; }

private:
    double rate_;
    bool active_ = false;
    std::vector<T> mask_;
};

// ---------------------------------------------------------------------------
// Fully-connected layer. Flattens any input to {N, in}; weights are stored
// {in, out} so both passes stream contiguously.
// ---------------------------------------------------------------------------

template <class T>
class FullyConnected : public Layer<T> {
public:
    FullyConnected(int in, int out)
        : in_(in), out_(out), weight_({in, out}), bias_({out}), dweight_({in, out}), dbias_({out}) {
        if (in < 1 || out < 1) throw ShapeError("fully_connected: invalid sizes");
    }

    std::string kind() const override { return "fullyconnected"; }

    Tensor<T>& weight() { return weight_; }
    Tensor<T>& bias() { return bias_; }
    int in_features() const { return in_; }
    int out_features() const { return out_; }

    Tensor<T> forward(const Tensor<T>& x, Mode, Rng*) override {
        const int n = x.dim(0);
        if (x.size() != static_cast<std::size_t>(n) * in_)
            throw ShapeError("fully_connected: input feature count mismatch");
        input_ = x;

        Tensor<T> y({n, out_});
        for (int s = 0; s < n; ++s) {
            T* yrow = y.data() + static_cast<std::size_t>(s) * out_;
            std::copy(bias_.data(), bias_.data() + out_, yrow);
            const T* xrow = x.data() + static_cast<std::size_t>(s) * in_;
            for (int i = 0; i < in_; ++i)
                axpy(yrow, xrow[i], weight_.data() + static_cast<std::size_t>(i) * out_,
                     static_cast<std::size_t>(out_));
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        const int n = input_.dim(0);
        Tensor<T> dx(input_.shape);
        for (int s = 0; s < n; ++s) {
            const T* grow = grad_out.data() + static_cast<std::size_t>(s) * out_;
            const T* xrow = input_.data() + static_cast<std::size_t>(s) * in_;
            T* dxrow = dx.data() + static_cast<std::size_t>(s) * in_;
            for (int i = 0; i < in_; ++i) {
                axpy(dweight_.data() + static_cast<std::size_t>(i) * out_, xrow[i], grow,
                     static_cast<std::size_t>(out_));
                dxrow[i] = dot4(weight_.data() + static_cast<std::size_t>(i) * out_, grow,
                                static_cast<std::size_t>(out_));
            }
            for (int o = 0; o < out_; ++o) dbias_.values[o] += grow[o];
        }
        return dx;
    }

    void collect_params(std::vector<ParamRef<T>>& out) override {
        out.push_back({&weight_, &dweight_, trainable_});
        out.push_back({&bias_, &dbias_, trainable_});
    }

    nlohmann::json spec() const override {
        return {{"kind", kind()}, {"in", in_}, {"out", out_}, {"trainable", trainable_}};
    }

    void set_trainable(bool t) { trainable_ = t; }
    bool trainable() const { return trainable_; }

protected:
    int in_, out_;
    Tensor<T> weight_, bias_, dweight_, dbias_;
    Tensor<T> input_;
    bool trainable_ = true;
};

/// Final linear layer whose weights/bias come from the pose prior; maps k
/// coefficients to the 3J pose vector. Trainable unless frozen.
template <class T>
class PriorLayer : public FullyConnected<T> {
public:
    PriorLayer(int k, int dim) : FullyConnected<T>(k, dim) {}
    std::string kind() const override { return "priorlayer"; }
};

// ---------------------------------------------------------------------------
// Residual module. Bottleneck form is 1x1 -> 3x3(stride) -> 1x1 with a
// projection shortcut whenever the stride or channel count changes; the basic
// form is 3x3(stride) -> 3x3.
// ---------------------------------------------------------------------------

template <class T>
class ResidualBlock : public Layer<T> {
public:
    ResidualBlock(int in_c, int filters, int stride, bool bottleneck = true)
        : in_c_(in_c), filters_(filters), stride_(stride), bottleneck_(bottleneck) {
        if (bottleneck_) {
            const int width = std::max(1, filters / 4);
            conv1_ = std::make_unique<Conv2d<T>>(in_c, width, 1, 1, 0);
            conv2_ = std::make_unique<Conv2d<T>>(width, width, 3, stride, 1);
            conv3_ = std::make_unique<Conv2d<T>>(width, filters, 1, 1, 0);
        } else {
            conv1_ = std::make_unique<Conv2d<T>>(in_c, filters, 3, stride, 1);
            conv2_ = std::make_unique<Conv2d<T>>(filters, filters, 3, 1, 1);
        }
        if (stride != 1 || in_c != filters)
            proj_ = std::make_unique<Conv2d<T>>(in_c, filters, 1, stride, 0);
    }

    std::string kind() const override { return "residual"; }

    Tensor<T> forward(const Tensor<T>& x, Mode mode, Rng* rng) override {
        Tensor<T> m = relu1_.forward(conv1_->forward(x, mode, rng), mode, rng);
        if (bottleneck_) {
            m = relu2_.forward(conv2_->forward(m, mode, rng), mode, rng);
            m = conv3_->forward(m, mode, rng);
        } else {
            m = conv2_->forward(m, mode, rng);
        }
        const Tensor<T> shortcut = proj_ ? proj_->forward(x, mode, rng) : x;
        if (m.shape != shortcut.shape) throw ShapeError("residual: branch shape mismatch");
        for (std::size_t i = 0; i < m.size(); ++i) m.values[i] += shortcut.values[i];
        return relu_out_.forward(m, mode, rng);
    }

    Tensor<T> backward(const Tensor<T>& grad_out) override {
        const Tensor<T> dsum = relu_out_.backward(grad_out);
        Tensor<T> dmain = dsum;
        if (bottleneck_) {
            dmain = conv3_->backward(dmain);
            dmain = relu2_.backward(dmain);
        }
        dmain = conv2_->backward(dmain);
        dmain = relu1_.backward(dmain);
        dmain = conv1_->backward(dmain);

        if (proj_) {
            const Tensor<T> dshort = proj_->backward(dsum);
            for (std::size_t i = 0; i < dmain.size(); ++i) dmain.values[i] += dshort.values[i];
        } else {
            for (std::size_t i = 0; i < dmain.size(); ++i) dmain.values[i] += dsum.values[i];
        }
        return dmain;
    }

    void collect_params(std::vector<ParamRef<T>>& out) override {
        conv1_->collect_params(out);
        conv2_->collect_params(out);
        if (conv3_) conv3_->collect_params(out);
        if (proj_) proj_->collect_params(out);
    }

    nlohmann::json spec() const override {
        return {{"kind", "residual"},
                {"in", in_c_},
                {"filters", filters_},
                {"stride", stride_},
                {"bottleneck", bottleneck_}};
    }

    Conv2d<T>& conv(int i) {
        Conv2d<T>* c[] = {conv1_.get(), conv2_.get(), conv3_.get(), proj_.get()};
        return *c[i];
    }
    bool has_projection() const { return proj_ != nullptr; }
    bool bottleneck() const { return bottleneck_; }

private:
    int in_c_, filters_, stride_;
    bool bottleneck_;
    std::unique_ptr<Conv2d<T>> conv1_, conv2_, conv3_, proj_;
    ReLU<T> relu1_, relu2_, relu_out_;
};

// ---------------------------------------------------------------------------

template <class T>
std::unique_ptr<Layer<T>> make_layer(const nlohmann::json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "conv")
        return std::make_unique<Conv2d<T>>(spec.at("in").get<int>(), spec.at("out").get<int>(),
                                           spec.at("ksize").get<int>(), spec.at("stride").get<int>(),
                                           spec.at("pad").get<int>());
    if (kind == "maxpool") return std::make_unique<MaxPool2d<T>>(spec.at("pool").get<int>());
    if (kind == "relu") return std::make_unique<ReLU<T>>();
    if (kind == "dropout") return std::make_unique<Dropout<T>>(spec.at("rate").get<double>());
    if (kind == "fullyconnected" || kind == "priorlayer") {
        std::unique_ptr<FullyConnected<T>> fc;
        if (kind == "priorlayer")
            fc = std::make_unique<PriorLayer<T>>(spec.at("in").get<int>(), spec.at("out").get<int>());
        else
            fc = std::make_unique<FullyConnected<T>>(spec.at("in").get<int>(),
                                                     spec.at("out").get<int>());
        fc->set_trainable(spec.value("trainable", true));
        return fc;
    }
    if (kind == "residual")
        return std::make_unique<ResidualBlock<T>>(
            spec.at("in").get<int>(), spec.at("filters").get<int>(), spec.at("stride").get<int>(),
            spec.value("bottleneck", true));
    throw ArchitectureMismatchError("unknown layer kind: " + kind);
}

}  // namespace handpose::nn
