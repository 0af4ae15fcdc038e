#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "handpose/common.hpp"

namespace handpose::nn {

/// Dense row-major tensor. Scalar type is float for training speed or double
/// for gradient checking.
template <class T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> values;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        values.assign(count(shape), T{0});
    }
    Tensor(std::vector<int> s, std::vector<T> v) : shape(std::move(s)), values(std::move(v)) {
        if (values.size() != count(shape)) throw ShapeError("tensor: shape/value count mismatch");
    }

    static std::size_t count(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) n *= static_cast<std::size_t>(d);
        return n;
    }

    std::size_t size() const { return values.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    T* data() { return values.data(); }
    const T* data() const { return values.data(); }

    void fill(T v) { std::fill(values.begin(), values.end(), v); }

    bool all_finite() const {
        for (const T& v : values)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

// y[i] += a * x[i]; vectorizes without reassociation.
template <class T>
inline void axpy(T* y, T a, const T* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Dot product with four independent accumulators. Order is fixed, so results
// are bit-stable run to run.
template <class T>
inline T dot4(const T* a, const T* b, std::size_t n) {
    T s0{0}, s1{0}, s2{0}, s3{0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3));
}

}  // namespace handpose::nn
