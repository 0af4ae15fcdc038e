#pragma once

#include <cstdint>
#include <vector>

#include "handpose/augmentation.hpp"
#include "handpose/geometry.hpp"

namespace handpose {

/// Linear pose prior: mean plus top-k principal components of normalized
/// 3J-dim pose vectors. Component rows are orthonormal and ordered by
/// descending eigenvalue; the largest-magnitude entry of each row is positive
/// so fits are comparable across runs.
struct PcaPrior {
    std::vector<double> mean;         // length 3J
    std::vector<double> components;   // row-major k x 3J
    std::vector<double> eigenvalues;  // length k, non-increasing

    int dim() const { return static_cast<int>(mean.size()); }
    int k() const { return static_cast<int>(eigenvalues.size()); }
};

/// Streaming first/second-moment accumulator, so million-sample fits never
/// materialize the sample matrix.
class CovarianceAccumulator {
public:
    explicit CovarianceAccumulator(int dim);
    void add(const std::vector<double>& v);
    std::size_t count() const { return n_; }
    int dim() const { return dim_; }
    std::vector<double> mean() const;
    /// Sample covariance (divisor n-1), row-major dim x dim.
    std::vector<double> covariance() const;

private:
    int dim_;
    std::size_t n_ = 0;
    std::vector<double> sum_;
    std::vector<double> outer_;  // sum of v v^T
};

/// PCA over an N x 3J pose matrix. Requires N > k and k <= 3J.
PcaPrior fit_pca(const std::vector<std::vector<double>>& poses, int k);

/// Eigendecomposition path shared by fit_pca and fit_robust_prior.
PcaPrior fit_pca_from_moments(const CovarianceAccumulator& acc, int k);

/// Coefficients of a pose in the prior basis: components * (pose - mean).
std::vector<double> embed(const PcaPrior& prior, const std::vector<double>& pose);

/// mean + components^T * coefficients.
std::vector<double> reconstruct(const PcaPrior& prior, const std::vector<double>& coefficients);

/// Fit the prior on `n_samples` pose-space augmentations of the base poses
/// (rotation/scale/translation about each pose's joint-0 pivot), normalized
/// against a cube of `cube_size` centered on the pivot. Desk-scale runs use
/// 100k samples instead of the full-scale 1M default.
PcaPrior fit_robust_prior(const std::vector<Pose3D>& poses, const AugmentConfig& cfg,
                          std::size_t n_samples = 1000000, int k = 30, double cube_size = 300.0,
                          std::uint64_t seed = 0);

/// Last-layer initialization: weights = components^T (3J x k, row-major),
/// bias = mean. With this layer installed the network output is
/// reconstruct(penultimate activations).
struct OutputLayerInit {
    std::vector<double> weights;  // row-major 3J x k
    std::vector<double> bias;     // 3J
    int dim = 0;
    int k = 0;
};

OutputLayerInit init_output_layer(const PcaPrior& prior);

}  // namespace handpose
