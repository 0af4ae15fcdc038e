#include "handpose/prior.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace handpose {

CovarianceAccumulator::CovarianceAccumulator(int dim)
    : dim_(dim), sum_(dim, 0.0), outer_(static_cast<std::size_t>(dim) * dim, 0.0) {}

void CovarianceAccumulator::add(const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != dim_)
        throw ShapeError("covariance accumulator: dimension mismatch");
    for (int i = 0; i < dim_; ++i) {
        sum_[i] += v[i];
        double* row = &outer_[static_cast<std::size_t>(i) * dim_];
        const double vi = v[i];
        for (int j = 0; j < dim_; ++j) row[j] += vi * v[j];
    }
    ++n_;
}

std::vector<double> CovarianceAccumulator::mean() const {
    std::vector<double> m(sum_);
    for (double& v : m) v /= static_cast<double>(n_);
    return m;
}

std::vector<double> CovarianceAccumulator::covariance() const {
    const double n = static_cast<double>(n_);
    const std::vector<double> m = mean();
    std::vector<double> cov(outer_.size());
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * dim_ + j;
            cov[idx] = (outer_[idx] - n * m[i] * m[j]) / (n - 1.0);
        }
    }
    return cov;
}

PcaPrior fit_pca_from_moments(const CovarianceAccumulator& acc, int k) {
    const int dim = acc.dim();
    if (k > dim) throw ShapeError("fit_pca: k exceeds pose dimension");
    if (acc.count() <= static_cast<std::size_t>(k))
        throw InsufficientDataError("fit_pca: need more samples than components");

    const std::vector<double> cov = acc.covariance();
    Eigen::MatrixXd c(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) c(i, j) = cov[static_cast<std::size_t>(i) * dim + j];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
    if (solver.info() != Eigen::Success) throw InsufficientDataError("fit_pca: eigensolver failed");

    // Eigen returns ascending eigenvalues; take the top k in descending order.
    PcaPrior prior;
    prior.mean = acc.mean();
    prior.eigenvalues.resize(k);
    prior.components.resize(static_cast<std::size_t>(k) * dim);
    for (int comp = 0; comp < k; ++comp) {
        const int src = dim - 1 - comp;
        prior.eigenvalues[comp] = std::max(0.0, solver.eigenvalues()(src));
        double* row = &prior.components[static_cast<std::size_t>(comp) * dim];
        for (int d = 0; d < dim; ++d) row[d] = solver.eigenvectors()(d, src);

        // Deterministic sign: largest-magnitude entry positive, first on ties.
        int arg = 0;
        double best = 0.0;
        for (int d = 0; d < dim; ++d) {
            if (std::abs(row[d]) > best) {
                best = std::abs(row[d]);
                arg = d;
            }
        }
        if (row[arg] < 0.0) {
            for (int d = 0; d < dim; ++d) row[d] = -row[d];
        }
    }
    return prior;
}

PcaPrior fit_pca(const std::vector<std::vector<double>>& poses, int k) {
    if (poses.empty()) throw InsufficientDataError("fit_pca: empty pose set");
    CovarianceAccumulator acc(static_cast<int>(poses.front().size()));
    for (const auto& p : poses) acc.add(p);
    return fit_pca_from_moments(acc, k);
}

std::vector<double> embed(const PcaPrior& prior, const std::vector<double>& pose) {
    const int dim = prior.dim();
    if (static_cast<int>(pose.size()) != dim) throw ShapeError("embed: pose dimension mismatch");
    std::vector<double> coeff(prior.k(), 0.0);
    for (int c = 0; c < prior.k(); ++c) {
        const double* row = &prior.components[static_cast<std::size_t>(c) * dim];
        double acc = 0.0;
        for (int d = 0; d < dim; ++d) acc += row[d] * (pose[d] - prior.mean[d]);
        coeff[c] = acc;
    }
    return coeff;
}

std::vector<double> reconstruct(const PcaPrior& prior, const std::vector<double>& coefficients) {
    if (static_cast<int>(coefficients.size()) != prior.k())
        throw ShapeError("reconstruct: coefficient count mismatch");
    const int dim = prior.dim();
    std::vector<double> pose(prior.mean);
    for (int c = 0; c < prior.k(); ++c) {
        const double* row = &prior.components[static_cast<std::size_t>(c) * dim];
        const double w = coefficients[c];
        for (int d = 0; d < dim; ++d) pose[d] += w * row[d];
    }
    return pose;
}

PcaPrior fit_robust_prior(const std::vector<Pose3D>& poses, const AugmentConfig& cfg,
                          std::size_t n_samples, int k, double cube_size, std::uint64_t seed) {
    if (poses.empty()) throw InsufficientDataError("fit_robust_prior: empty pose set");
    const int dim = static_cast<int>(poses.front().joint_count()) * 3;

    CovarianceAccumulator acc(dim);
    Rng rng(seed);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Pose3D& base = poses[rng.below(poses.size())];
        const AugmentParams params = sample_params(cfg, rng);
        const Vec3 pivot = base.joints[0];
        const Pose3D augmented = augment_pose(base, params, pivot);
        acc.add(normalize_joints(augmented, CropCube{pivot, cube_size}));
    }
    return fit_pca_from_moments(acc, k);
}

OutputLayerInit init_output_layer(const PcaPrior& prior) {
    OutputLayerInit init;
    init.dim = prior.dim();
    init.k = prior.k();
    init.bias = prior.mean;
    init.weights.resize(static_cast<std::size_t>(init.dim) * init.k);
    for (int d = 0; d < init.dim; ++d)
        for (int c = 0; c < init.k; ++c)
            init.weights[static_cast<std::size_t>(d) * init.k + c] =
                prior.components[static_cast<std::size_t>(c) * init.dim + d];
    return init;
}

}  // namespace handpose
