#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "handpose/config.hpp"
#include "handpose/datagen/hand_model.hpp"
#include "handpose/prior.hpp"
#include "jacobi_oracle.hpp"

using namespace handpose;

namespace {

// Correlated samples with geometric spectrum so eigenvalue gaps are clean.
std::vector<std::vector<double>> correlated_samples(int n, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> dirs(dim, std::vector<double>(dim));
    for (auto& d : dirs)
        for (auto& v : d) v = rng.normal();
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(dim, 0.0);
        for (int m = 0; m < dim; ++m) {
            const double coeff = rng.normal() * std::pow(0.82, m) + (m == 0 ? 0.3 : 0.0);
            for (int d = 0; d < dim; ++d) row[d] += coeff * dirs[m][d];
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double reconstruction_error(const PcaPrior& prior, const std::vector<double>& pose) {
    const std::vector<double> rec = reconstruct(prior, embed(prior, pose));
    double acc = 0.0;
    for (std::size_t i = 0; i < pose.size(); ++i) acc += (rec[i] - pose[i]) * (rec[i] - pose[i]);
    return std::sqrt(acc);
}

std::vector<Pose3D> synthetic_hand_poses(int n, std::uint64_t seed) {
    using namespace handpose::datagen;
    const HandModel model = make_hand_model(99, 0);
    PoseLimits limits;
    limits.yaw_range_deg = 0.0;  // no in-plane rotation in the base set
    Rng rng(seed);
    std::vector<Pose3D> poses;
    for (int i = 0; i < n; ++i) {
        const JointAngles angles = sample_joint_angles(limits, rng);
        poses.push_back(forward_kinematics(model, angles, {0.0, 40.0, 700.0}));
    }
    return poses;
}

}  // namespace

TEST_CASE("poses in an exact 2-dim affine subspace reconstruct perfectly with k=2") {
    const int dim = 15;
    Rng rng(1);
    std::vector<double> mean(dim), u(dim), w(dim);
    for (int i = 0; i < dim; ++i) {
        mean[i] = rng.normal();
        u[i] = rng.normal();
        w[i] = rng.normal();
    }
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 60; ++i) {
        const double a = rng.normal(0.0, 2.0);
        const double b = rng.normal(0.0, 0.7);
        std::vector<double> row(dim);
        for (int d = 0; d < dim; ++d) row[d] = mean[d] + a * u[d] + b * w[d];
        rows.push_back(std::move(row));
    }
    const PcaPrior prior = fit_pca(rows, 2);
    for (const auto& row : rows) CHECK(reconstruction_error(prior, row) <= 1e-9);
}

TEST_CASE("fit_pca matches the brute-force Jacobi oracle") {
    const int dim = 15;
    const auto rows = correlated_samples(200, dim, 7);
    const PcaPrior prior = fit_pca(rows, dim);

    std::vector<double> oracle_mean;
    const auto cov = oracle::brute_force_covariance(rows, &oracle_mean);
    const auto eig = oracle::jacobi_eigen_sym(cov, dim);

    for (int d = 0; d < dim; ++d) CHECK(prior.mean[d] == doctest::Approx(oracle_mean[d]).epsilon(1e-10));
    for (int c = 0; c < dim; ++c) {
        CHECK(std::abs(prior.eigenvalues[c] - eig.eigenvalues[c]) <=
              1e-8 * std::max(1.0, std::abs(eig.eigenvalues[c])));
        for (int d = 0; d < dim; ++d)
            CHECK(std::abs(prior.components[static_cast<std::size_t>(c) * dim + d] -
                           eig.vectors[static_cast<std::size_t>(c) * dim + d]) <= 1e-8);
    }
}

TEST_CASE("default prior dimensionality is 30") { CHECK(RunConfig{}.pca_k == 30); }

TEST_CASE("embed and reconstruct identities") {
    const auto rows = correlated_samples(120, 12, 3);
    const PcaPrior prior = fit_pca(rows, 8);

    const std::vector<double> zero = embed(prior, prior.mean);
    for (const double z : zero) CHECK(std::abs(z) <= 1e-12);

    for (int i = 0; i < prior.k(); ++i) {
        std::vector<double> shifted = prior.mean;
        for (int d = 0; d < prior.dim(); ++d)
            shifted[d] += prior.components[static_cast<std::size_t>(i) * prior.dim() + d];
        const std::vector<double> e = embed(prior, shifted);
        for (int j = 0; j < prior.k(); ++j)
            CHECK(e[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> coeff(prior.k());
        for (auto& c : coeff) c = rng.normal();
        const std::vector<double> back = embed(prior, reconstruct(prior, coeff));
        for (int j = 0; j < prior.k(); ++j) CHECK(std::abs(back[j] - coeff[j]) <= 1e-10);
    }

    const std::vector<double> mean_pose = reconstruct(prior, std::vector<double>(prior.k(), 0.0));
    for (int d = 0; d < prior.dim(); ++d) CHECK(mean_pose[d] == doctest::Approx(prior.mean[d]));

    CHECK_THROWS_AS(embed(prior, std::vector<double>(5, 0.0)), ShapeError);
    CHECK_THROWS_AS(reconstruct(prior, std::vector<double>(prior.k() + 1, 0.0)), ShapeError);
}

TEST_CASE("reconstruction error is non-increasing in k") {
    const int dim = 21;
    const auto rows = correlated_samples(150, dim, 11);
    double prev = 1e300;
    for (int k = 1; k <= dim; ++k) {
        const PcaPrior prior = fit_pca(rows, k);
        double total = 0.0;
        for (const auto& r : rows) total += reconstruction_error(prior, r);
        CHECK(total <= prev + 1e-9);
        prev = total;
    }
    CHECK(prev <= 1e-6);  // full rank reconstructs exactly
}

TEST_CASE("fit_pca input validation") {
    const auto rows = correlated_samples(10, 12, 2);
    CHECK_THROWS_AS(fit_pca(rows, 10), InsufficientDataError);  // N <= k
    CHECK_THROWS_AS(fit_pca(rows, 13), ShapeError);             // k > dim
    CHECK_THROWS_AS(fit_pca({}, 2), InsufficientDataError);
}

TEST_CASE("component rows are orthonormal and capture bounded variance") {
    const int dim = 18;
    const auto rows = correlated_samples(160, dim, 13);
    const PcaPrior prior = fit_pca(rows, 10);

    for (int a = 0; a < prior.k(); ++a) {
        for (int b = 0; b < prior.k(); ++b) {
            double dot = 0.0;
            for (int d = 0; d < dim; ++d)
                dot += prior.components[static_cast<std::size_t>(a) * dim + d] *
                       prior.components[static_cast<std::size_t>(b) * dim + d];
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-10);
        }
    }

    const auto cov = oracle::brute_force_covariance(rows);
    double trace = 0.0;
    for (int d = 0; d < dim; ++d) trace += cov[static_cast<std::size_t>(d) * dim + d];
    double captured = 0.0;
    for (const double ev : prior.eigenvalues) {
        CHECK(ev >= 0.0);
        captured += ev;
    }
    CHECK(captured <= trace + 1e-9);
    for (int c = 1; c < prior.k(); ++c) CHECK(prior.eigenvalues[c] <= prior.eigenvalues[c - 1] + 1e-12);
}

TEST_CASE("fit_pca is invariant to row permutation and covariant to translation") {
    const int dim = 12;
    auto rows = correlated_samples(80, dim, 17);
    const PcaPrior base = fit_pca(rows, 6);

    auto shuffled = rows;
    Rng rng(23);
    rng.shuffle(shuffled);
    const PcaPrior permuted = fit_pca(shuffled, 6);
    for (std::size_t i = 0; i < base.components.size(); ++i)
        CHECK(std::abs(base.components[i] - permuted.components[i]) <= 1e-9);

    std::vector<double> shift(dim);
    for (auto& s : shift) s = rng.normal();
    auto translated = rows;
    for (auto& r : translated)
        for (int d = 0; d < dim; ++d) r[d] += shift[d];
    const PcaPrior moved = fit_pca(translated, 6);
    for (int d = 0; d < dim; ++d)
        CHECK(moved.mean[d] == doctest::Approx(base.mean[d] + shift[d]).epsilon(1e-9));
    for (std::size_t i = 0; i < base.components.size(); ++i)
        CHECK(std::abs(base.components[i] - moved.components[i]) <= 1e-9);
}

TEST_CASE("robust prior without augmentation approximates the plain fit") {
    const auto poses = synthetic_hand_poses(60, 31);
    const double cube = 300.0;

    std::vector<std::vector<double>> rows;
    for (const auto& p : poses)
        rows.push_back(normalize_joints(p, CropCube{p.joints[0], cube}));
    const PcaPrior exact = fit_pca(rows, 6);

    AugmentConfig off;
    off.enable_rotation = off.enable_scale = off.enable_translation = false;
    const PcaPrior sampled = fit_robust_prior(poses, off, 60000, 6, cube, 77);

    // Same data distribution, so the leading subspace must align closely.
    double total_exact = 0.0, total_sampled = 0.0;
    for (const auto& r : rows) {
        total_exact += reconstruction_error(exact, r);
        total_sampled += reconstruction_error(sampled, r);
    }
    CHECK(total_sampled <= total_exact * 1.05 + 1e-6);
}

TEST_CASE("rotation-augmented prior generalizes to rotated poses") {
    const auto poses = synthetic_hand_poses(80, 47);
    const double cube = 300.0;
    const int k = 10;

    std::vector<std::vector<double>> rows;
    for (const auto& p : poses)
        rows.push_back(normalize_joints(p, CropCube{p.joints[0], cube}));
    const PcaPrior plain = fit_pca(rows, k);

    AugmentConfig rot_only;
    rot_only.enable_rotation = true;
    rot_only.enable_scale = false;
    rot_only.enable_translation = false;
    const PcaPrior robust = fit_robust_prior(poses, rot_only, 50000, k, cube, 7);

    // Held-out pose rotated 90 degrees, which the base set never contains.
    AugmentParams quarter;
    quarter.angle_deg = 90.0;
    const Pose3D rotated = augment_pose(poses[0], quarter, poses[0].joints[0]);
    const std::vector<double> target = normalize_joints(rotated, CropCube{rotated.joints[0], cube});

    CHECK(reconstruction_error(robust, target) < reconstruction_error(plain, target));
}

TEST_CASE("robust prior rejects empty input") {
    AugmentConfig cfg;
    CHECK_THROWS_AS(fit_robust_prior({}, cfg, 100, 2, 300.0, 1), InsufficientDataError);
}

TEST_CASE("init_output_layer reproduces the prior maps") {
    const auto rows = correlated_samples(90, 9, 53);
    const PcaPrior prior = fit_pca(rows, 4);
    const OutputLayerInit init = init_output_layer(prior);
    CHECK(init.dim == 9);
    CHECK(init.k == 4);

    // Zero activations -> bias = mean pose.
    for (int d = 0; d < init.dim; ++d) CHECK(init.bias[d] == doctest::Approx(prior.mean[d]));

    // Activation e_i -> mean + component_i.
    for (int i = 0; i < init.k; ++i) {
        for (int d = 0; d < init.dim; ++d) {
            const double w = init.weights[static_cast<std::size_t>(d) * init.k + i];
            CHECK(w == doctest::Approx(prior.components[static_cast<std::size_t>(i) * init.dim + d]));
        }
    }
}
