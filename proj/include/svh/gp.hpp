#pragma once

#include <atomic>
#include <memory>
#include <utility>
#include <vector>

#include "svh/linalg.hpp"
#include "svh/problem.hpp"

namespace svh {

struct GpHyperparams {
    double lengthscale = 0.5;
    double signal_variance = 1.0;
    double noise_variance = 1e-4;
};

// Exact GP regression with an isotropic squared-exponential kernel. Inputs
// are expected in [0,1]^n; targets are standardized internally (stored
// mean/std de-standardize predictions). Once built, the object is immutable
// and safe to share across threads.
class GaussianProcess {
public:
    // Factorize with the given hyperparameters. Escalates jitter
    // 1e-8 -> 1e-6 -> 1e-4 on Cholesky failure, then raises NumericalError.
    static GaussianProcess build(Matrix x_train, Vec y_train, GpHyperparams hp);

    // Multi-start gradient ascent on the log marginal likelihood
    // (log-parameterized, 64 steps, step 0.05 with backtracking halving).
    // Duplicate input rows are dropped keeping the last occurrence; at least
    // two distinct points are required.
    static GaussianProcess fit(const Matrix& x_train, const Vec& y_train);

    // De-standardized posterior mean and std at a normalized input. The
    // standardized std is clamped from below at 1e-6.
    std::pair<double, double> posterior(const Vec& x) const;

    // Gradients of the de-standardized posterior mean/std w.r.t. the
    // normalized input. When the std sits at its clamp floor its gradient is
    // reported as zero and a diagnostics counter is bumped.
    void posterior_grad(const Vec& x, Vec& dmean_dx, Vec& dstd_dx) const;

    // Fused path used by the surrogate bundle: mean, std and (optionally)
    // their gradients in one pass over the training set.
    void predict(const Vec& x, double& mean, double& sd, Vec* dmean_dx, Vec* dstd_dx) const;

    double log_marginal_likelihood() const noexcept { return lml_; }
    const GpHyperparams& hyperparams() const noexcept { return hp_; }
    double y_mean() const noexcept { return y_mean_; }
    double y_std() const noexcept { return y_std_; }
    double applied_jitter() const noexcept { return jitter_; }
    std::size_t n_train() const noexcept { return x_.rows(); }
    std::size_t n_dim() const noexcept { return x_.cols(); }
    const Matrix& chol_factor() const noexcept { return chol_; }
    const Vec& alpha_vec() const noexcept { return alpha_; }
    long std_clamp_events() const { return clamp_events_->load(); }

    static constexpr double kVarianceFloor = 1e-12;
    static constexpr double kStdFloor = 1e-6;

private:
    GaussianProcess() = default;

    Matrix x_;
    Vec y_standardized_;
    GpHyperparams hp_;
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    double jitter_ = 0.0;
    double lml_ = 0.0;
    Matrix chol_;
    Vec alpha_;
    std::shared_ptr<std::atomic<long>> clamp_events_ = std::make_shared<std::atomic<long>>(0);
};

// Affine map between a problem box and the unit cube.
struct BoxNormalizer {
    Vec lower;
    Vec scale;  // upper - lower

    static BoxNormalizer for_problem(const Problem& p);
    Vec to_unit(const Vec& x) const;
    Vec from_unit(const Vec& u) const;
};

// One GP per objective over a shared archive, combined through the lower
// confidence bound f_hat = mean - lambda * std.
class SurrogateBundle {
public:
    static SurrogateBundle fit(const Problem& problem, const std::vector<Vec>& xs,
                               const std::vector<Vec>& ys, double lcb_lambda);

    int n_obj() const noexcept { return static_cast<int>(gps_.size()); }
    double lambda() const noexcept { return lambda_; }
    const GaussianProcess& gp(int j) const { return gps_[j]; }
    const BoxNormalizer& normalizer() const noexcept { return norm_; }

    // LCB value (and gradient w.r.t. the original decision coordinates) of
    // one objective at a problem-box point.
    double lcb(const Vec& x, int objective_index, Vec* grad = nullptr) const;

    // All objectives at a unit-cube point; gradients w.r.t. unit coordinates
    // fill the rows of dfdu (n_obj x n) when given.
    void lcb_all_unit(const Vec& u, Vec& f_out, Matrix* dfdu) const;

private:
    std::vector<GaussianProcess> gps_;
    double lambda_ = 2.0;
    BoxNormalizer norm_;
};

} // namespace svh
