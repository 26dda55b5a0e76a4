#include "svh/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svh/error.hpp"
#include "svh/kernels.hpp"

namespace svh {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

constexpr double kEllLo = 1e-2, kEllHi = 10.0;
constexpr double kSigLo = 1e-3, kSigHi = 10.0;
constexpr double kNoiseLo = 1e-6, kNoiseHi = 1e-1;

const double kJitterLadder[] = {0.0, 1e-8, 1e-6, 1e-4};

// Pairwise squared distances of the rows of X (symmetric, zero diagonal).
Matrix pairwise_sqdist(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = kernels::sqdist(x.row(i), x.row(j), x.cols());
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

// K = sig * exp(-D / (2 l^2)) + diag_add * I
Matrix assemble_kernel(const Matrix& sqd, double ell, double sig, double diag_add) {
    const std::size_t n = sqd.rows();
    Matrix k(n, n);
    const double coeff = -0.5 / (ell * ell);
    kernels::exp_scale(k.data(), sqd.data(), coeff, sig, n * n);
    for (std::size_t i = 0; i < n; ++i) k(i, i) += diag_add;
    return k;
}

struct LmlEval {
    bool ok = false;
    double lml = -std::numeric_limits<double>::infinity();
    Matrix chol;
    Vec alpha;
};

LmlEval eval_lml(const Matrix& sqd, const Vec& y, double ell, double sig, double noise) {
    LmlEval out;
    out.chol = assemble_kernel(sqd, ell, sig, noise);
    if (!linalg::cholesky(out.chol)) return out;
    out.alpha = linalg::solve_cholesky(out.chol, y);
    const std::size_t n = y.size();
    out.lml = -0.5 * kernels::dot(y.data(), out.alpha.data(), n) -
              linalg::log_diag_sum(out.chol) - 0.5 * static_cast<double>(n) * kLog2Pi;
    out.ok = std::isfinite(out.lml);
    return out;
}

// d LML / d(log ell, log sig, log noise) at the current factorization.
void lml_gradient(const Matrix& sqd, const LmlEval& at, double ell, double sig, double noise,
                  double grad[3]) {
    const std::size_t n = sqd.rows();
    const Matrix kinv = linalg::cholesky_inverse(at.chol);
    const Matrix e = assemble_kernel(sqd, ell, sig, 0.0);  // sig * exp(...)

    // tr((alpha alpha^T - K^{-1}) dK) terms, all elementwise against E.
    double g_ell = 0.0, g_sig = 0.0, g_noise = 0.0;
    const double inv_ell2 = 1.0 / (ell * ell);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = at.alpha[i] * at.alpha[j] - kinv(i, j);
            const double eij = e(i, j);
            g_sig += w * eij;                               // dK/dlog sig = E
            g_ell += w * eij * sqd(i, j) * inv_ell2;        // dK/dlog ell = E .* D / l^2
            if (i == j) g_noise += w * noise;               // dK/dlog noise = noise I
        }
    }
    grad[0] = 0.5 * g_ell;
    grad[1] = 0.5 * g_sig;
    grad[2] = 0.5 * g_noise;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 1.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        return 0.5 * (v[mid - 1] + hi);
    }
    return hi;
}

} // namespace

GaussianProcess GaussianProcess::build(Matrix x_train, Vec y_train, GpHyperparams hp) {
    if (x_train.rows() < 1 || x_train.rows() != y_train.size())
        throw ArgumentError("GaussianProcess::build: inconsistent training data");

    GaussianProcess gp;
    gp.x_ = std::move(x_train);
    gp.hp_ = hp;

    const std::size_t n = y_train.size();
    double mean = kernels::sum(y_train.data(), n) / static_cast<double>(n);
    double var = 0.0;
    for (double v : y_train) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    gp.y_mean_ = mean;
    gp.y_std_ = var > 1e-24 ? std::sqrt(var) : 1.0;  // degenerate targets keep std 1

    gp.y_standardized_.resize(n);
    for (std::size_t i = 0; i < n; ++i) gp.y_standardized_[i] = (y_train[i] - mean) / gp.y_std_;

    const Matrix sqd = pairwise_sqdist(gp.x_);
    for (double jitter : kJitterLadder) {
        LmlEval ev = eval_lml(sqd, gp.y_standardized_, hp.lengthscale, hp.signal_variance,
                              hp.noise_variance + jitter);
        if (ev.ok) {
            gp.chol_ = std::move(ev.chol);
            gp.alpha_ = std::move(ev.alpha);
            gp.lml_ = ev.lml;
            gp.jitter_ = jitter;
            return gp;
        }
    }
    throw NumericalError("GP factorization failed after jitter escalation to 1e-4");
}

GaussianProcess GaussianProcess::fit(const Matrix& x_train, const Vec& y_train) {
    if (x_train.rows() != y_train.size())
        throw ArgumentError("GaussianProcess::fit: inconsistent training data");

    // Deduplicate identical rows, keeping the last occurrence.
    const std::size_t n_all = x_train.rows();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n_all; ++i) {
        bool repeated_later = false;
        for (std::size_t j = i + 1; j < n_all && !repeated_later; ++j) {
            repeated_later = std::equal(x_train.row(i), x_train.row(i) + x_train.cols(),
                                        x_train.row(j));
        }
        if (!repeated_later) keep.push_back(i);
    }
    if (keep.size() < 2)
        throw ArgumentError("GaussianProcess::fit needs at least 2 distinct points");

    Matrix x(keep.size(), x_train.cols());
    Vec y(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        std::copy(x_train.row(keep[r]), x_train.row(keep[r]) + x_train.cols(), x.row(r));
        y[r] = y_train[keep[r]];
    }

    const std::size_t n = y.size();
    double mean = kernels::sum(y.data(), n) / static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double y_std = var > 1e-24 ? std::sqrt(var) : 1.0;
    Vec ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = (y[i] - mean) / y_std;

    const Matrix sqd = pairwise_sqdist(x);

    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dists.push_back(std::sqrt(sqd(i, j)));
    const double ell_med = std::clamp(median_of(std::move(dists)), kEllLo, kEllHi);

    const GpHyperparams starts[4] = {
        {ell_med, 1.0, 1e-2},
        {0.1, 1.0, 1e-4},
        {1.0, 0.5, 1e-3},
        {std::clamp(3.0 * ell_med, kEllLo, kEllHi), 2.0, 1e-6},
    };

    constexpr int kSteps = 64;
    constexpr double kStep = 0.05;

    double best_lml = -std::numeric_limits<double>::infinity();
    GpHyperparams best = starts[0];

    for (const auto& start : starts) {
        double p[3] = {std::log(start.lengthscale), std::log(start.signal_variance),
                       std::log(start.noise_variance)};
        const double lo[3] = {std::log(kEllLo), std::log(kSigLo), std::log(kNoiseLo)};
        const double hi[3] = {std::log(kEllHi), std::log(kSigHi), std::log(kNoiseHi)};

        LmlEval cur = eval_lml(sqd, ys, std::exp(p[0]), std::exp(p[1]), std::exp(p[2]));
        if (!cur.ok) continue;

        for (int step = 0; step < kSteps; ++step) {
            double grad[3];
            lml_gradient(sqd, cur, std::exp(p[0]), std::exp(p[1]), std::exp(p[2]), grad);
            const double gmax = std::max({std::fabs(grad[0]), std::fabs(grad[1]),
                                          std::fabs(grad[2])});
            if (!std::isfinite(gmax) || gmax < 1e-10) break;

            double scale = kStep;
            bool accepted = false;
            for (int bt = 0; bt < 40 && !accepted; ++bt, scale *= 0.5) {
                double cand[3];
                for (int k = 0; k < 3; ++k)
                    cand[k] = std::clamp(p[k] + scale * grad[k], lo[k], hi[k]);
                LmlEval trial = eval_lml(sqd, ys, std::exp(cand[0]), std::exp(cand[1]),
                                         std::exp(cand[2]));
                if (trial.ok && trial.lml > cur.lml) {
                    cur = std::move(trial);
                    for (int k = 0; k < 3; ++k) p[k] = cand[k];
                    accepted = true;
                }
            }
            if (!accepted) break;
        }

        if (cur.lml > best_lml) {
            best_lml = cur.lml;
            best = {std::exp(p[0]), std::exp(p[1]), std::exp(p[2])};
        }
    }

    if (!std::isfinite(best_lml))
        throw NumericalError("GP hyperparameter fit: every start failed to factorize");
    return build(std::move(x), std::move(y), best);
}

void GaussianProcess::predict(const Vec& x, double& mean, double& sd, Vec* dmean_dx,
                              Vec* dstd_dx) const {
    const std::size_t n = x_.rows();
    const std::size_t d = x_.cols();

    Vec sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = kernels::sqdist(x_.row(i), x.data(), d);
    Vec k(n);
    kernels::exp_scale(k.data(), sq.data(), -0.5 / (hp_.lengthscale * hp_.lengthscale),
                       hp_.signal_variance, n);

    const double mean_std = kernels::dot(k.data(), alpha_.data(), n);
    mean = mean_std * y_std_ + y_mean_;

    const Vec v = linalg::solve_lower(chol_, k);
    double var = hp_.signal_variance - kernels::dot(v.data(), v.data(), n);
    var = std::max(var, kVarianceFloor);
    double sd_std = std::sqrt(var);
    const bool clamped = sd_std <= kStdFloor;
    sd_std = std::max(sd_std, kStdFloor);
    sd = sd_std * y_std_;

    if (!dmean_dx && !dstd_dx) return;

    // dk_i/dx = k_i * (x_i - x) / l^2
    const double inv_ell2 = 1.0 / (hp_.lengthscale * hp_.lengthscale);
    if (dmean_dx) {
        dmean_dx->assign(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = alpha_[i] * k[i] * inv_ell2 * y_std_;
            const double* xi = x_.row(i);
            for (std::size_t c = 0; c < d; ++c) (*dmean_dx)[c] += w * (xi[c] - x[c]);
        }
    }
    if (dstd_dx) {
        dstd_dx->assign(d, 0.0);
        if (clamped) {
            (*clamp_events_)++;
            return;
        }
        // dvar/dx = -2 (dk/dx)^T K^{-1} k ; dstd = dvar / (2 std)
        const Vec w = linalg::solve_lower_transposed(chol_, v);  // K^{-1} k
        const double factor = -inv_ell2 / sd_std * y_std_;
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = factor * w[i] * k[i];
            const double* xi = x_.row(i);
            for (std::size_t c = 0; c < d; ++c) (*dstd_dx)[c] += wi * (xi[c] - x[c]);
        }
    }
}

std::pair<double, double> GaussianProcess::posterior(const Vec& x) const {
    double mean, sd;
    predict(x, mean, sd, nullptr, nullptr);
    return {mean, sd};
}

void GaussianProcess::posterior_grad(const Vec& x, Vec& dmean_dx, Vec& dstd_dx) const {
    double mean, sd;
    predict(x, mean, sd, &dmean_dx, &dstd_dx);
}

BoxNormalizer BoxNormalizer::for_problem(const Problem& p) {
    BoxNormalizer n;
    n.lower = p.lower;
    n.scale.resize(p.lower.size());
    for (std::size_t i = 0; i < p.lower.size(); ++i) n.scale[i] = p.upper[i] - p.lower[i];
    return n;
}

Vec BoxNormalizer::to_unit(const Vec& x) const {
    Vec u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - lower[i]) / scale[i];
    return u;
}

Vec BoxNormalizer::from_unit(const Vec& u) const {
    Vec x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = lower[i] + scale[i] * u[i];
    return x;
}

SurrogateBundle SurrogateBundle::fit(const Problem& problem, const std::vector<Vec>& xs,
                                     const std::vector<Vec>& ys, double lcb_lambda) {
    if (xs.size() != ys.size() || xs.empty())
        throw ArgumentError("SurrogateBundle::fit: inconsistent archive");
    if (lcb_lambda < 0.0) throw ArgumentError("lcb lambda must be non-negative");

    SurrogateBundle b;
    b.lambda_ = lcb_lambda;
    b.norm_ = BoxNormalizer::for_problem(problem);

    Matrix x_unit(xs.size(), problem.n_var);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Vec u = b.norm_.to_unit(xs[i]);
        std::copy(u.begin(), u.end(), x_unit.row(i));
    }

    b.gps_.reserve(problem.n_obj);
    for (int j = 0; j < problem.n_obj; ++j) {
        Vec y(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) y[i] = ys[i][j];
        b.gps_.push_back(GaussianProcess::fit(x_unit, y));
    }
    return b;
}

double SurrogateBundle::lcb(const Vec& x, int objective_index, Vec* grad) const {
    if (objective_index < 0 || objective_index >= n_obj())
        throw ArgumentError("lcb: objective index out of range");
    const Vec u = norm_.to_unit(x);
    double mean, sd;
    Vec dmean, dstd;
    gps_[objective_index].predict(u, mean, sd, grad ? &dmean : nullptr, grad ? &dstd : nullptr);
    if (grad) {
        grad->resize(u.size());
        for (std::size_t c = 0; c < u.size(); ++c)
            (*grad)[c] = (dmean[c] - lambda_ * dstd[c]) / norm_.scale[c];
    }
    return mean - lambda_ * sd;
}

void SurrogateBundle::lcb_all_unit(const Vec& u, Vec& f_out, Matrix* dfdu) const {
    const int m = n_obj();
    f_out.resize(m);
    if (dfdu && (dfdu->rows() != static_cast<std::size_t>(m) || dfdu->cols() != u.size()))
        *dfdu = Matrix(m, u.size());
    Vec dmean, dstd;
    for (int j = 0; j < m; ++j) {
        double mean, sd;
        gps_[j].predict(u, mean, sd, dfdu ? &dmean : nullptr, dfdu ? &dstd : nullptr);
        f_out[j] = mean - lambda_ * sd;
        if (dfdu) {
            double* row = dfdu->row(j);
            for (std::size_t c = 0; c < u.size(); ++c) row[c] = dmean[c] - lambda_ * dstd[c];
        }
    }
}

} // namespace svh
