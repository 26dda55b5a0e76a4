#include "svh/svgd.hpp"

#include <algorithm>
#include <cmath>

#include "svh/error.hpp"

namespace svh {
namespace {

constexpr double kBandwidthFloor = 1e-8;

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        return 0.5 * (v[mid - 1] + hi);
    }
    return hi;
}

template <typename EvalFn>
ParticleSet build_impl(const ParetoSetModel& model, const std::vector<Preference>& prefs,
                       const EvalFn& eval, const IdealPoint& z) {
    ParticleSet ps;
    const std::size_t k = prefs.size();
    ps.prefs.reserve(k);
    ps.xs.reserve(k);
    ps.fs.reserve(k);
    ps.argmax_idx.reserve(k);
    ps.g_values.reserve(k);
    ps.g_grads.reserve(k);
    ps.dfdx.resize(k);
    ps.ws.resize(k);

    for (std::size_t i = 0; i < k; ++i) {
        const Vec& x = model.forward(prefs[i].r, ps.ws[i]);
        Vec f;
        eval(ps.ws[i], x, f, ps.dfdx[i]);

        const ChebyshevResult ch = chebyshev(f, prefs[i], z);
        const Vec df = chebyshev_grad_f(f, prefs[i], ch, z);
        const int a = ch.argmax_index;
        Vec x_bar(ps.dfdx[i].cols());
        for (std::size_t c = 0; c < x_bar.size(); ++c) x_bar[c] = df[a] * ps.dfdx[i](a, c);
        Vec dtheta(model.theta().size(), 0.0);
        model.backward_accum(ps.ws[i], x_bar, 1.0, dtheta);

        ps.prefs.push_back(prefs[i].r);
        ps.xs.push_back(x);
        ps.fs.push_back(std::move(f));
        ps.argmax_idx.push_back(a);
        ps.g_values.push_back(ch.value);
        ps.g_grads.push_back(std::move(dtheta));
    }
    return ps;
}

} // namespace

ParticleSet build_particles(const ParetoSetModel& model, const std::vector<Preference>& prefs,
                            const SurrogateBundle& bundle, const IdealPoint& z) {
    const auto& norm = bundle.normalizer();
    return build_impl(model, prefs,
                      [&](const ParetoSetModel::Workspace& ws, const Vec&, Vec& f, Matrix& dfdx) {
                          Matrix dfdu;
                          bundle.lcb_all_unit(ParetoSetModel::unit_output(ws), f, &dfdu);
                          dfdx = Matrix(dfdu.rows(), dfdu.cols());
                          for (std::size_t j = 0; j < dfdu.rows(); ++j)
                              for (std::size_t c = 0; c < dfdu.cols(); ++c)
                                  dfdx(j, c) = dfdu(j, c) / norm.scale[c];
                      },
                      z);
}

ParticleSet build_particles(const ParetoSetModel& model, const std::vector<Preference>& prefs,
                            const ObjectiveFn& fn, const IdealPoint& z) {
    return build_impl(model, prefs,
                      [&](const ParetoSetModel::Workspace&, const Vec& x, Vec& f, Matrix& dfdx) {
                          fn(x, f, dfdx);
                      },
                      z);
}

KernelMatrix global_kernel(const std::vector<Vec>& fs) {
    const std::size_t k = fs.size();
    if (k == 0) throw ArgumentError("global_kernel: empty particle set");
    const std::size_t m = fs.front().size();

    std::vector<double> dists;
    dists.reserve(k * (k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < m; ++c) {
                const double d = fs[i][c] - fs[j][c];
                d2 += d * d;
            }
            dists.push_back(std::sqrt(d2));
        }
    const double c = std::max(median_of(std::move(dists)), kBandwidthFloor);
    const double inv_c2 = 1.0 / (c * c);

    KernelMatrix km;
    km.k_vals = Matrix(k, k);
    km.dk_df.assign(k * k, Vec(m, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double d2 = 0.0;
            for (std::size_t cdx = 0; cdx < m; ++cdx) {
                const double d = fs[i][cdx] - fs[j][cdx];
                d2 += d * d;
            }
            const double kv = std::exp(-0.5 * d2 * inv_c2);
            km.k_vals(i, j) = kv;
            Vec& g = km.dk_df[i * k + j];
            for (std::size_t cdx = 0; cdx < m; ++cdx)
                g[cdx] = -kv * (fs[i][cdx] - fs[j][cdx]) * inv_c2;
        }
    }
    return km;
}

KernelMatrix local_kernel(const ParticleSet& particles) {
    const std::size_t k = particles.size();
    if (k == 0) throw ArgumentError("local_kernel: empty particle set");
    if (particles.argmax_idx.size() != k)
        throw ArgumentError("local_kernel: argmax indices not populated");
    const std::size_t m = particles.fs.front().size();

    // One median bandwidth per objective dimension.
    Vec inv_c2(m);
    for (std::size_t dim = 0; dim < m; ++dim) {
        std::vector<double> dists;
        dists.reserve(k * (k - 1) / 2);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                dists.push_back(std::fabs(particles.fs[i][dim] - particles.fs[j][dim]));
        const double c = std::max(median_of(std::move(dists)), kBandwidthFloor);
        inv_c2[dim] = 1.0 / (c * c);
    }

    KernelMatrix km;
    km.k_vals = Matrix(k, k);
    km.dk_df.assign(k * k, Vec(m, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        const int a = particles.argmax_idx[i];  // row particle's branch gates the kernel
        for (std::size_t j = 0; j < k; ++j) {
            const double d = particles.fs[i][a] - particles.fs[j][a];
            const double kv = std::exp(-0.5 * d * d * inv_c2[a]);
            km.k_vals(i, j) = kv;
            km.dk_df[i * k + j][a] = -kv * d * inv_c2[a];
        }
    }
    return km;
}

Vec svh_gradient(const ParticleSet& particles, const KernelMatrix& kernel, double alpha,
                 const FApply& apply) {
    const std::size_t k = particles.size();
    if (k == 0) throw ArgumentError("svh_gradient: empty particle set");
    if (kernel.k_vals.rows() != k || kernel.k_vals.cols() != k)
        throw ArgumentError("svh_gradient: kernel size mismatch");
    if (alpha < 0.0) throw ArgumentError("svh_gradient: alpha must be non-negative");

    const std::size_t m = particles.fs.front().size();
    const double inv_k = 1.0 / static_cast<double>(k);
    Vec grad(particles.g_grads.front().size(), 0.0);

    for (std::size_t i = 0; i < k; ++i) {
        double row_sum = 0.0;
        Vec repulsion(m, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const double kv = kernel.k_vals(i, j);
            const Vec& dk = kernel.grad(i, j);
            bool finite = std::isfinite(kv);
            for (std::size_t c = 0; c < m && finite; ++c) finite = std::isfinite(dk[c]);
            if (!finite)
                throw NumericalError("svh_gradient: non-finite kernel term at pair (" +
                                     std::to_string(i) + ", " + std::to_string(j) + ")");
            row_sum += kv;
            for (std::size_t c = 0; c < m; ++c) repulsion[c] += dk[c];
        }
        kernels::axpy(grad.data(), row_sum * inv_k, particles.g_grads[i].data(), grad.size());
        if (alpha > 0.0) apply(i, repulsion, alpha * inv_k, grad);
    }
    return grad;
}

FApply model_apply(const ParetoSetModel& model, const ParticleSet& particles) {
    return [&model, &particles](std::size_t i, const Vec& w, double coeff, Vec& accum) {
        const Matrix& j = particles.dfdx[i];
        Vec x_bar(j.cols(), 0.0);
        for (std::size_t row = 0; row < j.rows(); ++row) {
            const double wr = w[row];
            if (wr == 0.0) continue;
            const double* jr = j.row(row);
            for (std::size_t c = 0; c < j.cols(); ++c) x_bar[c] += wr * jr[c];
        }
        model.backward_accum(particles.ws[i], x_bar, coeff, accum);
    };
}

} // namespace svh
