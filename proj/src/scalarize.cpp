#include "svh/scalarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svh/error.hpp"

namespace svh {

IdealPoint IdealPoint::from_observations(const std::vector<Vec>& observations) {
    if (observations.empty()) throw ArgumentError("ideal point needs at least one observation");
    IdealPoint ip;
    ip.run_min.assign(observations.front().size(), std::numeric_limits<double>::infinity());
    ip.update(observations);
    return ip;
}

void IdealPoint::update(const std::vector<Vec>& observations) {
    for (const auto& f : observations) {
        for (std::size_t i = 0; i < run_min.size(); ++i) run_min[i] = std::min(run_min[i], f[i]);
    }
    z.resize(run_min.size());
    for (std::size_t i = 0; i < run_min.size(); ++i) z[i] = run_min[i] - kMargin;
}

std::vector<Preference> sample_preferences(std::size_t count, int m, RngStream& rng) {
    if (count < 1) throw ArgumentError("sample_preferences: count must be >= 1");
    if (m < 2) throw ArgumentError("sample_preferences: need at least 2 objectives");
    const double shape = 1.0 / static_cast<double>(m);
    std::vector<Preference> prefs;
    prefs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Vec r(m);
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            r[j] = rng.gamma(shape);
            total += r[j];
        }
        // Degenerate all-zero draws renormalize from the clamp floor.
        double clamped_total = 0.0;
        for (int j = 0; j < m; ++j) {
            r[j] = total > 0.0 ? r[j] / total : 0.0;
            r[j] = std::max(r[j], 1e-6);
            clamped_total += r[j];
        }
        for (int j = 0; j < m; ++j) r[j] /= clamped_total;
        prefs.push_back(Preference{std::move(r)});
    }
    return prefs;
}

ChebyshevResult chebyshev(const Vec& f_hat, const Preference& r, const IdealPoint& z) {
    ChebyshevResult res;
    res.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f_hat.size(); ++i) {
        const double term = r.r[i] * std::fabs(f_hat[i] - z.z[i]);
        if (term > res.value) {
            res.value = term;
            res.argmax_index = static_cast<int>(i);
        }
    }
    return res;
}

Vec chebyshev_grad_f(const Vec& f_hat, const Preference& r, const ChebyshevResult& at,
                     const IdealPoint& z) {
    Vec grad(f_hat.size(), 0.0);
    const int a = at.argmax_index;
    const double sign = (f_hat[a] - z.z[a]) >= 0.0 ? 1.0 : -1.0;
    grad[a] = r.r[a] * sign;
    return grad;
}

} // namespace svh
