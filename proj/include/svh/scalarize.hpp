#pragma once

#include <vector>

#include "svh/linalg.hpp"
#include "svh/rng.hpp"

namespace svh {

// A point on the positive preference simplex: r_i > 0, sum r_i = 1.
struct Preference {
    Vec r;
};

// Componentwise lower bound on observed objective values, kept a fixed 0.1
// margin below the running minimum so the Chebyshev term stays away from its
// kink at zero.
struct IdealPoint {
    Vec z;        // running_min - margin
    Vec run_min;  // componentwise minimum of everything observed so far

    static IdealPoint from_observations(const std::vector<Vec>& observations);
    void update(const std::vector<Vec>& observations);

    static constexpr double kMargin = 0.1;
};

struct ChebyshevResult {
    double value = 0.0;
    int argmax_index = 0;
};

// count i.i.d. draws from the flat Dirichlet Dir(1/m,...,1/m), entries
// clamped to >= 1e-6 and renormalized.
std::vector<Preference> sample_preferences(std::size_t count, int m, RngStream& rng);

// g = max_i r_i |f_i - z_i|; ties resolve to the lowest index.
ChebyshevResult chebyshev(const Vec& f_hat, const Preference& r, const IdealPoint& z);

// Subgradient of the Chebyshev value w.r.t. f_hat: nonzero only at the argmax
// coordinate, r_a * sign(f_a - z_a) (sign taken as +1 at exactly zero).
Vec chebyshev_grad_f(const Vec& f_hat, const Preference& r, const ChebyshevResult& at,
                     const IdealPoint& z);

} // namespace svh
