#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "svh/gp.hpp"
#include "svh/linalg.hpp"
#include "svh/rng.hpp"
#include "svh/scalarize.hpp"

namespace svh {

// Layer layout of the preference-to-solution network:
// m -> hidden (tanh) -> hidden (tanh) -> n_var (logistic, scaled to the box).
struct MlpArch {
    int n_in = 0;
    int n_hidden = 0;
    int n_out = 0;

    std::size_t w1() const { return 0; }
    std::size_t b1() const { return w1() + std::size_t(n_hidden) * n_in; }
    std::size_t w2() const { return b1() + n_hidden; }
    std::size_t b2() const { return w2() + std::size_t(n_hidden) * n_hidden; }
    std::size_t w3() const { return b2() + n_hidden; }
    std::size_t b3() const { return w3() + std::size_t(n_out) * n_hidden; }
    std::size_t theta_size() const { return b3() + n_out; }
};

// The Pareto set model h(r | theta): a small fully-connected network mapping
// a preference vector to a decision vector strictly inside the problem box.
// Forward passes are deterministic in (theta, r); the reverse pass accepts an
// arbitrary cotangent on the decoded point, which is how both the Chebyshev
// driving gradient and the kernel repulsion gradient reach theta.
class ParetoSetModel {
public:
    ParetoSetModel(int n_obj, int n_var, Vec lower, Vec upper, int hidden = 256);

    // Fan-in scaled uniform hidden layers; zero output layer, so the initial
    // decoder maps every preference to the box midpoint.
    void init_params(RngStream& rng);

    const MlpArch& arch() const noexcept { return arch_; }
    Vec& theta() noexcept { return theta_; }
    const Vec& theta() const noexcept { return theta_; }
    const Vec& lower() const noexcept { return lower_; }
    const Vec& upper() const noexcept { return upper_; }

    struct Workspace {
        Vec r, a1, h1, a2, h2, a3, s, x;
    };

    // Decode a preference; activations land in `ws` for a later reverse pass.
    const Vec& forward(const Vec& r, Workspace& ws) const;
    Vec forward(const Vec& r) const;

    // accum += coeff * (dx/dtheta)^T x_bar for the pass recorded in `ws`.
    void backward_accum(const Workspace& ws, const Vec& x_bar, double coeff, Vec& accum) const;

    // Unit-cube coordinates of the last decode (the logistic outputs).
    static const Vec& unit_output(const Workspace& ws) { return ws.s; }

private:
    MlpArch arch_;
    Vec lower_, upper_, scale_;
    Vec theta_;
};

// Adam with bias correction; a non-finite gradient skips the whole update and
// bumps the skip counter.
class AdamOptimizer {
public:
    explicit AdamOptimizer(std::size_t n, double learning_rate = 1e-3, double beta1 = 0.9,
                           double beta2 = 0.999, double epsilon = 1e-8);

    bool step(Vec& theta, const Vec& grad);
    long skipped() const noexcept { return skipped_; }
    double learning_rate() const noexcept { return lr_; }

private:
    Vec m_, v_;
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    long skipped_ = 0;
};

// Objective vector and its Jacobian at a decoded point, in original
// decision coordinates. Test doubles stub this to bypass the GP stack.
using ObjectiveFn = std::function<void(const Vec& x, Vec& f, Matrix& dfdx)>;

struct ScalarizedEval {
    double g_value = 0.0;
    Vec dtheta;
    Vec f;
    int argmax_index = 0;
};

// Chebyshev-scalarized surrogate evaluated through the model at preference r:
// value, argmax branch, surrogate vector and the full reverse-mode gradient.
ScalarizedEval scalarized_grad(const ParetoSetModel& model, const Vec& r,
                               const SurrogateBundle& bundle, const IdealPoint& z);
ScalarizedEval scalarized_grad(const ParetoSetModel& model, const Vec& r, const ObjectiveFn& fn,
                               const IdealPoint& z);

// Checkpoint: text header (architecture, seed, iteration) followed by the
// raw little-endian float64 parameter block.
void save_checkpoint(const std::string& path, const ParetoSetModel& model, std::uint64_t seed,
                     int iteration);
struct CheckpointData {
    MlpArch arch;
    std::uint64_t seed = 0;
    int iteration = 0;
    Vec theta;
};
CheckpointData load_checkpoint(const std::string& path);

} // namespace svh
