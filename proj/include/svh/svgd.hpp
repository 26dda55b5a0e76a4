#pragma once

#include <functional>
#include <vector>

#include "svh/linalg.hpp"
#include "svh/pareto_set_model.hpp"

namespace svh {

// One inner-loop batch: K preferences decoded through the current model, with
// everything the update rule needs cached per particle.
struct ParticleSet {
    std::vector<Vec> prefs;
    std::vector<Vec> xs;          // decoded decision vectors
    std::vector<Vec> fs;          // surrogate objective vectors (the particles F_i)
    std::vector<int> argmax_idx;  // Chebyshev branch per particle
    std::vector<double> g_values;
    std::vector<Vec> g_grads;     // per-particle d g / d theta
    // Reverse-pass state for the repulsion chain.
    std::vector<Matrix> dfdx;     // m x n Jacobians in decision coordinates
    std::vector<ParetoSetModel::Workspace> ws;

    std::size_t size() const { return fs.size(); }
};

ParticleSet build_particles(const ParetoSetModel& model, const std::vector<Preference>& prefs,
                            const SurrogateBundle& bundle, const IdealPoint& z);
ParticleSet build_particles(const ParetoSetModel& model, const std::vector<Preference>& prefs,
                            const ObjectiveFn& fn, const IdealPoint& z);

// k_vals[i][j] plus the gradient of each entry w.r.t. the row particle's
// objective vector F_i. The global kernel is symmetric with a unit diagonal;
// the local kernel evaluates row i through particle i's own Chebyshev branch
// and need not be symmetric.
struct KernelMatrix {
    Matrix k_vals;            // K x K
    std::vector<Vec> dk_df;   // K*K entries (row-major), each length m
    const Vec& grad(std::size_t i, std::size_t j) const { return dk_df[i * k_vals.cols() + j]; }
};

// Gaussian kernel with the median-of-pairwise-distances bandwidth
// (floored at 1e-8), recomputed from the given particle positions.
KernelMatrix global_kernel(const std::vector<Vec>& fs);

// Per-dimension Gaussian kernels gated by the row particle's Chebyshev
// branch, each with its own median bandwidth.
KernelMatrix local_kernel(const ParticleSet& particles);

// accum += coeff * (dF_i/dtheta)^T w, for particle i.
using FApply = std::function<void(std::size_t particle, const Vec& w, double coeff, Vec& accum)>;

// The batched update direction: the mean over particles of the kernel-
// weighted driving gradients plus alpha times the kernel repulsion chained
// through each particle's decoder. Descending this direction moves decoded
// points down their Chebyshev branches while pushing nearby particles apart
// in objective space. Raises NumericalError (naming the pair) on non-finite
// kernel entries.
Vec svh_gradient(const ParticleSet& particles, const KernelMatrix& kernel, double alpha,
                 const FApply& apply);

// FApply adapter for the particles' recorded reverse-pass state.
FApply model_apply(const ParetoSetModel& model, const ParticleSet& particles);

} // namespace svh
