#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svh/hypervolume.hpp"
#include "svh/pareto_set_model.hpp"
#include "svh/problem.hpp"
#include "svh/rng.hpp"
#include "svh/svgd.hpp"

namespace svh {

enum class KernelKind { local, global };

const char* kernel_name(KernelKind k);
KernelKind kernel_from_name(const std::string& name);

struct RunConfig {
    std::string problem_id;
    std::uint64_t seed = 0;
    int n_init = 20;        // initial design size
    int n_iterations = 20;  // outer iterations N
    int inner_steps = 250;  // model training steps per iteration T
    int n_particles = 10;   // preferences per inner step K
    int n_candidates = 1000;  // decoded candidates per iteration B
    int batch_size = 5;       // expensive evaluations per iteration b
    double alpha = 0.1;       // repulsion weight
    double lcb_lambda = 2.0;
    double xi = 1e-3;  // model learning rate
    KernelKind kernel = KernelKind::local;
    // Optional override of the metric reference point (otherwise the
    // reference-front nadir * 1.1).
    std::optional<Vec> metric_ref_point;

    void validate() const;  // ArgumentError on violations
};

// The evaluated dataset; append-only.
struct Archive {
    std::vector<Vec> xs;
    std::vector<Vec> ys;
    std::vector<int> provenance;  // -1 for the initial design, else iteration index

    std::size_t size() const { return xs.size(); }
    void append(Vec x, Vec y, int prov);
};

struct GpRecord {
    double lengthscale = 0, signal_variance = 0, noise_variance = 0;
    double y_mean = 0, y_std = 0, jitter = 0, lml = 0;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<GpRecord> gp;
    std::vector<std::pair<int, double>> inner_loss;  // (step, mean scalarized value)
    std::vector<Vec> batch_x, batch_fhat, batch_f;
    Vec rho_select;
    Vec z_ideal;
    long grad_skips = 0;
    long std_clamp_events = 0;
    double wall_seconds = 0.0;
    double archive_hv = 0.0;  // against the fixed metric rho, when available
    std::optional<double> lhd;
};

struct RunLog {
    std::string version;
    RunConfig config;
    std::string problem_name;
    int n_var = 0, n_obj = 0;
    Vec metric_rho;            // empty when the problem has no usable metric
    double reference_hv = 0.0;
    double initial_hv = 0.0;
    std::optional<double> initial_lhd;
    std::vector<IterationRecord> iterations;
    Archive archive;
    std::vector<std::optional<double>> lhd_trace;  // N+1 entries when metric available
    Vec final_theta;
    std::string checkpoint_path;
    double total_seconds = 0.0;
    bool aborted = false;
    std::string abort_reason;

    bool has_metric() const { return !metric_rho.empty(); }
};

// Scrambled low-discrepancy initial design, evaluated on the true objectives.
Archive initial_design(const Problem& problem, int n_init, RngStream& rng);

// Drives one optimization run: per-iteration GP refits, SVH-updated model
// training, candidate decoding, hypervolume-improvement batch selection and
// the expensive evaluations.
class OptimizerLoop {
public:
    OptimizerLoop(Problem problem, RunConfig config);

    void initialize();
    void run_iteration();  // throws NumericalError if the GP refit fails
    int iterations_done() const noexcept { return iterations_done_; }
    bool done() const noexcept { return iterations_done_ >= config_.n_iterations; }

    const Archive& archive() const noexcept { return log_.archive; }
    const ParetoSetModel& model() const noexcept { return model_; }
    const RunLog& log() const noexcept { return log_; }
    RunLog take_log();

    // Invoked after every completed iteration (checkpointing hook).
    std::function<void(const ParetoSetModel&, int iteration)> on_iteration;

private:
    void refresh_anchors();
    double archive_hv() const;

    Problem problem_;
    RunConfig config_;
    ParetoSetModel model_;
    AdamOptimizer adam_;
    IdealPoint ideal_;
    Vec rho_select_;
    RunLog log_;
    int iterations_done_ = 0;
    bool initialized_ = false;
    long clamp_baseline_ = 0;
};

// Full run; a GP numerical failure aborts the run with the partial log kept.
RunLog run(Problem problem, const RunConfig& config);

} // namespace svh
