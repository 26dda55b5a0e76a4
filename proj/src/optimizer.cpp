#include "svh/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "svh/error.hpp"
#include "svh/kernels.hpp"
#include "svh/sobol.hpp"
#include "svh/version.hpp"

namespace svh {
namespace {

constexpr int kHiddenWidth = 256;
constexpr double kDuplicateRadiusSq = 1e-18;  // 1e-9 in normalized coordinates
constexpr int kLossStride = 25;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

const char* kernel_name(KernelKind k) { return k == KernelKind::local ? "local" : "global"; }

KernelKind kernel_from_name(const std::string& name) {
    if (name == "local") return KernelKind::local;
    if (name == "global") return KernelKind::global;
    throw ArgumentError("kernel must be 'local' or 'global', got '" + name + "'");
}

void RunConfig::validate() const {
    if (n_init < 2) throw ArgumentError("n_init must be at least 2");
    if (n_iterations < 0) throw ArgumentError("iterations must be non-negative");
    if (inner_steps < 1) throw ArgumentError("inner steps must be positive");
    if (n_particles < 1) throw ArgumentError("particle count must be positive");
    if (n_candidates < 1) throw ArgumentError("candidate count must be positive");
    if (batch_size < 1) throw ArgumentError("batch size must be positive");
    if (batch_size > n_candidates) throw ArgumentError("batch size cannot exceed candidate count");
    if (alpha < 0.0) throw ArgumentError("alpha must be non-negative");
    if (lcb_lambda < 0.0) throw ArgumentError("lambda must be non-negative");
    if (!(xi > 0.0)) throw ArgumentError("learning rate must be positive");
}

void Archive::append(Vec x, Vec y, int prov) {
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
    provenance.push_back(prov);
}

Archive initial_design(const Problem& problem, int n_init, RngStream& rng) {
    if (n_init < 2) throw ArgumentError("initial design needs at least 2 points");
    Archive archive;
    SobolSampler sampler(problem.n_var, rng.next_u64());
    for (int i = 0; i < n_init; ++i) {
        const Vec u = sampler.next();
        Vec x(problem.n_var);
        for (int c = 0; c < problem.n_var; ++c)
            x[c] = problem.lower[c] + (problem.upper[c] - problem.lower[c]) * u[c];
        Vec y = problem.evaluate(x);
        archive.append(std::move(x), std::move(y), -1);
    }
    return archive;
}

OptimizerLoop::OptimizerLoop(Problem problem, RunConfig config)
    : problem_(std::move(problem)),
      config_(std::move(config)),
      model_(problem_.n_obj, problem_.n_var, problem_.lower, problem_.upper, kHiddenWidth),
      adam_(model_.theta().size(), config_.xi) {
    config_.validate();
    log_.version = kVersion;
    log_.config = config_;
    log_.problem_name = problem_.name;
    log_.n_var = problem_.n_var;
    log_.n_obj = problem_.n_obj;
}

void OptimizerLoop::refresh_anchors() {
    ideal_ = IdealPoint::from_observations(log_.archive.ys);
    rho_select_.assign(problem_.n_obj, -std::numeric_limits<double>::infinity());
    for (const auto& y : log_.archive.ys)
        for (int j = 0; j < problem_.n_obj; ++j) rho_select_[j] = std::max(rho_select_[j], y[j]);
    for (double& v : rho_select_) v *= 1.1;
}

double OptimizerLoop::archive_hv() const {
    return hv::hypervolume(hv::non_dominated(log_.archive.ys), RefPoint{log_.metric_rho});
}

void OptimizerLoop::initialize() {
    if (initialized_) throw StateError("OptimizerLoop is already initialized");
    const auto t0 = Clock::now();

    RngStream init_rng(derive_seed(config_.seed, "init-design"));
    log_.archive = initial_design(problem_, config_.n_init, init_rng);

    RngStream model_rng(derive_seed(config_.seed, "model-init"));
    model_.init_params(model_rng);

    refresh_anchors();

    // Metric setup: fixed reference point and front hypervolume for the run.
    if (problem_.has_true_front() && problem_.n_obj <= 3) {
        RefPoint rho = config_.metric_ref_point ? RefPoint{*config_.metric_ref_point}
                                                : default_reference_point(problem_);
        if (static_cast<int>(rho.rho.size()) != problem_.n_obj)
            throw ArgumentError("metric reference point length does not match n_obj");
        log_.metric_rho = rho.rho;
        log_.reference_hv = true_front_hv(problem_, rho);
        log_.initial_hv = archive_hv();
        const double gap = log_.reference_hv - log_.initial_hv;
        log_.initial_lhd = gap > 0.0 ? std::optional<double>(std::log(gap)) : std::nullopt;
        log_.lhd_trace.push_back(log_.initial_lhd);
    }

    log_.total_seconds += seconds_since(t0);
    initialized_ = true;
}

void OptimizerLoop::run_iteration() {
    if (!initialized_) throw StateError("OptimizerLoop::initialize must run first");
    const auto t0 = Clock::now();
    const int iter = iterations_done_;
    const int m = problem_.n_obj;

    IterationRecord rec;
    rec.iteration = iter;

    // (a) anchors refreshed before training, then the surrogate refit.
    refresh_anchors();
    rec.rho_select = rho_select_;
    rec.z_ideal = ideal_.z;

    SurrogateBundle bundle =
        SurrogateBundle::fit(problem_, log_.archive.xs, log_.archive.ys, config_.lcb_lambda);
    for (int j = 0; j < m; ++j) {
        const auto& gp = bundle.gp(j);
        rec.gp.push_back({gp.hyperparams().lengthscale, gp.hyperparams().signal_variance,
                          gp.hyperparams().noise_variance, gp.y_mean(), gp.y_std(),
                          gp.applied_jitter(), gp.log_marginal_likelihood()});
    }

    // (b) T inner training steps on the Pareto set model.
    const long skips_before = adam_.skipped();
    for (int t = 0; t < config_.inner_steps; ++t) {
        RngStream step_rng(derive_seed(config_.seed, "inner", iter, t));
        const auto prefs = sample_preferences(config_.n_particles, m, step_rng);
        ParticleSet particles = build_particles(model_, prefs, bundle, ideal_);
        const KernelMatrix km = config_.kernel == KernelKind::local
                                    ? local_kernel(particles)
                                    : global_kernel(particles.fs);
        const Vec grad = svh_gradient(particles, km, config_.alpha, model_apply(model_, particles));
        adam_.step(model_.theta(), grad);

        if (t % kLossStride == 0) {
            const double mean_g = kernels::sum(particles.g_values.data(), particles.size()) /
                                  static_cast<double>(particles.size());
            rec.inner_loss.emplace_back(t, mean_g);
        }
    }
    rec.grad_skips = adam_.skipped() - skips_before;

    // (c) decode B candidates with surrogate values.
    RngStream cand_rng(derive_seed(config_.seed, "cand", iter));
    const auto cand_prefs = sample_preferences(config_.n_candidates, m, cand_rng);

    std::vector<Vec> cand_x, cand_unit, cand_fhat;
    cand_x.reserve(cand_prefs.size());
    ParetoSetModel::Workspace ws;
    for (const auto& pref : cand_prefs) {
        const Vec& x = model_.forward(pref.r, ws);
        Vec f;
        bundle.lcb_all_unit(ParetoSetModel::unit_output(ws), f, nullptr);
        cand_x.push_back(x);
        cand_unit.push_back(ParetoSetModel::unit_output(ws));
        cand_fhat.push_back(std::move(f));
    }

    // Exclude candidates on top of already-evaluated points.
    std::vector<Vec> archive_unit;
    archive_unit.reserve(log_.archive.size());
    for (const auto& x : log_.archive.xs) archive_unit.push_back(bundle.normalizer().to_unit(x));
    std::vector<std::size_t> kept, excluded;
    for (std::size_t i = 0; i < cand_x.size(); ++i) {
        bool fresh = true;
        for (const auto& u : archive_unit) {
            if (kernels::sqdist(u.data(), cand_unit[i].data(), u.size()) <= kDuplicateRadiusSq) {
                fresh = false;
                break;
            }
        }
        (fresh ? kept : excluded).push_back(i);
    }
    // Degenerate decoder collapse: backfill so a full batch always exists.
    for (std::size_t i = 0; kept.size() < static_cast<std::size_t>(config_.batch_size) &&
                            i < excluded.size(); ++i)
        kept.push_back(excluded[i]);

    // (d) batch selection.
    std::vector<std::size_t> picks_local;
    if (m <= 3) {
        std::vector<Vec> pool_fhat;
        pool_fhat.reserve(kept.size());
        for (std::size_t i : kept) pool_fhat.push_back(cand_fhat[i]);
        picks_local = hv::greedy_select(pool_fhat, hv::non_dominated(log_.archive.ys),
                                        RefPoint{rho_select_}, config_.batch_size);
    } else {
        // No exact hypervolume beyond 3 objectives: take the candidates with
        // the best scalarized surrogate value under their own preferences.
        std::vector<std::size_t> order(kept.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<double> g(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            g[i] = chebyshev(cand_fhat[kept[i]], cand_prefs[kept[i]], ideal_).value;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
        picks_local.assign(order.begin(), order.begin() + config_.batch_size);
    }

    // (e) expensive evaluations.
    std::vector<Vec> new_ys;
    for (std::size_t p : picks_local) {
        const std::size_t idx = kept[p];
        Vec y = problem_.evaluate(cand_x[idx]);
        rec.batch_x.push_back(cand_x[idx]);
        rec.batch_fhat.push_back(cand_fhat[idx]);
        rec.batch_f.push_back(y);
        new_ys.push_back(y);
        log_.archive.append(cand_x[idx], std::move(y), iter);
    }

    // (f) ideal point sees the new observations.
    ideal_.update(new_ys);

    // (g) record.
    long clamp_total = 0;
    for (int j = 0; j < m; ++j) clamp_total += bundle.gp(j).std_clamp_events();
    rec.std_clamp_events = clamp_total;

    if (log_.has_metric()) {
        rec.archive_hv = archive_hv();
        const double gap = log_.reference_hv - rec.archive_hv;
        rec.lhd = gap > 0.0 ? std::optional<double>(std::log(gap)) : std::nullopt;
        log_.lhd_trace.push_back(rec.lhd);
    }
    rec.wall_seconds = seconds_since(t0);
    log_.total_seconds += rec.wall_seconds;
    log_.iterations.push_back(std::move(rec));
    ++iterations_done_;

    if (on_iteration) on_iteration(model_, iter);
}

RunLog OptimizerLoop::take_log() {
    log_.final_theta = model_.theta();
    return std::move(log_);
}

RunLog run(Problem problem, const RunConfig& config) {
    OptimizerLoop loop(std::move(problem), config);
    loop.initialize();
    while (!loop.done()) {
        try {
            loop.run_iteration();
        } catch (const NumericalError& e) {
            RunLog log = loop.take_log();
            log.aborted = true;
            log.abort_reason = e.what();
            return log;
        }
    }
    return loop.take_log();
}

} // namespace svh
