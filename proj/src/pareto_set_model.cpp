#include "svh/pareto_set_model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "svh/error.hpp"
#include "svh/kernels.hpp"

namespace svh {

namespace {
constexpr double kSquashEps = 1e-9;  // keeps decoded points strictly inside the box
}

ParetoSetModel::ParetoSetModel(int n_obj, int n_var, Vec lower, Vec upper, int hidden)
    : arch_{n_obj, hidden, n_var}, lower_(std::move(lower)), upper_(std::move(upper)) {
    if (n_obj < 2 || n_var < 1 || hidden < 1)
        throw ArgumentError("ParetoSetModel: invalid architecture");
    if (lower_.size() != static_cast<std::size_t>(n_var) || upper_.size() != lower_.size())
        throw ArgumentError("ParetoSetModel: bounds do not match n_var");
    scale_.resize(n_var);
    for (int i = 0; i < n_var; ++i) {
        if (!(lower_[i] < upper_[i]))
            throw BoundsError("ParetoSetModel: invalid box at index " + std::to_string(i));
        scale_[i] = upper_[i] - lower_[i];
    }
    theta_.assign(arch_.theta_size(), 0.0);
}

void ParetoSetModel::init_params(RngStream& rng) {
    theta_.assign(arch_.theta_size(), 0.0);
    const auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            theta_[offset + i] = rng.uniform(-bound, bound);
    };
    fill(arch_.w1(), std::size_t(arch_.n_hidden) * arch_.n_in, arch_.n_in);
    fill(arch_.b1(), arch_.n_hidden, arch_.n_in);
    fill(arch_.w2(), std::size_t(arch_.n_hidden) * arch_.n_hidden, arch_.n_hidden);
    fill(arch_.b2(), arch_.n_hidden, arch_.n_hidden);
    // Output layer stays zero: training starts from the box midpoint.
}

const Vec& ParetoSetModel::forward(const Vec& r, Workspace& ws) const {
    if (r.size() != static_cast<std::size_t>(arch_.n_in))
        throw ArgumentError("forward: preference length mismatch");
    const int h = arch_.n_hidden, out = arch_.n_out;
    const double* th = theta_.data();

    ws.r = r;
    ws.a1.resize(h);
    kernels::matvec(th + arch_.w1(), h, arch_.n_in, r.data(), ws.a1.data());
    kernels::axpy(ws.a1.data(), 1.0, th + arch_.b1(), h);
    ws.h1.resize(h);
    kernels::tanh_eval(ws.h1.data(), ws.a1.data(), h);

    ws.a2.resize(h);
    kernels::matvec(th + arch_.w2(), h, h, ws.h1.data(), ws.a2.data());
    kernels::axpy(ws.a2.data(), 1.0, th + arch_.b2(), h);
    ws.h2.resize(h);
    kernels::tanh_eval(ws.h2.data(), ws.a2.data(), h);

    ws.a3.resize(out);
    kernels::matvec(th + arch_.w3(), out, h, ws.h2.data(), ws.a3.data());
    kernels::axpy(ws.a3.data(), 1.0, th + arch_.b3(), out);
    ws.s.resize(out);
    kernels::sigmoid_eval(ws.s.data(), ws.a3.data(), out);
    ws.x.resize(out);
    for (int i = 0; i < out; ++i) {
        ws.s[i] = std::min(std::max(ws.s[i], kSquashEps), 1.0 - kSquashEps);
        ws.x[i] = lower_[i] + scale_[i] * ws.s[i];
    }
    return ws.x;
}

Vec ParetoSetModel::forward(const Vec& r) const {
    Workspace ws;
    return forward(r, ws);
}

void ParetoSetModel::backward_accum(const Workspace& ws, const Vec& x_bar, double coeff,
                                    Vec& accum) const {
    const int h = arch_.n_hidden, out = arch_.n_out, in = arch_.n_in;
    if (accum.size() != theta_.size()) accum.resize(theta_.size(), 0.0);
    const double* th = theta_.data();
    double* acc = accum.data();

    // x = lower + scale * sigmoid(a3)
    Vec da3(out);
    for (int i = 0; i < out; ++i)
        da3[i] = coeff * x_bar[i] * scale_[i] * ws.s[i] * (1.0 - ws.s[i]);

    kernels::ger_add(acc + arch_.w3(), out, h, da3.data(), ws.h2.data());
    kernels::axpy(acc + arch_.b3(), 1.0, da3.data(), out);

    Vec dh2(h, 0.0);
    kernels::matvec_t_add(th + arch_.w3(), out, h, da3.data(), dh2.data());
    Vec da2(h);
    for (int i = 0; i < h; ++i) da2[i] = dh2[i] * (1.0 - ws.h2[i] * ws.h2[i]);

    kernels::ger_add(acc + arch_.w2(), h, h, da2.data(), ws.h1.data());
    kernels::axpy(acc + arch_.b2(), 1.0, da2.data(), h);

    Vec dh1(h, 0.0);
    kernels::matvec_t_add(th + arch_.w2(), h, h, da2.data(), dh1.data());
    Vec da1(h);
    for (int i = 0; i < h; ++i) da1[i] = dh1[i] * (1.0 - ws.h1[i] * ws.h1[i]);

    kernels::ger_add(acc + arch_.w1(), h, in, da1.data(), ws.r.data());
    kernels::axpy(acc + arch_.b1(), 1.0, da1.data(), h);
}

AdamOptimizer::AdamOptimizer(std::size_t n, double learning_rate, double beta1, double beta2,
                             double epsilon)
    : m_(n, 0.0), v_(n, 0.0), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

bool AdamOptimizer::step(Vec& theta, const Vec& grad) {
    if (theta.size() != m_.size() || grad.size() != m_.size())
        throw ArgumentError("AdamOptimizer: size mismatch");
    for (double g : grad) {
        if (!std::isfinite(g)) {
            ++skipped_;
            return false;
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        theta[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
    return true;
}

namespace {

ScalarizedEval scalarized_eval_impl(const ParetoSetModel& model, const Vec& r, const Vec& f,
                                    const Matrix& dfdx, const ParetoSetModel::Workspace& ws,
                                    const IdealPoint& z) {
    ScalarizedEval out;
    out.f = f;
    const Preference pref{r};
    const ChebyshevResult ch = chebyshev(f, pref, z);
    out.g_value = ch.value;
    out.argmax_index = ch.argmax_index;

    // dg/dx through the active branch only.
    const Vec df = chebyshev_grad_f(f, pref, ch, z);
    const int a = ch.argmax_index;
    Vec x_bar(dfdx.cols());
    for (std::size_t c = 0; c < dfdx.cols(); ++c) x_bar[c] = df[a] * dfdx(a, c);

    out.dtheta.assign(model.theta().size(), 0.0);
    model.backward_accum(ws, x_bar, 1.0, out.dtheta);
    return out;
}

} // namespace

ScalarizedEval scalarized_grad(const ParetoSetModel& model, const Vec& r,
                               const SurrogateBundle& bundle, const IdealPoint& z) {
    ParetoSetModel::Workspace ws;
    model.forward(r, ws);
    Vec f;
    Matrix dfdu;
    bundle.lcb_all_unit(ParetoSetModel::unit_output(ws), f, &dfdu);
    // Unit-space Jacobian -> decision-space Jacobian (shared chain rule with
    // the decoder: x = lower + scale * u).
    const auto& norm = bundle.normalizer();
    Matrix dfdx(dfdu.rows(), dfdu.cols());
    for (std::size_t j = 0; j < dfdu.rows(); ++j)
        for (std::size_t c = 0; c < dfdu.cols(); ++c) dfdx(j, c) = dfdu(j, c) / norm.scale[c];
    return scalarized_eval_impl(model, r, f, dfdx, ws, z);
}

ScalarizedEval scalarized_grad(const ParetoSetModel& model, const Vec& r, const ObjectiveFn& fn,
                               const IdealPoint& z) {
    ParetoSetModel::Workspace ws;
    const Vec& x = model.forward(r, ws);
    Vec f;
    Matrix dfdx;
    fn(x, f, dfdx);
    return scalarized_eval_impl(model, r, f, dfdx, ws, z);
}

void save_checkpoint(const std::string& path, const ParetoSetModel& model, std::uint64_t seed,
                     int iteration) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write checkpoint '" + path + "'");
    const auto& a = model.arch();
    out << "svh-theta v1\n"
        << "arch " << a.n_in << ' ' << a.n_hidden << ' ' << a.n_out << '\n'
        << "seed " << seed << '\n'
        << "iteration " << iteration << '\n'
        << "count " << model.theta().size() << '\n';
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint block is written little-endian");
    out.write(reinterpret_cast<const char*>(model.theta().data()),
              static_cast<std::streamsize>(model.theta().size() * sizeof(double)));
    if (!out) throw StateError("short write on checkpoint '" + path + "'");
}

CheckpointData load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot open checkpoint '" + path + "'");
    std::string magic, v;
    in >> magic >> v;
    if (magic != "svh-theta" || v != "v1") throw FormatError("not a svh-theta checkpoint: " + path);
    CheckpointData data;
    std::string key;
    std::size_t count = 0;
    while (in >> key) {
        if (key == "arch") {
            in >> data.arch.n_in >> data.arch.n_hidden >> data.arch.n_out;
        } else if (key == "seed") {
            in >> data.seed;
        } else if (key == "iteration") {
            in >> data.iteration;
        } else if (key == "count") {
            in >> count;
            break;
        } else {
            throw FormatError("unknown checkpoint field '" + key + "'");
        }
    }
    if (count != data.arch.theta_size())
        throw FormatError("checkpoint count does not match architecture");
    in.ignore(1);  // newline before the binary block
    data.theta.resize(count);
    in.read(reinterpret_cast<char*>(data.theta.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw FormatError("checkpoint block truncated: " + path);
    return data;
}

} // namespace svh
