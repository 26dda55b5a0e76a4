#include "svh/problem.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "svh/error.hpp"
#include "svh/expr.hpp"

namespace svh {
namespace {

constexpr double kPi = std::numbers::pi;

double zdt_g_linear(const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    return 1.0 + 9.0 * s / (static_cast<double>(x.size()) - 1.0);
}

Vec zdt1_eval(const Vec& x) {
    const double f1 = x[0];
    const double g = zdt_g_linear(x);
    return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

Vec zdt2_eval(const Vec& x) {
    const double f1 = x[0];
    const double g = zdt_g_linear(x);
    return {f1, g * (1.0 - (f1 / g) * (f1 / g))};
}

Vec zdt3_eval(const Vec& x) {
    const double f1 = x[0];
    const double g = zdt_g_linear(x);
    return {f1, g * (1.0 - std::sqrt(f1 / g) - f1 / g * std::sin(10.0 * kPi * f1))};
}

Vec zdt4_eval(const Vec& x) {
    const double f1 = x[0];
    double g = 1.0 + 10.0 * (static_cast<double>(x.size()) - 1.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        g += x[i] * x[i] - 10.0 * std::cos(4.0 * kPi * x[i]);
    return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

Vec zdt6_eval(const Vec& x) {
    const double s6 = std::sin(6.0 * kPi * x[0]);
    const double f1 = 1.0 - std::exp(-4.0 * x[0]) * s6 * s6 * s6 * s6 * s6 * s6;
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i];
    const double g = 1.0 + 9.0 * std::pow(s / (static_cast<double>(x.size()) - 1.0), 0.75);
    return {f1, g * (1.0 - (f1 / g) * (f1 / g))};
}

Vec vlmop2_eval(const Vec& x) {
    const double c = 1.0 / std::sqrt(static_cast<double>(x.size()));
    double s_minus = 0.0, s_plus = 0.0;
    for (double xi : x) {
        s_minus += (xi - c) * (xi - c);
        s_plus += (xi + c) * (xi + c);
    }
    return {1.0 - std::exp(-s_minus), 1.0 - std::exp(-s_plus)};
}

// Keep the non-dominated subset of a 2-D curve sample; the result is sorted
// by f1 with strictly decreasing f2.
std::vector<Vec> filter_curve(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    std::vector<Vec> kept;
    double best = std::numeric_limits<double>::infinity();
    for (auto& p : pts) {
        if (p[1] < best) {
            best = p[1];
            kept.push_back(std::move(p));
        }
    }
    return kept;
}

std::vector<Vec> resample(const std::vector<Vec>& pts, std::size_t count) {
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = k * (pts.size() - 1) / (count - 1);
        out.push_back(pts[idx]);
    }
    return out;
}

std::vector<Vec> front_zdt1() {
    std::vector<Vec> f(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        const double f1 = static_cast<double>(i) / 999.0;
        f[i] = {f1, 1.0 - std::sqrt(f1)};
    }
    return f;
}

std::vector<Vec> front_zdt2() {
    std::vector<Vec> f(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        const double f1 = static_cast<double>(i) / 999.0;
        f[i] = {f1, 1.0 - f1 * f1};
    }
    return f;
}

std::vector<Vec> front_zdt3() {
    std::vector<Vec> dense(100001);
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double f1 = static_cast<double>(i) / 100000.0;
        dense[i] = {f1, 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * kPi * f1)};
    }
    return resample(filter_curve(std::move(dense)), 1000);
}

std::vector<Vec> front_zdt6() {
    std::vector<Vec> dense;
    dense.reserve(100001);
    for (std::size_t i = 0; i <= 100000; ++i) {
        const double x1 = static_cast<double>(i) / 100000.0;
        const double s6 = std::sin(6.0 * kPi * x1);
        const double f1 = 1.0 - std::exp(-4.0 * x1) * s6 * s6 * s6 * s6 * s6 * s6;
        dense.push_back({f1, 1.0 - f1 * f1});
    }
    return resample(filter_curve(std::move(dense)), 1000);
}

std::vector<Vec> front_vlmop2(int n_var) {
    const double c = 1.0 / std::sqrt(static_cast<double>(n_var));
    std::vector<Vec> f(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        const double t = -c + 2.0 * c * static_cast<double>(i) / 999.0;
        const double n = static_cast<double>(n_var);
        f[i] = {1.0 - std::exp(-n * (t - c) * (t - c)), 1.0 - std::exp(-n * (t + c) * (t + c))};
    }
    return f;
}

struct BuiltinDef {
    const char* id;
    int default_n_var;
    double lo, hi;             // box for all coordinates (zdt4 overrides below)
    Vec (*eval)(const Vec&);
};

constexpr BuiltinDef kBuiltins[] = {
    {"zdt1", 20, 0.0, 1.0, zdt1_eval},
    {"zdt2", 20, 0.0, 1.0, zdt2_eval},
    {"zdt3", 20, 0.0, 1.0, zdt3_eval},
    {"zdt4", 20, -5.0, 5.0, zdt4_eval},
    {"zdt6", 20, 0.0, 1.0, zdt6_eval},
    {"vlmop2", 6, -2.0, 2.0, vlmop2_eval},
};

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_real(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FormatError("expected a real number, got '" + tok + "'", line);
    }
}

void check_box(const Vec& lower, const Vec& upper) {
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i]))
            throw BoundsError("lower bound must be strictly below upper bound at index " +
                              std::to_string(i));
    }
}

} // namespace

Vec Problem::evaluate(const Vec& x) const {
    if (static_cast<int>(x.size()) != n_var)
        throw ArgumentError("evaluate: expected " + std::to_string(n_var) + " variables, got " +
                            std::to_string(x.size()));
    for (int i = 0; i < n_var; ++i) {
        if (!(x[i] >= lower[i]) || !(x[i] <= upper[i]))
            throw BoundsError("decision variable x" + std::to_string(i + 1) + " = " +
                              std::to_string(x[i]) + " outside [" + std::to_string(lower[i]) +
                              ", " + std::to_string(upper[i]) + "]");
    }
    Vec y = objective(x);
    if (static_cast<int>(y.size()) != n_obj)
        throw NumericalError("objective returned " + std::to_string(y.size()) +
                             " values, expected " + std::to_string(n_obj));
    for (int j = 0; j < n_obj; ++j) {
        if (!std::isfinite(y[j]))
            throw NumericalError("objective f" + std::to_string(j + 1) +
                                 " returned a non-finite value");
    }
    return y;
}

Problem make_builtin(const std::string& id, int n_var) {
    for (const auto& def : kBuiltins) {
        if (id != def.id) continue;
        Problem p;
        p.name = def.id;
        p.n_var = n_var > 0 ? n_var : def.default_n_var;
        if (p.n_var < 2)
            throw ArgumentError("builtin problems need n_var >= 2, got " + std::to_string(p.n_var));
        p.n_obj = 2;
        p.lower.assign(p.n_var, def.lo);
        p.upper.assign(p.n_var, def.hi);
        if (id == "zdt4") {  // first coordinate stays in [0,1]
            p.lower[0] = 0.0;
            p.upper[0] = 1.0;
        }
        p.objective = def.eval;
        if (id == "zdt1" || id == "zdt4")
            p.true_front = front_zdt1();
        else if (id == "zdt2")
            p.true_front = front_zdt2();
        else if (id == "zdt3")
            p.true_front = front_zdt3();
        else if (id == "zdt6")
            p.true_front = front_zdt6();
        else
            p.true_front = front_vlmop2(p.n_var);
        return p;
    }
    throw LookupError("unknown builtin problem '" + id + "'");
}

std::vector<std::string> builtin_ids() {
    std::vector<std::string> ids;
    for (const auto& def : kBuiltins) ids.emplace_back(def.id);
    return ids;
}

std::vector<Vec> load_front_file(const std::string& path, int n_obj) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open front file '" + path + "'");
    std::vector<Vec> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (static_cast<int>(toks.size()) != n_obj)
            throw FormatError("expected " + std::to_string(n_obj) + " values, got " +
                              std::to_string(toks.size()), line_no);
        Vec row;
        for (const auto& t : toks) {
            const double v = parse_real(t, line_no);
            if (!std::isfinite(v)) throw FormatError("non-finite front value", line_no);
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("front file '" + path + "' holds no points");
    // The reference front must be mutually non-dominated.
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (i != j && hv::dominates(rows[j], rows[i]))
                throw FormatError("front point " + std::to_string(i + 1) +
                                  " is dominated by point " + std::to_string(j + 1));
        }
    }
    return rows;
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open problem spec '" + path + "'");

    struct Entry {
        std::string value;
        int line;
    };
    std::vector<std::pair<std::string, Entry>> entries;
    std::vector<std::pair<std::string, int>> objective_exprs;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("expected 'key = value'", line_no);
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (value.empty()) throw FormatError("empty value for key '" + key + "'", line_no);

        static const char* known[] = {"name", "n_var", "n_obj", "lower",
                                      "upper", "builtin", "objectives", "front_file"};
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            throw FormatError("unknown key '" + key + "'", line_no);

        if (key == "objectives") {
            std::stringstream ss(value);
            std::string piece;
            while (std::getline(ss, piece, ';')) {
                const std::string ex = strip(piece);
                if (!ex.empty()) objective_exprs.emplace_back(ex, line_no);
            }
            continue;
        }
        for (const auto& [k, v] : entries) {
            if (k == key) throw FormatError("duplicate key '" + key + "'", line_no);
        }
        entries.emplace_back(key, Entry{value, line_no});
    }

    const auto find = [&](const std::string& key) -> const Entry* {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    };

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    if (const Entry* builtin = find("builtin")) {
        for (const char* k : {"lower", "upper", "n_obj"}) {
            if (const Entry* e = find(k))
                throw FormatError(std::string("key '") + k + "' is not allowed with builtin",
                                  e->line);
        }
        if (!objective_exprs.empty())
            throw FormatError("key 'objectives' is not allowed with builtin",
                              objective_exprs.front().second);
        int n_var = 0;
        if (const Entry* e = find("n_var"))
            n_var = static_cast<int>(parse_real(e->value, e->line));
        Problem p = make_builtin(builtin->value, n_var);
        if (const Entry* e = find("name")) p.name = e->value;
        if (const Entry* e = find("front_file"))
            p.true_front = load_front_file(resolve(e->value), p.n_obj);
        return p;
    }

    Problem p;
    const Entry* name = find("name");
    if (!name) throw FormatError("missing required key 'name'");
    p.name = name->value;

    const Entry* nv = find("n_var");
    if (!nv) throw FormatError("missing required key 'n_var'");
    p.n_var = static_cast<int>(parse_real(nv->value, nv->line));
    if (p.n_var < 1) throw FormatError("n_var must be positive", nv->line);

    const Entry* no = find("n_obj");
    if (!no) throw FormatError("missing required key 'n_obj'");
    p.n_obj = static_cast<int>(parse_real(no->value, no->line));
    if (p.n_obj < 2 || p.n_obj > 4)
        throw FormatError("n_obj must be 2, 3 or 4", no->line);

    const auto parse_bound = [&](const char* key) {
        const Entry* e = find(key);
        if (!e) throw FormatError(std::string("missing required key '") + key + "'");
        const auto toks = split_ws(e->value);
        Vec v;
        for (const auto& t : toks) v.push_back(parse_real(t, e->line));
        if (v.size() == 1) v.assign(p.n_var, v[0]);
        if (static_cast<int>(v.size()) != p.n_var)
            throw FormatError(std::string(key) + " needs 1 or n_var values", e->line);
        return v;
    };
    p.lower = parse_bound("lower");
    p.upper = parse_bound("upper");
    check_box(p.lower, p.upper);

    if (static_cast<int>(objective_exprs.size()) != p.n_obj)
        throw FormatError("expected " + std::to_string(p.n_obj) + " objective expressions, got " +
                          std::to_string(objective_exprs.size()));
    auto compiled = std::make_shared<std::vector<expr::Expression>>();
    for (const auto& [text, ln] : objective_exprs) {
        try {
            compiled->push_back(expr::Expression::parse(text, p.n_var));
        } catch (const FormatError& e) {
            throw FormatError(e.what(), ln);
        }
    }
    const int n_obj = p.n_obj;
    p.objective = [compiled, n_obj](const Vec& x) {
        Vec y(n_obj);
        for (int j = 0; j < n_obj; ++j) y[j] = (*compiled)[j].eval(x);
        return y;
    };

    if (const Entry* e = find("front_file"))
        p.true_front = load_front_file(resolve(e->value), p.n_obj);
    return p;
}

double true_front_hv(const Problem& problem, const RefPoint& ref) {
    if (!problem.true_front)
        throw UnsupportedError("problem '" + problem.name + "' has no reference front");
    FrontSet front;
    front.points = *problem.true_front;
    const double volume = hv::hypervolume(front, ref);
    if (!(volume > 0.0))
        throw ArgumentError("reference point excludes the entire front of '" + problem.name + "'");
    return volume;
}

RefPoint default_reference_point(const Problem& problem) {
    if (!problem.true_front)
        throw UnsupportedError("problem '" + problem.name + "' has no reference front");
    const auto& front = *problem.true_front;
    Vec nadir(problem.n_obj, -std::numeric_limits<double>::infinity());
    for (const auto& p : front)
        for (int j = 0; j < problem.n_obj; ++j) nadir[j] = std::max(nadir[j], p[j]);
    for (double& v : nadir) v *= 1.1;
    return RefPoint{nadir};
}

} // namespace svh
