#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "svh/hypervolume.hpp"
#include "svh/linalg.hpp"

namespace svh {

// A black-box vector objective over a box-bounded decision space, with an
// optional reference Pareto front for metric reporting. Evaluation is pure
// and reentrant.
struct Problem {
    std::string name;
    int n_var = 0;
    int n_obj = 0;
    Vec lower;
    Vec upper;
    std::function<Vec(const Vec&)> objective;
    std::optional<std::vector<Vec>> true_front;

    // Bounds-checked evaluation; the result is validated to be a finite
    // vector of length n_obj.
    Vec evaluate(const Vec& x) const;

    bool has_true_front() const { return true_front.has_value(); }
};

// Registered synthetic problems: zdt1 zdt2 zdt3 zdt4 zdt6 (n_var
// configurable, default 20) and vlmop2 (default n_var 6, box [-2,2]^n). Each
// carries an analytic front sampled at 1000 points. n_var == 0 keeps the
// default. Unknown ids raise LookupError.
Problem make_builtin(const std::string& id, int n_var = 0);
std::vector<std::string> builtin_ids();

// Parse a problem-spec file (flat key-value text; see docs/file_formats.md).
// Strict: unknown keys, duplicate keys and malformed values are rejected with
// the offending line number.
Problem load_problem(const std::string& path);

// Reference front file: one objective vector per line, whitespace- or
// comma-separated; '#' comments and blank lines are skipped. Every data row
// must hold exactly n_obj finite reals and rows must be mutually
// non-dominated.
std::vector<Vec> load_front_file(const std::string& path, int n_obj);

// Hypervolume of the problem's reference front. UnsupportedError when the
// problem has no front; ArgumentError when rho excludes the whole front.
double true_front_hv(const Problem& problem, const RefPoint& ref);

// Conventional metric reference point: componentwise nadir of the reference
// front scaled by 1.1.
RefPoint default_reference_point(const Problem& problem);

} // namespace svh
