#pragma once

#include <cstddef>
#include <vector>

#include "svh/linalg.hpp"

namespace svh {

// Objective vectors that are mutually non-dominated (minimization).
struct FrontSet {
    std::vector<Vec> points;
};

struct RefPoint {
    Vec rho;
};

namespace hv {

// a ≺ b: a no worse everywhere, strictly better somewhere.
bool dominates(const Vec& a, const Vec& b);

// Maximal non-dominated subset; duplicates collapse to one representative.
FrontSet non_dominated(const std::vector<Vec>& points);

// Exact hypervolume for m in {2,3}. Points with any coordinate >= rho are
// clipped out first; an empty effective front yields 0.
double hypervolume(const FrontSet& front, const RefPoint& rho);

// HV(front ∪ candidates) - HV(front); never negative.
double improvement(const std::vector<Vec>& candidate_fs, const FrontSet& current, const RefPoint& rho);

// Sequential greedy pick of `b` candidates maximizing incremental improvement
// against current ∪ already-picked. Ties break to the lowest candidate index;
// once every remaining candidate adds zero, fill by the largest minimum
// objective-space distance to the picks so far. Returns candidate indices in
// pick order.
std::vector<std::size_t> greedy_select(const std::vector<Vec>& candidate_fs, const FrontSet& current,
                                       const RefPoint& rho, std::size_t b);

} // namespace hv
} // namespace svh
