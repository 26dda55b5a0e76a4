#include "svh/hypervolume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svh/error.hpp"

namespace svh::hv {
namespace {

// Keep only points strictly dominating rho.
std::vector<Vec> clip(const std::vector<Vec>& points, const Vec& rho) {
    std::vector<Vec> kept;
    kept.reserve(points.size());
    for (const auto& p : points) {
        bool inside = true;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (!(p[i] < rho[i])) {
                inside = false;
                break;
            }
        }
        if (inside) kept.push_back(p);
    }
    return kept;
}

// Staircase sweep; tolerates dominated/duplicate input points.
double hv2(std::vector<Vec> pts, const Vec& rho) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    double volume = 0.0;
    double level = rho[1];
    for (const auto& p : pts) {
        if (p[1] < level) {
            volume += (rho[0] - p[0]) * (level - p[1]);
            level = p[1];
        }
    }
    return volume;
}

// Sweep over the third axis, integrating the 2-D staircase area of the
// projected points between successive z-events.
double hv3(std::vector<Vec> pts, const Vec& rho) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) { return a[2] < b[2]; });
    const Vec rho2{rho[0], rho[1]};
    double volume = 0.0;
    std::vector<Vec> slab;
    std::size_t i = 0;
    double z_prev = 0.0;
    bool open = false;
    while (i < pts.size()) {
        const double z = pts[i][2];
        if (open && z > z_prev) volume += hv2(slab, rho2) * (z - z_prev);
        while (i < pts.size() && pts[i][2] == z) {
            slab.push_back({pts[i][0], pts[i][1]});
            ++i;
        }
        z_prev = z;
        open = true;
    }
    if (open) volume += hv2(slab, rho2) * (rho[2] - z_prev);
    return volume;
}

} // namespace

bool dominates(const Vec& a, const Vec& b) {
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

FrontSet non_dominated(const std::vector<Vec>& points) {
    FrontSet front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < points.size() && keep; ++j) {
            if (j != i && dominates(points[j], points[i])) keep = false;
        }
        if (!keep) continue;
        // Collapse duplicates to the first occurrence.
        bool duplicate = false;
        for (const auto& q : front.points) {
            if (q == points[i]) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) front.points.push_back(points[i]);
    }
    return front;
}

double hypervolume(const FrontSet& front, const RefPoint& ref) {
    const std::size_t m = ref.rho.size();
    auto pts = clip(front.points, ref.rho);
    if (pts.empty()) return 0.0;
    if (m == 2) return hv2(std::move(pts), ref.rho);
    if (m == 3) return hv3(std::move(pts), ref.rho);
    throw UnsupportedError("exact hypervolume supports 2 or 3 objectives, got m=" + std::to_string(m));
}

double improvement(const std::vector<Vec>& candidate_fs, const FrontSet& current, const RefPoint& rho) {
    std::vector<Vec> merged = current.points;
    merged.insert(merged.end(), candidate_fs.begin(), candidate_fs.end());
    FrontSet merged_front;
    merged_front.points = std::move(merged);  // hypervolume() tolerates dominated points
    const double with = hypervolume(merged_front, rho);
    const double without = hypervolume(current, rho);
    return std::max(0.0, with - without);
}

std::vector<std::size_t> greedy_select(const std::vector<Vec>& candidate_fs, const FrontSet& current,
                                       const RefPoint& rho, std::size_t b) {
    const std::size_t n = candidate_fs.size();
    if (b > n)
        throw ArgumentError("greedy_select: batch size " + std::to_string(b) +
                            " exceeds candidate count " + std::to_string(n));

    std::vector<std::size_t> picks;
    std::vector<bool> taken(n, false);
    std::vector<Vec> union_points = current.points;
    FrontSet union_front;

    for (std::size_t round = 0; round < b; ++round) {
        union_front.points = union_points;
        const double base = hypervolume(union_front, rho);

        double best_gain = 0.0;
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            FrontSet trial;
            trial.points = union_points;
            trial.points.push_back(candidate_fs[i]);
            const double gain = hypervolume(trial, rho) - base;
            // Strictly-greater with a relative tolerance keeps the lowest
            // index on ties without fp-noise flakiness.
            if (gain > best_gain * (1.0 + 1e-12) + 1e-300) {
                best_gain = gain;
                best = i;
            }
        }

        if (best == n) {
            // All remaining candidates add nothing: diversity fill by the
            // largest minimum distance to what was already chosen (falling
            // back to the current front, then to the lowest index).
            const std::vector<Vec>* anchors = nullptr;
            std::vector<Vec> picked_fs;
            for (std::size_t p : picks) picked_fs.push_back(candidate_fs[p]);
            if (!picked_fs.empty())
                anchors = &picked_fs;
            else if (!current.points.empty())
                anchors = &current.points;

            double best_dist = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                double dist = 0.0;
                if (anchors) {
                    dist = std::numeric_limits<double>::infinity();
                    for (const auto& a : *anchors) {
                        double d2 = 0.0;
                        for (std::size_t k = 0; k < a.size(); ++k) {
                            const double d = a[k] - candidate_fs[i][k];
                            d2 += d * d;
                        }
                        dist = std::min(dist, d2);
                    }
                }
                if (dist > best_dist * (1.0 + 1e-12) + 1e-300) {
                    best_dist = dist;
                    best = i;
                }
            }
            if (best == n) {  // anchors empty and all distances zero
                for (std::size_t i = 0; i < n; ++i) {
                    if (!taken[i]) {
                        best = i;
                        break;
                    }
                }
            }
        }

        taken[best] = true;
        picks.push_back(best);
        union_points.push_back(candidate_fs[best]);
    }
    return picks;
}

} // namespace svh::hv
