#include "vidmine/graph_shift.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace vidmine {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

std::vector<double> normalized_position(const Region& r, FrameSize frame) {
    double w = frame.width > 0 ? frame.width : 1.0;
    double h = frame.height > 0 ? frame.height : 1.0;
    return {r.box.cx / w, r.box.cy / h, r.box.w / w, r.box.h / h};
}

}  // namespace

std::pair<double, double> empirical_variances(const std::vector<Region>& regions,
                                              FrameSize frame) {
    double sum_feat = 0.0;
    double sum_pos = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        std::vector<double> pi = normalized_position(regions[i], frame);
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            if (regions[i].frame_id == regions[j].frame_id) continue;
            sum_feat += squared_distance(regions[i].feature.values, regions[j].feature.values);
            sum_pos += squared_distance(pi, normalized_position(regions[j], frame));
            ++pairs;
        }
    }
    if (pairs == 0) return {1.0, 1.0};
    double d1 = std::max(sum_feat / static_cast<double>(pairs), 1e-12);
    double d2 = std::max(sum_pos / static_cast<double>(pairs), 1e-12);
    return {d1, d2};
}

AffinityGraph build_affinity(const std::vector<Region>& regions, const AffinityParams& params,
                             FrameSize frame, int seed_index) {
    if (params.appearance_variance <= 0.0 || params.position_variance <= 0.0)
        throw std::invalid_argument("affinity variances must be positive");
    if (seed_index < 0 || seed_index >= static_cast<int>(regions.size()))
        throw std::out_of_range("seed index outside region list");

    AffinityGraph g;
    g.n = static_cast<int>(regions.size());
    g.a.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    g.region_index.resize(regions.size());
    g.seed_row = seed_index;

    std::vector<std::vector<double>> pos(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        pos[i] = normalized_position(regions[i], frame);
        g.region_index[i] = {regions[i].frame_id, static_cast<int>(i)};
    }

    for (int i = 0; i < g.n; ++i) {
        g.at(i, i) = regions[i].score > params.detect_floor ? 1.0 : 0.0;
        for (int j = i + 1; j < g.n; ++j) {
            if (regions[i].frame_id == regions[j].frame_id) continue;
            double df = squared_distance(regions[i].feature.values, regions[j].feature.values);
            double dp = squared_distance(pos[i], pos[j]);
            double v = std::exp(-df / params.appearance_variance) +
                       params.alpha * std::exp(-dp / params.position_variance);
            g.at(i, j) = v;
            g.at(j, i) = v;
        }
    }
    return g;
}

double graph_density(const AffinityGraph& graph, const std::vector<double>& y) {
    if (static_cast<int>(y.size()) != graph.n)
        throw std::invalid_argument("density argument size mismatch");
    double d = 0.0;
    for (int i = 0; i < graph.n; ++i) {
        double row = 0.0;
        const double* a = graph.a.data() + static_cast<std::size_t>(i) * graph.n;
        for (int j = 0; j < graph.n; ++j) row += a[j] * y[j];
        d += y[i] * row;
    }
    return d;
}

GraphMode graph_shift_mode(const AffinityGraph& graph, int start_row, double tol, int max_iter,
                           double support_eps) {
    if (start_row < 0 || start_row >= graph.n)
        throw std::out_of_range("start row outside graph");

    GraphMode mode;
    int n = graph.n;
    std::vector<double> y(n, 0.1 / n);
    y[start_row] += 0.9;

    // The dynamics concentrate y onto a small support within a few hundred
    // steps; entries below ~1e-15 of the peak contribute less than float
    // noise to A·y, so the matvec only visits columns that still carry mass.
    std::vector<double> ay(n, 0.0);
    std::vector<int> active(n);
    auto apply = [&](const std::vector<double>& v) {
        double peak = 0.0;
        for (int j = 0; j < n; ++j) peak = std::max(peak, v[j]);
        const double cutoff = 1e-15 * peak;
        active.clear();
        for (int j = 0; j < n; ++j)
            if (v[j] > cutoff) active.push_back(j);
        if (static_cast<int>(active.size()) == n) {
            for (int i = 0; i < n; ++i) {
                const double* a = graph.a.data() + static_cast<std::size_t>(i) * n;
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += a[j] * v[j];
                ay[i] = s;
            }
            return;
        }
        // A is symmetric, so summing scaled rows gives A·v while keeping the
        // memory accesses sequential.
        std::fill(ay.begin(), ay.end(), 0.0);
        for (int j : active) {
            const double* a = graph.a.data() + static_cast<std::size_t>(j) * n;
            const double w = v[j];
            for (int i = 0; i < n; ++i) ay[i] += a[i] * w;
        }
    };

    apply(y);
    double density = 0.0;
    for (int i = 0; i < n; ++i) density += y[i] * ay[i];
    if (density <= 0.0) {
        // The start point sees no mass at all. Report the bare seed so the
        // caller can discard the video instead of dividing by zero.
        mode.y.assign(n, 0.0);
        mode.y[start_row] = 1.0;
        mode.support = {start_row};
        mode.density = 0.0;
        mode.degenerate = true;
        return mode;
    }

    auto mode_conditions_hold = [&](double slack) {
        double peak = *std::max_element(y.begin(), y.end());
        double floor = support_eps * peak;
        for (int i = 0; i < n; ++i) {
            if (y[i] > floor) {
                if (std::abs(ay[i] - density) > slack) return false;
            } else if (ay[i] > density + slack) {
                return false;
            }
        }
        return true;
    };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        double change = 0.0;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double next = y[i] * ay[i] / density;
            change = std::max(change, std::abs(next - y[i]));
            y[i] = next;
            sum += next;
        }
        for (int i = 0; i < n; ++i) y[i] /= sum;
        apply(y);
        density = 0.0;
        for (int i = 0; i < n; ++i) density += y[i] * ay[i];
        if (change < tol && mode_conditions_hold(10.0 * tol)) {
            ++iter;
            break;
        }
    }

    mode.y = y;
    mode.density = density;
    mode.iterations = iter;
    double peak = *std::max_element(y.begin(), y.end());
    for (int i = 0; i < n; ++i)
        if (y[i] > support_eps * peak) mode.support.push_back(i);
    if (mode.support.empty()) mode.support.push_back(start_row);
    return mode;
}

std::vector<int> select_tracked_instances(const AffinityGraph& graph, const GraphMode& mode,
                                          int count) {
    bool seed_in_support =
        std::find(mode.support.begin(), mode.support.end(), graph.seed_row) != mode.support.end();
    if (!seed_in_support || graph.seed_row < 0) return {};

    int seed_frame = graph.region_index[graph.seed_row].first;
    std::vector<int> candidates;
    for (int row : mode.support) {
        if (row == graph.seed_row) continue;
        if (graph.region_index[row].first == seed_frame) continue;
        candidates.push_back(row);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
        double aa = graph.at(graph.seed_row, a);
        double ab = graph.at(graph.seed_row, b);
        if (aa != ab) return aa > ab;
        return a < b;
    });

    std::vector<int> picked;
    std::vector<int> used_frames;
    for (int row : candidates) {
        if (static_cast<int>(picked.size()) >= count) break;
        int frame = graph.region_index[row].first;
        if (std::find(used_frames.begin(), used_frames.end(), frame) != used_frames.end()) continue;
        picked.push_back(row);
        used_frames.push_back(frame);
    }
    return picked;
}

}  // namespace vidmine
