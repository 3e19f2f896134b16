#include "opdyn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <utility>

#include "opdyn/errors.hpp"

namespace opdyn {

namespace {

void validate_checkpoints(const std::vector<std::uint64_t>& cps, std::uint64_t steps) {
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (cps[i] > steps)
            fail(errc::validation_error,
                 "checkpoint " + std::to_string(cps[i]) + " exceeds the step count");
        if (i > 0 && cps[i] <= cps[i - 1])
            fail(errc::validation_error, "checkpoints must be strictly increasing");
    }
}

struct Bounds {
    double lo;
    double hi;
};

Bounds prejudice_bounds(const std::vector<double>& u) {
    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    return {*mn, *mx};
}

void check_bounds(const std::vector<double>& x, const Bounds& b) {
    for (double v : x)
        if (v < b.lo || v > b.hi)
            fail(errc::internal_error, "state " + std::to_string(v) +
                                           " escaped the prejudice interval [" + std::to_string(b.lo) +
                                           ", " + std::to_string(b.hi) + "]");
}

void update_running_mean(std::vector<double>& xbar, const std::vector<double>& x, std::uint64_t k) {
    const double w = 1.0 / static_cast<double>(k + 1);
    for (std::size_t i = 0; i < x.size(); ++i) xbar[i] += (x[i] - xbar[i]) * w;
}

std::uint64_t sample_stride(std::uint64_t steps) {
    return steps <= kFullStorageLimit ? 1 : steps / 1000;
}

}  // namespace

Edge sample_edge(const GossipModel& m, RngStream& rng) {
    const auto& edges = m.graph().edge_list();
    if (m.uniform_edges()) {
        const std::uint64_t k = rng.next_below(edges.size());
        return edges[static_cast<std::size_t>(k)];
    }
    const std::vector<double>& cum = m.cumulative_weights();
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t k = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    return edges[k];
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t steps) {
    if (steps == 0) return {0};
    std::vector<std::uint64_t> cps;
    for (std::uint64_t p = 1; p <= steps;) {
        cps.push_back(p);
        if (p > steps / 10) break;  // also guards the multiplication
        p *= 10;
    }
    if (cps.back() != steps) cps.push_back(steps);
    return cps;
}

Trajectory run_trajectory(const GossipModel& m, std::uint64_t steps, RngStream rng,
                          std::vector<std::uint64_t> checkpoints, const TrajectoryOptions& options) {
    if (checkpoints.empty()) checkpoints = default_checkpoints(steps);
    validate_checkpoints(checkpoints, steps);

    Trajectory t;
    t.steps = steps;
    t.seed = rng.seed();
    t.stream_id = rng.stream_id();
    t.checkpoints = checkpoints;

    const Bounds bounds = prejudice_bounds(m.prejudice());
    const std::uint64_t stride = sample_stride(steps);

    std::vector<double> x = m.prejudice();  // x(0) = u
    std::vector<double> xbar = x;
    std::size_t next_cp = 0;

    const auto visit = [&](std::uint64_t k) {
        const bool at_cp = next_cp < checkpoints.size() && checkpoints[next_cp] == k;
        if (k % stride == 0 || k == steps || at_cp) t.samples.push_back({k, x, xbar});
        if (at_cp) {
            t.checkpoint_time_avg.push_back(xbar);
            ++next_cp;
        }
    };

    visit(0);
    for (std::uint64_t k = 1; k <= steps; ++k) {
        const Edge e = sample_edge(m, rng);
        if (options.record_edges) t.edge_log.push_back(e);
        gossip_step_inplace(m, x, e);
        check_bounds(x, bounds);
        update_running_mean(xbar, x, k);
        visit(k);
    }
    return t;
}

Trajectory run_synchronous(const FJModel& m, std::uint64_t steps,
                           std::vector<std::uint64_t> checkpoints) {
    if (checkpoints.empty()) checkpoints = default_checkpoints(steps);
    validate_checkpoints(checkpoints, steps);

    Trajectory t;
    t.steps = steps;
    t.checkpoints = checkpoints;

    const std::uint64_t stride = sample_stride(steps);
    std::vector<double> x = m.prejudice();
    std::vector<double> xbar = x;
    std::size_t next_cp = 0;

    const auto visit = [&](std::uint64_t k) {
        const bool at_cp = next_cp < checkpoints.size() && checkpoints[next_cp] == k;
        if (k % stride == 0 || k == steps || at_cp) t.samples.push_back({k, x, xbar});
        if (at_cp) {
            t.checkpoint_time_avg.push_back(xbar);
            ++next_cp;
        }
    };

    visit(0);
    for (std::uint64_t k = 1; k <= steps; ++k) {
        x = fj_step(m, x);
        update_running_mean(xbar, x, k);
        visit(k);
    }
    return t;
}

EnsembleStats run_ensemble(const GossipModel& m, std::uint64_t steps, int replicates,
                           std::uint64_t base_seed, std::vector<std::uint64_t> checkpoints,
                           int threads) {
    if (replicates < 1) fail(errc::validation_error, "replicates must be at least 1");
    if (checkpoints.empty()) checkpoints = default_checkpoints(steps);
    validate_checkpoints(checkpoints, steps);

    const std::vector<double> x_star = gossip_fixed_point(m);  // throws when absent
    const Bounds bounds = prejudice_bounds(m.prejudice());
    const std::size_t n_cp = checkpoints.size();

    // Per-replicate squared errors land in their own slots; the reduction
    // below runs in replicate order, so the result does not depend on how
    // replicates were scheduled across threads.
    std::vector<double> sq_err(static_cast<std::size_t>(replicates) * n_cp, 0.0);

    const auto run_replicate = [&](int rep) {
        RngStream rng(base_seed, static_cast<std::uint64_t>(rep));
        std::vector<double> x = m.prejudice();
        std::vector<double> xbar = x;
        std::size_t next_cp = 0;
        const auto record = [&](std::uint64_t k) {
            while (next_cp < n_cp && checkpoints[next_cp] == k) {
                double s = 0.0;
                for (std::size_t i = 0; i < xbar.size(); ++i) {
                    const double d = xbar[i] - x_star[i];
                    s += d * d;
                }
                sq_err[static_cast<std::size_t>(rep) * n_cp + next_cp] = s;
                ++next_cp;
            }
        };
        record(0);
        for (std::uint64_t k = 1; k <= steps; ++k) {
            const Edge e = sample_edge(m, rng);
            gossip_step_inplace(m, x, e);
            check_bounds(x, bounds);
            update_running_mean(xbar, x, k);
            record(k);
        }
    };

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, replicates));
    if (n_threads == 1) {
        for (int rep = 0; rep < replicates; ++rep) run_replicate(rep);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&, w] {
                for (int rep = w; rep < replicates; rep += n_threads) run_replicate(rep);
            });
        for (auto& th : pool) th.join();
    }

    EnsembleStats stats;
    stats.checkpoints = checkpoints;
    stats.replicates = replicates;
    stats.mse.assign(n_cp, 0.0);
    for (int rep = 0; rep < replicates; ++rep)
        for (std::size_t c = 0; c < n_cp; ++c)
            stats.mse[c] += sq_err[static_cast<std::size_t>(rep) * n_cp + c];
    for (double& v : stats.mse) v /= static_cast<double>(replicates);

    // Fit mse ~ C / k^p over the last decade of checkpoints (k >= k_max/10),
    // falling back to the whole schedule when that window is too thin.
    const std::uint64_t k_max = checkpoints.back();
    std::vector<std::size_t> fit_idx;
    for (std::size_t c = 0; c < n_cp; ++c)
        if (checkpoints[c] >= (k_max + 9) / 10 && checkpoints[c] >= 1) fit_idx.push_back(c);
    if (fit_idx.size() < 2) {
        fit_idx.clear();
        for (std::size_t c = 0; c < n_cp; ++c)
            if (checkpoints[c] >= 1) fit_idx.push_back(c);
    }
    bool fittable = fit_idx.size() >= 2;
    for (std::size_t c : fit_idx)
        if (stats.mse[c] <= 0.0) fittable = false;
    if (fittable) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(fit_idx.size());
        for (std::size_t c : fit_idx) {
            const double lx = std::log10(static_cast<double>(stats.checkpoints[c]));
            const double ly = std::log10(stats.mse[c]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double denom = n * sxx - sx * sx;
        if (denom > 0) {
            const double slope = (n * sxy - sx * sy) / denom;
            stats.decay_fit = DecayFit{-slope, (sy - slope * sx) / n};
        }
    }
    return stats;
}

Matrix empirical_expected_matrix(const GossipModel& m, std::uint64_t samples, RngStream& rng,
                                 bool enumerate) {
    const auto n = static_cast<std::size_t>(m.agent_count());
    if (enumerate) {
        Matrix sum(n, n);
        const auto& edges = m.graph().edge_list();
        for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
            const AffinePair p = affine_pair(m, edges[static_cast<std::size_t>(k)]);
            const double w = m.edge_weight(k);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) sum(i, j) += w * p.a(i, j);
        }
        return sum;
    }

    if (samples < 1) fail(errc::validation_error, "sample count must be at least 1");
    Matrix sum(n, n);
    for (std::uint64_t t = 0; t < samples; ++t) {
        const Edge e = sample_edge(m, rng);
        const AffinePair p = affine_pair(m, e);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) sum(i, j) += p.a(i, j);
    }
    const double inv = 1.0 / static_cast<double>(samples);
    return inv * sum;
}

}  // namespace opdyn
