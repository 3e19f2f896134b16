#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opdyn/model.hpp"
#include "opdyn/rng.hpp"

namespace opdyn {

/// Draws one directed edge from the model's sampling law: unbiased bounded
/// rejection over the canonical edge list in the uniform case, inverse CDF
/// over the cumulative weights otherwise. Advances the stream.
Edge sample_edge(const GossipModel& m, RngStream& rng);

struct TrajectorySample {
    std::uint64_t step = 0;
    std::vector<double> state;     // x(step)
    std::vector<double> time_avg;  // running mean of x(0..step)
};

struct Trajectory {
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    /// Stored (k, x, xbar) rows: every step for short runs, otherwise
    /// decimated to ~1000 rows; the final step is always stored. The time
    /// average itself is maintained exactly at every step regardless.
    std::vector<TrajectorySample> samples;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::vector<double>> checkpoint_time_avg;  // exact xbar at each checkpoint
    std::vector<Edge> edge_log;                            // filled only when requested
};

struct TrajectoryOptions {
    bool record_edges = false;
};

/// Steps at which full per-step storage gives way to decimation.
inline constexpr std::uint64_t kFullStorageLimit = 10'000;

/// Powers of ten up to `steps`, plus `steps` itself ({0} when steps == 0).
std::vector<std::uint64_t> default_checkpoints(std::uint64_t steps);

/// Runs the randomized dynamics for `steps` edge draws starting from
/// x(0) = u, maintaining the running time average incrementally as
/// xbar(k) = xbar(k-1) + (x(k) - xbar(k-1)) / (k+1). Every visited state is
/// checked against the prejudice bounds (a hard invariant, not sampled).
/// Checkpoints default to default_checkpoints(steps).
Trajectory run_trajectory(const GossipModel& m, std::uint64_t steps, RngStream rng,
                          std::vector<std::uint64_t> checkpoints = {},
                          const TrajectoryOptions& options = {});

/// Deterministic synchronous iteration of the FJ model with the same
/// storage and time-average bookkeeping (no randomness; seed fields zero).
Trajectory run_synchronous(const FJModel& m, std::uint64_t steps,
                           std::vector<std::uint64_t> checkpoints = {});

struct DecayFit {
    double exponent = 0.0;         // p in mse ~ C / k^p
    double log10_constant = 0.0;   // log10 C
};

struct EnsembleStats {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> mse;  // (1/M) sum over replicates of ||xbar(k) - x*||_2^2
    int replicates = 0;
    /// Least-squares fit of log10 mse against log10 k over the last decade
    /// of checkpoints; absent when any selected mse vanishes or fewer than
    /// two checkpoints qualify.
    std::optional<DecayFit> decay_fit;
};

/// Runs `replicates` independent trajectories on streams
/// (base_seed, 0), (base_seed, 1), ... and aggregates the squared
/// time-average error against the fixed point at each checkpoint.
/// Replicates run in parallel; aggregation is by replicate index, so the
/// result is independent of scheduling. Throws AssumptionViolated when the
/// model has no fixed point. threads = 0 picks the hardware default.
EnsembleStats run_ensemble(const GossipModel& m, std::uint64_t steps, int replicates,
                           std::uint64_t base_seed, std::vector<std::uint64_t> checkpoints = {},
                           int threads = 0);

/// Monte Carlo mean of the A matrices of `samples` sampled edges, for
/// validating the sampler against the analytic expectation. With
/// enumerate = true, returns the exact edge-weighted sum instead (the rng
/// is left untouched).
Matrix empirical_expected_matrix(const GossipModel& m, std::uint64_t samples, RngStream& rng,
                                 bool enumerate = false);

}  // namespace opdyn
