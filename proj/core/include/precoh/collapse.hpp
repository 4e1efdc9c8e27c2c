#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "precoh/errors.hpp"
#include "precoh/rng.hpp"

namespace precoh {

// Channel probabilities on the simplex. A channel absorbed at 0 (or the
// surviving winner at 1) is frozen and never changes again.
struct SimplexState {
    Eigen::VectorXd p;
    std::vector<bool> frozen;
    double time = 0.0;

    int channels() const { return static_cast<int>(p.size()); }
    int unfrozen_count() const;
    // Index of the winning channel (p exactly 1, everything else frozen
    // at 0), or -1 while the race is still running.
    int winner() const;
};

SimplexState make_simplex(const Eigen::VectorXd& p0);

// Per-step fluctuation covariance: diagonal p_j(1-p_j) dt/tau_c,
// off-diagonal -p_j p_j' dt/tau_c. Rows sum to zero (sum of dp vanishes)
// and the matrix is PSD on the sum-zero subspace.
Eigen::MatrixXd covariance_matrix(const Eigen::VectorXd& p, double dt, double tau_c);

// One Brownian step restricted to unfrozen channels. Channels pushed below
// zero are clamped to 0 and frozen, with the deficit removed proportionally
// from the remaining positive unfrozen channels.
SimplexState step(const SimplexState& state, double dt, double tau_c, Rng& rng);

struct CollapseOutcome {
    int winner = -1;  // -1 when max_steps was exceeded
    double collapse_time = 0.0;
    long path_length = 0;
    bool max_steps_exceeded = false;
};

inline constexpr long kDefaultMaxSteps = 10'000'000;

CollapseOutcome run_to_collapse(const Eigen::VectorXd& p0, double dt, double tau_c, Rng& rng,
                                long max_steps = kDefaultMaxSteps);

struct EnsembleStats {
    long trials = 0;
    long exceeded = 0;  // trials that hit max_steps, excluded from the stats
    Eigen::VectorXd win_frequency;
    double mean_collapse_time = 0.0;
    // Covariance of the first step of each trial, taken at p0.
    Eigen::MatrixXd empirical_step_covariance;
};

// Independent trials with per-trial seeds derived from the master seed by
// counter; deterministic and order-independent.
EnsembleStats ensemble(const Eigen::VectorXd& p0, double dt, double tau_c, long trials,
                       std::uint64_t seed, long max_steps = kDefaultMaxSteps);

// Covariance of single steps sampled at a fixed p.
Eigen::MatrixXd single_step_covariance(const Eigen::VectorXd& p0, double dt, double tau_c,
                                       long samples, std::uint64_t seed);

// Exhaustive two-channel branching tree: every step splits each history in
// two, moving p1 by +-sqrt(p1 p2 dt/tau_c) evaluated at the current p and
// clamped to [0, 1]. 2^n terminal values with equal path weights.
struct HistoryDistribution {
    std::vector<double> values;   // sorted ascending
    std::vector<double> weights;  // matching order, sum 1
    double mean = 0.0;
};

inline constexpr int kMaxEnumerationSteps = 20;

HistoryDistribution enumerate_histories(double p1_initial, int n_steps, double dt_over_tau_c);

// Kolmogorov-Smirnov sup distance between a discrete distribution and a
// sample set.
double ks_distance(const HistoryDistribution& dist, std::vector<double> samples);

}  // namespace precoh
