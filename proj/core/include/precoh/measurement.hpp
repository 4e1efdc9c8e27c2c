#pragma once

#include <optional>
#include <string>
#include <vector>

#include "precoh/collapse.hpp"
#include "precoh/errors.hpp"

namespace precoh {

enum class DepositionProfile { uniform, bragg_like };

// Track geometry and the derived cell/intricon counts feeding the
// collapse-timescale estimate. CGS-style units: energies in eV, lengths in
// cm, times in seconds.
struct TrackModel {
    double energy_eV = 0.0;        // particle energy E
    double excitation_eV = 0.0;    // mean excitation energy per exciton e
    double length_cm = 0.0;        // track length L
    double cell_width_cm = 0.0;    // cell width Lambda
    double mfp_cm = 0.0;           // atomic mean free path lambda
    double mean_free_time_s = 0.0; // atomic mean free time tau
    DepositionProfile profile = DepositionProfile::uniform;
    double bragg_exponent = 0.5;   // s in n(x) ~ (1 - x/L)^(-s), 0 <= s < 1

    double n_total = 0.0;               // E/e
    int n_cells = 0;                    // ceil(L/Lambda)
    std::vector<double> cell_counts;    // n_beta per cell, sums to n_total
    double inverse_cell_sum = 0.0;      // sum over cells of 1/n_beta
};

// Collisions per unit time on a box of area S in a gas of density n_M and
// mean molecular speed v_M.
double collision_rate(double n_M_per_cm3, double v_M_cm_per_s, double area_cm2);

TrackModel build_track(double energy_eV, double excitation_eV, double length_cm,
                       double cell_width_cm, double mfp_cm, double mean_free_time_s,
                       DepositionProfile profile = DepositionProfile::uniform,
                       double bragg_exponent = 0.5);

// Exact channel-probability change from a signed change dn1 in the channel-1
// intricon count, with the first-order approximation p2 dn1 / n alongside.
struct DeltaP1 {
    double exact = 0.0;
    double approx = 0.0;
    double difference = 0.0;
};

DeltaP1 delta_p1(double n1, double n, double dn1);

// Per-step variance of p1: p1 (1-p1) (dt/tau) sum_beta 1/n_beta, using the
// track's per-cell counts (both channels' fluctuations symmetrized).
double variance_per_step(const TrackModel& track, double p1, double dt);

// tau_c such that <dp1^2> = p1 p2 dt/tau_c: tau / sum_beta 1/n_beta, equal
// to tau n_beta / N(beta) for uniform cells.
double collapse_timescale(const TrackModel& track);

// Order-of-magnitude comparison against the 1e-11 s scale the estimate is
// supposed to produce; discrepancy_note is nonempty when the computed value
// is more than a decade away from the target.
struct TimescaleReport {
    double tau_c_seconds = 0.0;
    double target_seconds = 1e-11;
    double ratio = 0.0;
    std::string discrepancy_note;
};

TimescaleReport timescale_report(const TrackModel& track, double target_seconds = 1e-11);

enum class ScenarioKind { geiger_case1, geiger_case2, stern_gerlach, cat_tracks };

// A named measurement setup: channel probabilities plus, per channel, the
// track driving its cell counts. A channel without a track has no detector
// interaction of its own; a mute channel is a logically excluded joint
// outcome pinned at probability 0.
struct Scenario {
    std::string name;
    Eigen::VectorXd channels;
    std::vector<bool> mute;
    std::vector<std::optional<TrackModel>> tracks;
    bool spherical_cells = false;
};

struct ScenarioParams {
    double p1 = 0.5;
    std::vector<double> weights;  // cat_tracks only
    TrackModel track;             // template track applied to detecting channels
};

TrackModel default_track();

Scenario make_scenario(ScenarioKind kind, const ScenarioParams& params);

// Collapse timescale of a scenario: the fluctuation rates 1/tau_c of every
// tracked channel add (cell counts pooled across tracks).
double pooled_timescale(const Scenario& scenario);

struct ScenarioResult {
    EnsembleStats stats;
    double tau_c_seconds = 0.0;
};

// Computes tau_c from the scenario's tracks (cell counts pooled across all
// tracked channels) and runs the collapse ensemble with the physical step
// dt_seconds.
ScenarioResult run_scenario(const Scenario& scenario, double dt_seconds, long trials,
                            std::uint64_t seed, long max_steps = kDefaultMaxSteps);

}  // namespace precoh
