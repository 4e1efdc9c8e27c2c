#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "precoh/errors.hpp"

namespace precoh {

// Intricate fraction g(x, t) on a uniform grid, in mean-free-path /
// mean-free-time units. When source_on, the face at x = 0 is held fully
// intricate (g = 1).
struct FrontField {
    double grid_spacing = 0.25;
    std::vector<double> values;
    double time = 0.0;
    bool source_on = true;
};

enum class KppMode { free_boundary, moving_boundary };

FrontField make_front_field(double x_max, double grid_spacing, bool source_on = true);

// One explicit Euler step of dg/dt = (1/2) g'' + g(1 - g). Stability
// requires dt <= grid_spacing^2 (diffusion coefficient 1/2). In
// moving_boundary mode g is forced to zero ahead of x = t.
FrontField kpp_step(const FrontField& field, double dt, KppMode mode);

// Position of the g = level crossing, linearly interpolated; throws
// FrontNotFormed when the profile never reaches the level.
double front_position(const FrontField& field, double level = 0.5);

// Least-squares slope of the half-level front position against time over
// samples with t > transient.
double front_speed(const std::vector<FrontField>& history, double transient = 20.0,
                   std::size_t min_samples = 20);

double field_mass(const FrontField& field);

// Walker population on integer planes. Physical plane spacing is
// 3^{-1/2} lambda; the walk itself is unit-spaced and the factor is kept
// only for unit conversion.
struct WalkPopulation {
    std::map<std::int64_t, std::int64_t> occupancy;
    int step = 0;

    std::int64_t total() const;
    std::int64_t front_position() const;  // largest occupied plane
};

inline constexpr double kWalkPlaneSpacingFactor = 0.5773502691896258;  // 3^{-1/2}

WalkPopulation make_walk(std::int64_t walkers_at_origin);

// Every walker duplicates into two copies at +-1 per step. Once the total
// population exceeds cap, per-site occupancy is truncated at site_cap
// (local saturation: all local atoms intricate).
std::vector<WalkPopulation> duplication_walk(const WalkPopulation& initial, int n_steps,
                                             std::int64_t cap, std::uint64_t seed,
                                             std::int64_t site_cap = 16);

// Fitted exponential rate of a positive series over [begin, end). Throws
// WindowSaturated when the log-series curvature exceeds 10% of the fitted
// rate (the window has left the exponential regime).
double growth_rate(const std::vector<double>& times, const std::vector<double>& totals,
                   std::size_t begin, std::size_t end);

}  // namespace precoh
