#include "precoh/measurement.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace precoh {

double collision_rate(double n_M_per_cm3, double v_M_cm_per_s, double area_cm2) {
    if (n_M_per_cm3 <= 0 || v_M_cm_per_s <= 0 || area_cm2 <= 0)
        throw BadParams("collision_rate: density, speed and area must be positive");
    return n_M_per_cm3 * v_M_cm_per_s * area_cm2;
}

TrackModel build_track(double energy_eV, double excitation_eV, double length_cm,
                       double cell_width_cm, double mfp_cm, double mean_free_time_s,
                       DepositionProfile profile, double bragg_exponent) {
    if (energy_eV <= 0 || excitation_eV <= 0 || length_cm <= 0 || cell_width_cm <= 0 ||
        mfp_cm <= 0 || mean_free_time_s <= 0)
        throw BadParams("build_track: all physical parameters must be positive");
    if (cell_width_cm < mfp_cm)
        throw CellNarrowerThanMFP("build_track: cell width below the mean free path");
    if (profile == DepositionProfile::bragg_like &&
        (bragg_exponent < 0.0 || bragg_exponent >= 1.0))
        throw BadParams("build_track: bragg exponent must lie in [0, 1)");

    TrackModel t;
    t.energy_eV = energy_eV;
    t.excitation_eV = excitation_eV;
    t.length_cm = length_cm;
    t.cell_width_cm = cell_width_cm;
    t.mfp_cm = mfp_cm;
    t.mean_free_time_s = mean_free_time_s;
    t.profile = profile;
    t.bragg_exponent = bragg_exponent;

    t.n_total = energy_eV / excitation_eV;
    t.n_cells = static_cast<int>(std::ceil(length_cm / cell_width_cm));

    t.cell_counts.resize(static_cast<std::size_t>(t.n_cells));
    if (profile == DepositionProfile::uniform) {
        const double per_cell = t.n_total / t.n_cells;
        for (double& c : t.cell_counts) c = per_cell;
    } else {
        // n(x) ~ (1 - x/L)^(-s): integrate exactly over each cell and
        // normalize the total deposition to n_total.
        const double s = bragg_exponent;
        const double L = length_cm;
        std::vector<double> raw(t.cell_counts.size());
        double sum = 0.0;
        for (int i = 0; i < t.n_cells; ++i) {
            const double a = std::min(i * cell_width_cm, L);
            const double b = std::min((i + 1) * cell_width_cm, L);
            const double fa = std::pow(1.0 - a / L, 1.0 - s);
            const double fb = std::pow(1.0 - b / L, 1.0 - s);
            raw[static_cast<std::size_t>(i)] = L / (1.0 - s) * (fa - fb);
            sum += raw[static_cast<std::size_t>(i)];
        }
        for (std::size_t i = 0; i < raw.size(); ++i)
            t.cell_counts[i] = t.n_total * raw[i] / sum;
    }

    t.inverse_cell_sum = 0.0;
    for (double c : t.cell_counts) {
        if (c <= 0) throw BadParams("build_track: empty cell in deposition profile");
        t.inverse_cell_sum += 1.0 / c;
    }
    return t;
}

DeltaP1 delta_p1(double n1, double n, double dn1) {
    if (n <= 0 || n1 < 0 || n1 > n)
        throw DomainError("delta_p1: need 0 <= n1 <= n with n > 0");
    if (n + dn1 <= 0)
        throw DomainError("delta_p1: change empties the population");
    if (n1 + dn1 < 0)
        throw DomainError("delta_p1: change drives the channel count negative");
    DeltaP1 d;
    d.exact = (n1 + dn1) / (n + dn1) - n1 / n;
    d.approx = (1.0 - n1 / n) * dn1 / n;
    d.difference = d.exact - d.approx;
    return d;
}

double variance_per_step(const TrackModel& track, double p1, double dt) {
    if (p1 < 0 || p1 > 1) throw DomainError("variance_per_step: p1 outside [0, 1]");
    if (dt <= 0) throw DomainError("variance_per_step: dt must be positive");
    if (dt > track.mean_free_time_s)
        throw DomainError("variance_per_step: dt exceeds the mean free time");
    // Evaluate the p1*p2 factor through the larger of the pair so that
    // p1 <-> 1-p1 gives a bit-identical product (1-(1-p) can differ from p
    // by an ulp; the larger channel probability is insensitive to that).
    const double hi = std::max(p1, 1.0 - p1);
    return hi * (1.0 - hi) * (dt / track.mean_free_time_s) * track.inverse_cell_sum;
}

double collapse_timescale(const TrackModel& track) {
    if (track.inverse_cell_sum <= 0)
        throw BadParams("collapse_timescale: track has no cells");
    return track.mean_free_time_s / track.inverse_cell_sum;
}

TimescaleReport timescale_report(const TrackModel& track, double target_seconds) {
    if (target_seconds <= 0) throw BadParams("timescale_report: target must be positive");
    TimescaleReport r;
    r.tau_c_seconds = collapse_timescale(track);
    r.target_seconds = target_seconds;
    r.ratio = r.tau_c_seconds / target_seconds;
    if (r.ratio < 0.1 || r.ratio > 10.0) {
        std::ostringstream note;
        note << "computed tau_c = " << r.tau_c_seconds << " s is "
             << (r.ratio < 1.0 ? 1.0 / r.ratio : r.ratio)
             << "x " << (r.ratio < 1.0 ? "below" : "above")
             << " the " << target_seconds
             << " s target; the order-of-magnitude estimate is sensitive to the "
                "assumed cell width, excitation energy and mean free time";
        r.discrepancy_note = note.str();
    }
    return r;
}

TrackModel default_track() {
    // Nominal fast-particle track in a gas-filled detector: 1 MeV deposited
    // at 30 eV per exciton over 10 cm, 1 mm cells, 1e-5 cm mean free path,
    // 1e-10 s mean free time.
    return build_track(1e6, 30.0, 10.0, 0.1, 1e-5, 1e-10);
}

Scenario make_scenario(ScenarioKind kind, const ScenarioParams& params) {
    if (params.p1 < 0 || params.p1 > 1)
        throw BadParams("make_scenario: p1 outside [0, 1]");
    Scenario sc;
    switch (kind) {
        case ScenarioKind::geiger_case1: {
            // Detection channel fires a track; the pass-through channel
            // leaves the counter untouched (no track of its own).
            sc.name = "geiger_case1";
            sc.channels = Eigen::VectorXd(2);
            sc.channels << params.p1, 1.0 - params.p1;
            sc.mute = {false, false};
            sc.tracks = {params.track, std::nullopt};
            break;
        }
        case ScenarioKind::geiger_case2: {
            // Both outcomes register somewhere: each channel drives its own
            // track.
            sc.name = "geiger_case2";
            sc.channels = Eigen::VectorXd(2);
            sc.channels << params.p1, 1.0 - params.p1;
            sc.mute = {false, false};
            sc.tracks = {params.track, params.track};
            break;
        }
        case ScenarioKind::stern_gerlach: {
            // Joint spin/detector outcomes: (up, up-counter) and
            // (down, down-counter) are live; the cross outcomes are mute.
            sc.name = "stern_gerlach";
            sc.channels = Eigen::VectorXd(4);
            sc.channels << params.p1, 1.0 - params.p1, 0.0, 0.0;
            sc.mute = {false, false, true, true};
            sc.tracks = {params.track, params.track, std::nullopt, std::nullopt};
            break;
        }
        case ScenarioKind::cat_tracks: {
            if (params.weights.size() < 2)
                throw BadParams("make_scenario: cat_tracks needs at least two weights");
            double sum = 0.0;
            for (double w : params.weights) {
                if (w < 0) throw BadParams("make_scenario: negative weight");
                sum += w;
            }
            if (sum <= 0) throw BadParams("make_scenario: weights sum to zero");
            sc.name = "cat_tracks";
            sc.channels = Eigen::VectorXd(static_cast<Eigen::Index>(params.weights.size()));
            sc.mute.assign(params.weights.size(), false);
            sc.tracks.assign(params.weights.size(), params.track);
            for (std::size_t i = 0; i < params.weights.size(); ++i)
                sc.channels[static_cast<Eigen::Index>(i)] = params.weights[i] / sum;
            sc.spherical_cells = true;
            break;
        }
    }
    return sc;
}

double pooled_timescale(const Scenario& scenario) {
    double rate_sum = 0.0;
    int tracked = 0;
    for (const auto& t : scenario.tracks) {
        if (!t) continue;
        rate_sum += t->inverse_cell_sum / t->mean_free_time_s;
        ++tracked;
    }
    if (tracked == 0) throw BadParams("pooled_timescale: no tracked channels");
    return 1.0 / rate_sum;
}

ScenarioResult run_scenario(const Scenario& scenario, double dt_seconds, long trials,
                            std::uint64_t seed, long max_steps) {
    if (trials <= 0) throw BadParams("run_scenario: trials must be positive");
    if (dt_seconds <= 0) throw BadParams("run_scenario: dt must be positive");

    ScenarioResult result;
    result.tau_c_seconds = pooled_timescale(scenario);
    result.stats =
        ensemble(scenario.channels, dt_seconds, result.tau_c_seconds, trials, seed, max_steps);
    return result;
}

}  // namespace precoh
