// Acceptance gate: one line per criterion, PASS or FAIL, with the measured
// values and the pinned tolerances. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "precoh/collapse.hpp"
#include "precoh/collision.hpp"
#include "precoh/denmat.hpp"
#include "precoh/measurement.hpp"
#include "precoh/rng.hpp"
#include "precoh/transport.hpp"
#include "precoh_cli/cli.hpp"

using namespace precoh;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, bool pass, const std::string& name, const std::string& detail) {
    std::printf("[%d] %s %s: %s\n", number, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix shift(int dim) {
    Matrix s = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) s((i + 1) % dim, i) = 1.0;
    return s;
}

DensityMatrix random_state(int dim, Rng& rng) {
    std::normal_distribution<double> gauss;
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = {gauss(rng), gauss(rng)};
    Matrix m = a * a.adjoint();
    return DensityMatrix(m / m.trace().real(), 1.0);
}

// 1. Winner frequency equals the initial probability, three start points.
void criterion_born_rule() {
    const auto t0 = std::chrono::steady_clock::now();
    const long trials = 10000;
    const double dt = 1e-3;
    struct Case {
        Eigen::VectorXd p0;
        std::uint64_t seed;
    };
    const std::vector<Case> cases = {{vec({0.3, 0.7}), 101},
                                     {vec({0.1, 0.9}), 102},
                                     {vec({0.2, 0.3, 0.5}), 103}};
    bool pass = true;
    std::ostringstream detail;
    for (const auto& c : cases) {
        const auto case_t0 = std::chrono::steady_clock::now();
        const EnsembleStats stats = ensemble(c.p0, dt, 1.0, trials, c.seed);
        const double elapsed = seconds_since(case_t0);
        pass = pass && stats.exceeded == 0 && elapsed < 60.0;
        detail << "(";
        for (Eigen::Index j = 0; j < c.p0.size(); ++j) {
            const double band = 3.0 * std::sqrt(c.p0[j] * (1.0 - c.p0[j]) / trials);
            const double dev = std::abs(stats.win_frequency[j] - c.p0[j]);
            pass = pass && dev <= band;
            detail << (j ? " " : "") << stats.win_frequency[j];
        }
        detail << " vs target with 3-sigma bands, " << elapsed << " s) ";
    }
    report(1, pass, "Born rule", detail.str() + "10^4 trials each, bands 3sqrt(pq/n)");
}

// 2. Empirical single-step covariance vs the analytic matrix.
void criterion_covariance() {
    const auto p = vec({0.2, 0.3, 0.5});
    const double dt = 1e-3, tau_c = 1.0;
    const Eigen::MatrixXd analytic = covariance_matrix(p, dt, tau_c);
    const Eigen::MatrixXd empirical = single_step_covariance(p, dt, tau_c, 100000, 202);
    double worst_rel = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            worst_rel = std::max(worst_rel,
                                 std::abs(empirical(i, j) - analytic(i, j)) /
                                     std::abs(analytic(i, j)));
    double worst_row = 0.0;
    for (int i = 0; i < 3; ++i) worst_row = std::max(worst_row, std::abs(analytic.row(i).sum()));
    const bool pass = worst_rel <= 0.05 && worst_row <= 1e-12;
    std::ostringstream detail;
    detail << "10^5 samples, worst relative entry error " << worst_rel
           << " (tol 0.05), analytic row-sum max " << worst_row << " (tol 1e-12)";
    report(2, pass, "Covariance structure", detail.str());
}

// 3. Mute channels never win and never leave zero.
void criterion_mute_channels() {
    ScenarioParams sp;
    sp.p1 = 0.3;
    sp.track = default_track();
    const Scenario sg = make_scenario(ScenarioKind::stern_gerlach, sp);
    const double tau_c = pooled_timescale(sg);
    const double dt = 1e-3 * tau_c;

    long mute_wins = 0;
    bool mute_held = true;
    for (long trial = 0; trial < 10000; ++trial) {
        Rng rng = make_rng(derive_seed(303, static_cast<std::uint64_t>(trial)));
        SimplexState state = make_simplex(sg.channels);
        while (state.winner() < 0) {
            state = step(state, dt, tau_c, rng);
            mute_held = mute_held && state.p[2] == 0.0 && state.p[3] == 0.0;
        }
        if (state.winner() >= 2) ++mute_wins;
    }
    const bool pass = mute_wins == 0 && mute_held;
    std::ostringstream detail;
    detail << "10^4 trials, mute-channel wins " << mute_wins << " (required 0), p held at 0 "
           << (mute_held ? "at every step" : "VIOLATED");
    report(3, pass, "Mute channels", detail.str());
}

// 4. Collision trace identities across dimensions, plus full scattering.
void criterion_trace_identities() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_rng(404);
    double max_gap = 0.0, max_trace_err = 0.0, worst_full = 0.0;
    bool constructed = true;
    for (const auto& [da, dm] : std::vector<std::pair<int, int>>{{4, 2}, {8, 2}, {8, 4}}) {
        const DensityMatrix rho = random_state(da, rng);
        const DensityMatrix mol(Matrix::Identity(dm, dm) / dm, 1.0);
        for (int i = 0; i < 200; ++i) {
            try {
                const CollisionDelta d = scatter(rho, mol, haar_unitary(da * dm, rng));
                max_gap = std::max(max_gap, std::abs(d.delta_plus.trace().real() -
                                                     d.delta_minus.trace().real()));
                max_trace_err = std::max(max_trace_err, std::abs(d.rho_after.trace() - 1.0));
            } catch (const Error&) {
                constructed = false;  // rho_after failed PSD/trace validation
            }
        }
        const CollisionDelta full = scatter(rho, mol, kron(shift(da), shift(dm)));
        worst_full = std::max(worst_full, std::abs(full.epsilon - 1.0));
    }
    const double elapsed = seconds_since(t0);
    const bool pass =
        constructed && max_gap <= 1e-10 && max_trace_err <= 1e-10 && worst_full <= 1e-10 &&
        elapsed < 10.0;
    std::ostringstream detail;
    detail << "200 unitaries per dim pair, max |Tr d+ - Tr d-| " << max_gap
           << ", max |Tr rho' - 1| " << max_trace_err << " (tol 1e-10), full-scattering |eps-1| "
           << worst_full << ", " << elapsed << " s (limit 10)";
    report(4, pass, "Trace identities", detail.str());
}

// 5. Omega stays traceless with balanced signed parts; plateau reported.
void criterion_omega() {
    Rng rng = make_rng(505);
    std::normal_distribution<double> gauss;
    Matrix h(8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) h(r, c) = {gauss(rng), gauss(rng)};
    h = Matrix((h + h.adjoint()) / 2.0);
    const DensityMatrix rho0 = thermal_state(h, 1.0);
    const auto schedule = random_collision_schedule(2.0, 10.0, 506, 8, 2);
    const OmegaTrajectory traj = evolve_with_source(rho0, h, schedule, 10.0, 0.01);

    double max_trace = 0.0, max_balance = 0.0;
    for (const auto& omega : traj.omega) {
        max_trace = std::max(max_trace, std::abs(omega.trace().real()));
        const SignedSplit split = split_signed(omega);
        max_balance = std::max(
            max_balance, std::abs(split.positive_part.trace() - split.negative_part.trace()));
    }
    const std::size_t tail = traj.trace_plus.size() - traj.trace_plus.size() / 4;
    double plateau = 0.0;
    for (std::size_t i = tail; i < traj.trace_plus.size(); ++i) plateau += traj.trace_plus[i];
    plateau /= static_cast<double>(traj.trace_plus.size() - tail);

    const bool pass =
        traj.times.size() >= 1000 && max_trace <= 1e-10 && max_balance <= 1e-10;
    std::ostringstream detail;
    detail << traj.times.size() << " samples, max |Tr omega| " << max_trace
           << ", max |Tr omega+ - Tr omega-| " << max_balance
           << " (tol 1e-10); trace_plus plateau " << plateau << " (reported, not asserted)";
    report(5, pass, "Omega dynamics", detail.str());
}

// 6. Front speeds and growth rates across both transport models.
void criterion_fronts() {
    const auto t0 = std::chrono::steady_clock::now();
    const double h = 0.25, dt = 0.025;

    auto run = [&](double x_max, double t_end, KppMode mode) {
        FrontField field = make_front_field(x_max, h, true);
        std::vector<FrontField> history{field};
        const long n = static_cast<long>(t_end / dt + 0.5);
        for (long i = 1; i <= n; ++i) {
            field = kpp_step(field, dt, mode);
            if (i % 20 == 0) history.push_back(field);
        }
        return history;
    };
    const double free_speed = front_speed(run(250.0, 100.0, KppMode::free_boundary), 20.0);
    const double moving_speed = front_speed(run(150.0, 100.0, KppMode::moving_boundary), 20.0);

    FrontField lin = make_front_field(100.0, h, false);
    for (std::size_t i = 0; i < lin.values.size(); ++i) {
        const double x = static_cast<double>(i) * h - 50.0;
        lin.values[i] = 1e-6 * std::exp(-x * x / 8.0);
    }
    std::vector<double> lt{0.0}, lm{field_mass(lin)};
    for (long i = 1; i <= 200; ++i) {
        lin = kpp_step(lin, dt, KppMode::free_boundary);
        if (i % 20 == 0) {
            lt.push_back(lin.time);
            lm.push_back(field_mass(lin));
        }
    }
    const double linear_rate = growth_rate(lt, lm, 0, lt.size());

    const auto walk = duplication_walk(make_walk(1), 30, std::int64_t{1} << 40, 606);
    bool walk_front_exact = true;
    std::vector<double> wt, wn;
    for (const auto& pop : walk) {
        walk_front_exact = walk_front_exact && pop.front_position() == pop.step;
        wt.push_back(static_cast<double>(pop.step));
        wn.push_back(static_cast<double>(pop.total()));
    }
    const double walk_rate = growth_rate(wt, wn, 0, wt.size());
    const double elapsed = seconds_since(t0);

    const double sqrt2 = std::sqrt(2.0);
    const bool pass = std::abs(free_speed - sqrt2) <= 0.05 * sqrt2 &&
                      std::abs(moving_speed - 1.0) <= 0.05 &&
                      walk_front_exact &&
                      std::abs(walk_rate - std::log(2.0)) <= 0.01 * std::log(2.0) &&
                      std::abs(linear_rate - 1.0) <= 0.05 && elapsed < 120.0;
    std::ostringstream detail;
    detail << "free " << free_speed << " (sqrt2 +-5%), moving " << moving_speed
           << " (1 +-5%), walk front " << (walk_front_exact ? "exactly 1 plane/step" : "DRIFTED")
           << ", walk rate " << walk_rate << " (ln2 +-1%), linear mass rate " << linear_rate
           << " (1 +-5%), " << elapsed << " s (limit 120)";
    report(6, pass, "Front speeds", detail.str());
}

// 7. Fluctuation formulas and the timescale estimate.
void criterion_fluctuations() {
    const bool zero_at_edges =
        delta_p1(1e6, 1e6, 7.0).exact == 0.0 && delta_p1(0.0, 1e6, 0.0).exact == 0.0;

    const TrackModel track = build_track(1e6, 10.0, 10.0, 0.01, 1e-5, 1e-10);  // 1000 x 100
    const bool symmetric =
        variance_per_step(track, 0.3, 1e-11) == variance_per_step(track, 0.7, 1e-11);
    const double formula =
        track.mean_free_time_s * track.cell_counts[0] / static_cast<double>(track.n_cells);
    const double tau_c = collapse_timescale(track);
    const bool formula_exact = std::abs(tau_c - formula) <= 1e-12 * formula;
    const bool order_match = std::abs(tau_c / 1e-11 - 1.0) <= 1e-6;

    // Literal narrow-cell parameter set: the report must flag the miss.
    const TrackModel literal = build_track(1e7, 10.0, 10.0, 3e-5, 1e-5, 1e-10);
    const TimescaleReport rep = timescale_report(literal);
    const bool flagged = !rep.discrepancy_note.empty() && rep.ratio < 0.1;

    const bool pass = zero_at_edges && symmetric && formula_exact && order_match && flagged;
    std::ostringstream detail;
    detail << "dp1 zero at p1 in {0,1} " << (zero_at_edges ? "exact" : "BROKEN")
           << ", variance p1<->p2 " << (symmetric ? "machine-equal" : "ASYMMETRIC")
           << ", tau_c formula " << (formula_exact ? "exact" : "OFF") << ", tau_c " << tau_c
           << " vs 1e-11 target, literal-parameter report ";
    if (flagged)
        detail << "nonempty (computed " << rep.tau_c_seconds << " s)";
    else
        detail << "MISSING";
    report(7, pass, "Fluctuation formulas", detail.str());
}

// 8. Exhaustive history tree vs a Monte Carlo stepper with matched per-step
// spread. The tree's terminal distribution is 2^12 equal-weight atoms; the
// stepper's is effectively continuous, so the sup distance is bounded below
// by half the largest atom cluster mass (~0.1 at the center) and the 0.05
// tolerance is not attainable by either estimator. Asserted as specified and
// expected to fail; the exact-mean subcheck passes.
void criterion_history_oracle() {
    const int n = 12;
    const double d = 1e-3, p1 = 0.5;
    const HistoryDistribution tree = enumerate_histories(p1, n, d);
    const bool mean_exact = std::abs(tree.mean - p1) <= 1e-12;

    std::vector<double> samples;
    samples.reserve(100000);
    for (long trial = 0; trial < 100000; ++trial) {
        Rng rng = make_rng(derive_seed(808, static_cast<std::uint64_t>(trial)));
        SimplexState state = make_simplex(vec({p1, 1.0 - p1}));
        for (int i = 0; i < n && state.winner() < 0; ++i) state = step(state, d, 1.0, rng);
        samples.push_back(state.p[0]);
    }
    const double ks = ks_distance(tree, std::move(samples));

    const bool pass = ks < 0.05 && mean_exact;
    std::ostringstream detail;
    detail << "n=12 tree vs 10^5-sample stepper, KS " << ks << " (tol 0.05, "
           << (ks < 0.05 ? "met" : "not attainable for a discrete-vs-continuous comparison")
           << "), terminal mean " << (mean_exact ? "exactly p1(0)" : "BIASED");
    report(8, pass, "History-enumeration oracle", detail.str());
}

// 9. Byte-identical CLI reruns.
void criterion_determinism() {
    const fs::path dir = fs::temp_directory_path() / "precoh_acceptance";
    fs::remove_all(dir);
    const std::vector<std::vector<std::string>> commands = {
        {"collapse", "--p", "0.3,0.7", "--trials", "200"},
        {"kpp", "--mode", "free", "--t-end", "30"},
        {"front-walk", "--steps", "20"},
        {"scatter", "--count", "4"},
        {"omega", "--dim", "6", "--t-end", "3"},
        {"scenario", "--name", "stern_gerlach", "--p1", "0.3", "--trials", "200"},
        {"timescale"},
    };
    bool pass = true;
    std::string failed;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto args = commands[i];
        const fs::path out = dir / std::to_string(i);
        args.insert(args.end(),
                    {"--seed", "909", "--output-dir", out.string()});
        const cli::RunConfig cfg = cli::parse_config(args);
        const auto files = cli::execute(cfg);
        std::vector<std::string> first;
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            std::stringstream buf;
            buf << in.rdbuf();
            first.push_back(buf.str());
        }
        const auto files2 = cli::execute(cfg);
        for (std::size_t k = 0; k < files2.size(); ++k) {
            std::ifstream in(files2[k], std::ios::binary);
            std::stringstream buf;
            buf << in.rdbuf();
            if (files.size() != files2.size() || buf.str() != first[k]) {
                pass = false;
                failed += commands[i][0] + " ";
            }
        }
    }
    report(9, pass, "CLI determinism",
           pass ? "all 7 commands byte-identical on rerun with a fixed seed"
                : "mismatch in: " + failed);
}

}  // namespace

int main() {
    criterion_born_rule();
    criterion_covariance();
    criterion_mute_channels();
    criterion_trace_identities();
    criterion_omega();
    criterion_fronts();
    criterion_fluctuations();
    criterion_history_oracle();
    criterion_determinism();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
