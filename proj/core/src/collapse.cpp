#include "precoh/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace precoh {

namespace {
constexpr double kSimplexTol = 1e-12;
constexpr double kWinnerTol = 1e-9;
}  // namespace

int SimplexState::unfrozen_count() const {
    int n = 0;
    for (bool f : frozen)
        if (!f) ++n;
    return n;
}

int SimplexState::winner() const {
    int candidate = -1;
    for (int j = 0; j < channels(); ++j) {
        if (p[j] > 0.0) {
            if (p[j] == 1.0 && frozen[j])
                candidate = j;
            else
                return -1;
        } else if (!frozen[j]) {
            return -1;
        }
    }
    return candidate;
}

SimplexState make_simplex(const Eigen::VectorXd& p0) {
    if (p0.size() < 1) throw OffSimplex("make_simplex: empty probability vector");
    if (p0.minCoeff() < 0.0 || std::abs(p0.sum() - 1.0) > 1e-9)
        throw OffSimplex("make_simplex: probabilities must be nonnegative and sum to 1");

    SimplexState s;
    s.p = p0;
    s.p /= s.p.sum();
    s.frozen.assign(static_cast<std::size_t>(p0.size()), false);
    for (int j = 0; j < s.channels(); ++j)
        if (s.p[j] == 0.0) s.frozen[j] = true;  // mute channels are born frozen
    // A channel already holding all the mass is a pre-collapsed winner.
    for (int j = 0; j < s.channels(); ++j)
        if (!s.frozen[j] && s.p[j] >= 1.0 - kWinnerTol && s.unfrozen_count() == 1) {
            s.p[j] = 1.0;
            s.frozen[j] = true;
        }
    return s;
}

Eigen::MatrixXd covariance_matrix(const Eigen::VectorXd& p, double dt, double tau_c) {
    if (p.size() < 1 || p.minCoeff() < 0.0 || std::abs(p.sum() - 1.0) > 1e-9)
        throw OffSimplex("covariance_matrix: p is not on the simplex");
    if (!(dt > 0.0) || !(tau_c > 0.0))
        throw BadParams("covariance_matrix: dt and tau_c must be positive");

    const double scale = dt / tau_c;
    Eigen::MatrixXd cov = -scale * (p * p.transpose());
    for (int j = 0; j < p.size(); ++j) cov(j, j) = scale * p[j] * (1.0 - p[j]);
    return cov;
}

namespace {

// Gaussian increment with multinomial-style covariance on the unfrozen
// sub-simplex, via eigen-factorization.
Eigen::VectorXd sample_increment(const Eigen::VectorXd& q, double dt, double tau_c, Rng& rng) {
    const Eigen::MatrixXd cov = covariance_matrix(q, dt, tau_c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd scale = es.eigenvalues();
    for (int i = 0; i < scale.size(); ++i) scale[i] = scale[i] > 0.0 ? std::sqrt(scale[i]) : 0.0;

    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(q.size());
    for (int i = 0; i < z.size(); ++i) z[i] = gauss(rng);

    Eigen::VectorXd dq = es.eigenvectors() * scale.asDiagonal() * z;
    dq.array() -= dq.mean();  // exact zero-sum against factorization round-off
    return dq;
}

}  // namespace

SimplexState step(const SimplexState& state, double dt, double tau_c, Rng& rng) {
    if (!(tau_c > 0.0) || !(dt > 0.0)) throw BadParams("step: dt and tau_c must be positive");
    if (dt > 1e-2 * tau_c) throw StepTooLarge("step: dt must be <= 1e-2 tau_c");
    if (state.winner() >= 0) return state;  // absorbed, nothing moves

    std::vector<int> live;
    for (int j = 0; j < state.channels(); ++j)
        if (!state.frozen[j]) live.push_back(j);
    if (live.size() < 2) throw OffSimplex("step: at least two unfrozen channels required");

    Eigen::VectorXd q(static_cast<long>(live.size()));
    for (std::size_t i = 0; i < live.size(); ++i) q[static_cast<long>(i)] = state.p[live[i]];
    const double live_mass = q.sum();
    // The unfrozen channels carry all the remaining mass (frozen ones are
    // pinned at exactly 0 before a winner exists).
    q += sample_increment(q / live_mass, dt, tau_c, rng) * live_mass;

    SimplexState next = state;
    next.time = state.time + dt;

    // Clamp-and-redistribute: negatives freeze at exactly 0 and the
    // surplus is removed proportionally from the remaining positive
    // channels. Repeat in case the rescale is overwhelmed (it cannot push
    // a positive channel negative, but all channels may clamp at once).
    std::vector<char> clamped(live.size(), 0);
    while (true) {
        double positive_mass = 0.0;
        bool any_negative = false;
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (clamped[i]) continue;
            if (q[static_cast<long>(i)] <= 0.0) {
                q[static_cast<long>(i)] = 0.0;
                clamped[i] = 1;
                any_negative = true;
            } else {
                positive_mass += q[static_cast<long>(i)];
            }
        }
        if (!any_negative) break;
        if (positive_mass <= 0.0) {
            // Everything clamped simultaneously: hand the mass to the
            // largest pre-step channel (vanishingly rare at the dt guard).
            std::size_t best = 0;
            for (std::size_t i = 1; i < live.size(); ++i)
                if (state.p[live[i]] > state.p[live[best]]) best = i;
            clamped[best] = 0;
            q[static_cast<long>(best)] = live_mass;
            break;
        }
        for (std::size_t i = 0; i < live.size(); ++i)
            if (!clamped[i]) q[static_cast<long>(i)] *= live_mass / positive_mass;
    }

    int still_live = 0;
    long last_live = -1;
    for (std::size_t i = 0; i < live.size(); ++i) {
        next.p[live[i]] = q[static_cast<long>(i)];
        if (clamped[i]) {
            next.frozen[live[i]] = true;
        } else {
            ++still_live;
            last_live = live[i];
        }
    }
    if (still_live == 1 && next.p[last_live] >= 1.0 - kWinnerTol) {
        next.p[last_live] = 1.0;
        next.frozen[last_live] = true;
    }
    return next;
}

CollapseOutcome run_to_collapse(const Eigen::VectorXd& p0, double dt, double tau_c, Rng& rng,
                                long max_steps) {
    SimplexState state = make_simplex(p0);
    CollapseOutcome out;
    for (long n = 0; state.winner() < 0; ++n) {
        if (n >= max_steps) {
            out.max_steps_exceeded = true;
            out.path_length = n;
            out.collapse_time = state.time;
            return out;
        }
        state = step(state, dt, tau_c, rng);
        out.path_length = n + 1;
    }
    out.winner = state.winner();
    out.collapse_time = state.time;
    return out;
}

EnsembleStats ensemble(const Eigen::VectorXd& p0, double dt, double tau_c, long trials,
                       std::uint64_t seed, long max_steps) {
    if (trials < 1) throw BadParams("ensemble: trials must be >= 1");
    const SimplexState start = make_simplex(p0);
    const int k = start.channels();

    EnsembleStats stats;
    stats.trials = trials;
    stats.win_frequency = Eigen::VectorXd::Zero(k);
    stats.empirical_step_covariance = Eigen::MatrixXd::Zero(k, k);

    Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd mean_dp = Eigen::VectorXd::Zero(k);
    long cov_samples = 0;
    double time_sum = 0.0;
    long completed = 0;

    for (long trial = 0; trial < trials; ++trial) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));

        if (start.winner() < 0) {
            // First step doubles as a covariance sample at p0.
            Rng probe = rng;
            const SimplexState after = step(start, dt, tau_c, probe);
            const Eigen::VectorXd dp = after.p - start.p;
            second_moment += dp * dp.transpose();
            mean_dp += dp;
            ++cov_samples;
        }

        const CollapseOutcome out = run_to_collapse(p0, dt, tau_c, rng, max_steps);
        if (out.max_steps_exceeded) {
            ++stats.exceeded;
            continue;
        }
        stats.win_frequency[out.winner] += 1.0;
        time_sum += out.collapse_time;
        ++completed;
    }

    if (completed > 0) {
        stats.win_frequency /= static_cast<double>(completed);
        stats.mean_collapse_time = time_sum / static_cast<double>(completed);
    }
    if (cov_samples > 0) {
        const double m = static_cast<double>(cov_samples);
        stats.empirical_step_covariance =
            second_moment / m - (mean_dp / m) * (mean_dp / m).transpose();
    }
    return stats;
}

Eigen::MatrixXd single_step_covariance(const Eigen::VectorXd& p0, double dt, double tau_c,
                                       long samples, std::uint64_t seed) {
    if (samples < 2) throw BadParams("single_step_covariance: need >= 2 samples");
    const SimplexState start = make_simplex(p0);
    const int k = start.channels();

    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    Rng rng = make_rng(seed);
    for (long i = 0; i < samples; ++i) {
        const SimplexState after = step(start, dt, tau_c, rng);
        const Eigen::VectorXd dp = after.p - start.p;
        second += dp * dp.transpose();
        mean += dp;
    }
    const double m = static_cast<double>(samples);
    return second / m - (mean / m) * (mean / m).transpose();
}

HistoryDistribution enumerate_histories(double p1_initial, int n_steps, double dt_over_tau_c) {
    if (n_steps < 1 || n_steps > kMaxEnumerationSteps)
        throw TooManySteps("enumerate_histories: n_steps must be in [1, 20]");
    if (p1_initial < 0.0 || p1_initial > 1.0 || !(dt_over_tau_c > 0.0))
        throw BadParams("enumerate_histories: bad parameters");

    std::vector<double> values{p1_initial};
    values.reserve(1u << n_steps);
    for (int s = 0; s < n_steps; ++s) {
        std::vector<double> next;
        next.reserve(values.size() * 2);
        for (double p : values) {
            const double delta = std::sqrt(std::max(p * (1.0 - p), 0.0) * dt_over_tau_c);
            next.push_back(std::clamp(p + delta, 0.0, 1.0));
            next.push_back(std::clamp(p - delta, 0.0, 1.0));
        }
        values = std::move(next);
    }

    std::sort(values.begin(), values.end());
    HistoryDistribution dist;
    dist.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
    const double w = 1.0 / static_cast<double>(values.size());
    dist.values = std::move(values);
    dist.weights.assign(dist.values.size(), w);
    return dist;
}

double ks_distance(const HistoryDistribution& dist, std::vector<double> samples) {
    if (dist.values.empty() || samples.empty())
        throw BadParams("ks_distance: empty inputs");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());

    std::vector<double> prefix(dist.values.size() + 1, 0.0);
    for (std::size_t i = 0; i < dist.values.size(); ++i)
        prefix[i + 1] = prefix[i] + dist.weights[i];

    auto cdf = [&](double x, bool strict) {
        const auto it = strict
                            ? std::lower_bound(dist.values.begin(), dist.values.end(), x)
                            : std::upper_bound(dist.values.begin(), dist.values.end(), x);
        return prefix[static_cast<std::size_t>(it - dist.values.begin())];
    };
    auto emp = [&](double x, bool strict) {
        const auto it = strict ? std::lower_bound(samples.begin(), samples.end(), x)
                               : std::upper_bound(samples.begin(), samples.end(), x);
        return static_cast<double>(it - samples.begin()) / n;
    };

    // Both cdfs are step functions, so the sup is attained at a jump point of
    // one of them, approached from the left or the right.
    double d = 0.0;
    auto visit = [&](double x) {
        d = std::max({d, std::abs(emp(x, false) - cdf(x, false)),
                      std::abs(emp(x, true) - cdf(x, true))});
    };
    for (double x : dist.values) visit(x);
    for (double x : samples) visit(x);
    return d;
}

}  // namespace precoh
