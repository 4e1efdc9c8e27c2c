#include <doctest.h>

#include <cmath>

#include "precoh/collapse.hpp"

using namespace precoh;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("covariance matrix entries and row sums") {
    const auto p = vec({0.2, 0.3, 0.5});
    const double dt = 1e-3, tau_c = 2.0;
    const Eigen::MatrixXd cov = covariance_matrix(p, dt, tau_c);
    for (int i = 0; i < 3; ++i) {
        CHECK(cov(i, i) == doctest::Approx(p[i] * (1 - p[i]) * dt / tau_c).epsilon(1e-14));
        for (int j = 0; j < 3; ++j) {
            if (i != j) CHECK(cov(i, j) == doctest::Approx(-p[i] * p[j] * dt / tau_c).epsilon(1e-14));
        }
        CHECK(std::abs(cov.row(i).sum()) < 1e-12);
    }
}

TEST_CASE("simplex construction validates and freezes empty channels") {
    CHECK_THROWS_AS(make_simplex(vec({0.3, 0.6})), OffSimplex);
    CHECK_THROWS_AS(make_simplex(vec({1.2, -0.2})), OffSimplex);

    SimplexState s = make_simplex(vec({0.5, 0.0, 0.5}));
    CHECK(s.frozen[1]);
    CHECK_FALSE(s.frozen[0]);
    CHECK(s.unfrozen_count() == 2);
    CHECK(s.winner() == -1);

    SimplexState done = make_simplex(vec({1.0, 0.0}));
    CHECK(done.winner() == 0);
}

TEST_CASE("steps preserve the simplex and respect freezes") {
    Rng rng = make_rng(31);
    SimplexState s = make_simplex(vec({0.25, 0.25, 0.5}));
    for (int i = 0; i < 5000 && s.winner() < 0; ++i) {
        s = step(s, 1e-3, 1.0, rng);
        CHECK(std::abs(s.p.sum() - 1.0) < 1e-12);
        for (int c = 0; c < s.channels(); ++c) {
            CHECK(s.p[c] >= 0.0);
            if (s.frozen[c] && s.winner() < 0) CHECK((s.p[c] == 0.0 || s.p[c] == 1.0));
        }
    }
}

TEST_CASE("oversized steps are rejected") {
    Rng rng = make_rng(32);
    SimplexState s = make_simplex(vec({0.5, 0.5}));
    CHECK_THROWS_AS(step(s, 0.011, 1.0, rng), StepTooLarge);
    CHECK_NOTHROW(step(s, 0.01, 1.0, rng));
}

TEST_CASE("absorption is exact") {
    Rng rng = make_rng(33);
    CollapseOutcome out = run_to_collapse(vec({0.3, 0.7}), 1e-3, 1.0, rng);
    CHECK_FALSE(out.max_steps_exceeded);
    CHECK((out.winner == 0 || out.winner == 1));
    CHECK(out.collapse_time > 0.0);
    CHECK(out.path_length > 0);
}

TEST_CASE("ensembles are deterministic in the master seed") {
    const auto p = vec({0.3, 0.7});
    EnsembleStats a = ensemble(p, 1e-3, 1.0, 200, 77);
    EnsembleStats b = ensemble(p, 1e-3, 1.0, 200, 77);
    CHECK(a.win_frequency == b.win_frequency);
    CHECK(a.mean_collapse_time == b.mean_collapse_time);
    EnsembleStats c = ensemble(p, 1e-3, 1.0, 200, 78);
    CHECK(a.win_frequency != c.win_frequency);
}

TEST_CASE("win frequency tracks the initial probability") {
    EnsembleStats stats = ensemble(vec({0.3, 0.7}), 1e-3, 1.0, 2000, 5);
    CHECK(stats.exceeded == 0);
    CHECK(stats.win_frequency[0] == doctest::Approx(0.3).epsilon(0.15));
    CHECK(stats.win_frequency.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical single-step covariance matches the analytic form") {
    const auto p = vec({0.2, 0.3, 0.5});
    const Eigen::MatrixXd analytic = covariance_matrix(p, 1e-3, 1.0);
    const Eigen::MatrixXd empirical = single_step_covariance(p, 1e-3, 1.0, 20000, 9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(empirical(i, j) == doctest::Approx(analytic(i, j)).epsilon(0.1));
}

TEST_CASE("history enumeration: counts, weights and exact mean") {
    HistoryDistribution d = enumerate_histories(0.5, 1, 1e-3);
    REQUIRE(d.values.size() == 2);
    const double delta = std::sqrt(0.25 * 1e-3);
    CHECK(d.values[0] == doctest::Approx(0.5 - delta).epsilon(1e-14));
    CHECK(d.values[1] == doctest::Approx(0.5 + delta).epsilon(1e-14));

    HistoryDistribution d8 = enumerate_histories(0.3, 8, 1e-3);
    CHECK(d8.values.size() == 256);
    double wsum = 0.0;
    for (double w : d8.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d8.mean == doctest::Approx(0.3).epsilon(1e-12));

    CHECK_THROWS_AS(enumerate_histories(0.5, 21, 1e-3), TooManySteps);
}

TEST_CASE("ks distance on hand-checkable inputs") {
    HistoryDistribution d;
    d.values = {0.0, 1.0};
    d.weights = {0.5, 0.5};
    d.mean = 0.5;
    // Samples exactly on the atoms, balanced: the cdfs agree everywhere.
    CHECK(ks_distance(d, {0.0, 0.0, 1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-12));
    // All samples on the lower atom: empirical cdf is 1 everywhere.
    CHECK(ks_distance(d, {0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));
}
