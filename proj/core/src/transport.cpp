#include "precoh/transport.hpp"

#include <algorithm>
#include <cmath>

namespace precoh {

FrontField make_front_field(double x_max, double grid_spacing, bool source_on) {
    if (!(grid_spacing > 0.0) || !(x_max > grid_spacing))
        throw UnstableStep("make_front_field: bad grid parameters");
    FrontField f;
    f.grid_spacing = grid_spacing;
    f.values.assign(static_cast<std::size_t>(std::floor(x_max / grid_spacing)) + 1, 0.0);
    f.source_on = source_on;
    if (source_on) f.values.front() = 1.0;
    return f;
}

FrontField kpp_step(const FrontField& field, double dt, KppMode mode) {
    const double h = field.grid_spacing;
    if (!(dt > 0.0) || dt > h * h)
        throw UnstableStep("kpp_step: dt must satisfy 0 < dt <= grid_spacing^2");
    const std::size_t n = field.values.size();
    if (n < 3) throw GridTooShort("kpp_step: grid too small");

    // When the right edge stands in for infinity (held at 0), the front must
    // stay clear of it. A uniformly saturated profile has no front and is
    // left alone.
    if (field.values.back() < 1e-6) {
        std::size_t last_active = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (field.values[i] > 1e-6) last_active = i;
        if (field.values[last_active] > 1e-6 && last_active + 10 >= n)
            throw GridTooShort("kpp_step: front within 10 cells of the right edge");
    }

    FrontField next = field;
    const std::vector<double>& g = field.values;
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double lap = (g[i + 1] - 2.0 * g[i] + g[i - 1]) * inv_h2;
        next.values[i] = g[i] + dt * (0.5 * lap + g[i] * (1.0 - g[i]));
    }
    next.time = field.time + dt;
    next.values.front() = field.source_on ? 1.0 : 0.0;
    next.values.back() = g.back();  // Dirichlet: 0 ahead of a front, 1 when saturated

    if (mode == KppMode::moving_boundary) {
        // g = 0 ahead of the moving boundary x = t.
        const auto cutoff = static_cast<std::size_t>(std::floor(next.time / h)) + 1;
        for (std::size_t i = cutoff; i < n; ++i) next.values[i] = 0.0;
    }
    return next;
}

double front_position(const FrontField& field, double level) {
    const std::vector<double>& g = field.values;
    // Rightmost downward crossing of the level.
    for (std::size_t i = g.size(); i-- > 1;) {
        if (g[i - 1] >= level && g[i] < level) {
            const double frac = (g[i - 1] - level) / (g[i - 1] - g[i]);
            return (static_cast<double>(i - 1) + frac) * field.grid_spacing;
        }
    }
    throw FrontNotFormed("front_position: no crossing of the level");
}

double front_speed(const std::vector<FrontField>& history, double transient,
                   std::size_t min_samples) {
    std::vector<double> ts, xs;
    for (const FrontField& f : history) {
        if (f.time <= transient) continue;
        try {
            xs.push_back(front_position(f));
            ts.push_back(f.time);
        } catch (const FrontNotFormed&) {
        }
    }
    if (ts.size() < min_samples)
        throw FrontNotFormed("front_speed: fewer than the required post-transient samples");

    double st = 0, sx = 0, stt = 0, stx = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sx += xs[i];
        stt += ts[i] * ts[i];
        stx += ts[i] * xs[i];
    }
    const double m = static_cast<double>(ts.size());
    return (m * stx - st * sx) / (m * stt - st * st);
}

double field_mass(const FrontField& field) {
    double sum = 0.0;
    for (double v : field.values) sum += v;
    return sum * field.grid_spacing;
}

std::int64_t WalkPopulation::total() const {
    std::int64_t n = 0;
    for (const auto& [pos, count] : occupancy) n += count;
    return n;
}

std::int64_t WalkPopulation::front_position() const {
    std::int64_t best = 0;
    bool any = false;
    for (const auto& [pos, count] : occupancy) {
        if (count > 0 && (!any || pos > best)) {
            best = pos;
            any = true;
        }
    }
    return any ? best : 0;
}

WalkPopulation make_walk(std::int64_t walkers_at_origin) {
    WalkPopulation w;
    if (walkers_at_origin > 0) w.occupancy[0] = walkers_at_origin;
    return w;
}

std::vector<WalkPopulation> duplication_walk(const WalkPopulation& initial, int n_steps,
                                             std::int64_t cap, std::uint64_t seed,
                                             std::int64_t site_cap) {
    (void)seed;  // the pure duplication rule is deterministic
    if (n_steps < 1) throw BadParams("duplication_walk: n_steps must be >= 1");
    if (site_cap < 1) throw BadParams("duplication_walk: site_cap must be >= 1");

    std::vector<WalkPopulation> history;
    history.reserve(static_cast<std::size_t>(n_steps) + 1);
    history.push_back(initial);

    WalkPopulation current = initial;
    for (int s = 0; s < n_steps; ++s) {
        WalkPopulation next;
        next.step = current.step + 1;
        for (const auto& [pos, count] : current.occupancy) {
            if (count <= 0) continue;
            next.occupancy[pos - 1] += count;
            next.occupancy[pos + 1] += count;
        }
        if (next.total() > cap)
            for (auto& [pos, count] : next.occupancy) count = std::min(count, site_cap);
        history.push_back(next);
        current = std::move(next);
    }
    return history;
}

double growth_rate(const std::vector<double>& times, const std::vector<double>& totals,
                   std::size_t begin, std::size_t end) {
    if (times.size() != totals.size() || end > times.size() || begin + 4 > end)
        throw BadParams("growth_rate: bad window");

    std::vector<double> t, y;
    for (std::size_t i = begin; i < end; ++i) {
        if (!(totals[i] > 0.0)) throw BadParams("growth_rate: totals must be positive");
        t.push_back(times[i]);
        y.push_back(std::log(totals[i]));
    }

    auto slope = [](const std::vector<double>& a, const std::vector<double>& b, std::size_t lo,
                    std::size_t hi) {
        double st = 0, sy = 0, stt = 0, sty = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            st += a[i];
            sy += b[i];
            stt += a[i] * a[i];
            sty += a[i] * b[i];
        }
        const double m = static_cast<double>(hi - lo);
        return (m * sty - st * sy) / (m * stt - st * st);
    };

    const double rate = slope(t, y, 0, t.size());
    const double first = slope(t, y, 0, t.size() / 2);
    const double second = slope(t, y, t.size() / 2, t.size());
    if (std::abs(second - first) > 0.10 * std::abs(rate))
        throw WindowSaturated("growth_rate: log-series curvature exceeds 10% of the rate");
    return rate;
}

}  // namespace precoh
