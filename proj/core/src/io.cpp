#include "precoh/io.hpp"

#include <cstdio>

#include <json.hpp>

namespace precoh {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string density_to_json(const DensityMatrix& rho) {
    nlohmann::ordered_json j;
    j["dim"] = rho.dim();
    j["trace_hint"] = rho.trace_hint();
    auto entries = nlohmann::ordered_json::array();
    const Matrix& m = rho.entries();
    for (int r = 0; r < rho.dim(); ++r)
        for (int c = 0; c < rho.dim(); ++c)
            entries.push_back({m(r, c).real(), m(r, c).imag()});
    j["entries"] = std::move(entries);
    return j.dump();
}

DensityMatrix density_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadParams(std::string("density_from_json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("trace_hint") ||
        !j.contains("entries"))
        throw BadParams("density_from_json: need dim, trace_hint and entries");
    const int dim = j["dim"].get<int>();
    if (dim <= 0) throw BadParams("density_from_json: dim must be positive");
    const auto& entries = j["entries"];
    if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim) * dim)
        throw BadParams("density_from_json: entries must hold dim*dim [re, im] pairs");
    Matrix m(dim, dim);
    std::size_t i = 0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c, ++i) {
            const auto& pair = entries[i];
            if (!pair.is_array() || pair.size() != 2)
                throw BadParams("density_from_json: entry is not a [re, im] pair");
            m(r, c) = {pair[0].get<double>(), pair[1].get<double>()};
        }
    return DensityMatrix(std::move(m), j["trace_hint"].get<double>());
}

void write_omega_csv(std::ostream& out, const OmegaTrajectory& traj) {
    out << "time,trace_plus,purity,distance_iso,similarity_iso\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        out << format_double(traj.times[i]) << ',' << format_double(traj.trace_plus[i]) << ','
            << format_double(traj.purity[i]) << ',' << format_double(traj.distance_iso[i])
            << ',' << format_double(traj.similarity_iso[i]) << '\n';
}

void write_kpp_csv(std::ostream& out, const std::vector<FrontField>& history, double level) {
    out << "time,front_position,mass\n";
    for (const auto& field : history) {
        out << format_double(field.time) << ',';
        try {
            out << format_double(front_position(field, level));
        } catch (const FrontNotFormed&) {
            out << "nan";
        }
        out << ',' << format_double(field_mass(field)) << '\n';
    }
}

void write_field_snapshot_csv(std::ostream& out, const FrontField& field) {
    out << "x,g\n";
    for (std::size_t i = 0; i < field.values.size(); ++i)
        out << format_double(static_cast<double>(i) * field.grid_spacing) << ','
            << format_double(field.values[i]) << '\n';
}

void write_walk_csv(std::ostream& out, const std::vector<WalkPopulation>& history) {
    out << "step,front_position,total_population\n";
    for (const auto& pop : history)
        out << pop.step << ',' << pop.front_position() << ',' << pop.total() << '\n';
}

void write_collapse_csv(std::ostream& out, const std::vector<SimplexState>& history) {
    if (history.empty()) return;
    out << "time";
    for (int c = 0; c < history.front().channels(); ++c) out << ",p_" << c;
    out << '\n';
    for (const auto& state : history) {
        out << format_double(state.time);
        for (int c = 0; c < state.channels(); ++c) out << ',' << format_double(state.p[c]);
        out << '\n';
    }
}

}  // namespace precoh
