#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "precoh/collapse.hpp"
#include "precoh/collision.hpp"
#include "precoh/denmat.hpp"
#include "precoh/transport.hpp"

namespace precoh {

// JSON round trip: {"dim": n, "trace_hint": t, "entries": [[re, im], ...]}
// with entries row-major. Serialization keeps 17 significant digits so the
// round trip is bit-exact.
std::string density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const std::string& text);

// CSV writers. All floating-point fields use %.17g with '.' as the decimal
// separator regardless of locale.
void write_omega_csv(std::ostream& out, const OmegaTrajectory& traj);
void write_kpp_csv(std::ostream& out, const std::vector<FrontField>& history, double level = 0.5);
void write_field_snapshot_csv(std::ostream& out, const FrontField& field);
void write_walk_csv(std::ostream& out, const std::vector<WalkPopulation>& history);
void write_collapse_csv(std::ostream& out, const std::vector<SimplexState>& history);

std::string format_double(double v);

}  // namespace precoh
