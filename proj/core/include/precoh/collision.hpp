#pragma once

#include <cstdint>
#include <vector>

#include "precoh/denmat.hpp"
#include "precoh/rng.hpp"

namespace precoh {

// Outcome of a single molecule-apparatus collision. rho_after is the exact
// partial trace of the joint unitary evolution. delta_minus is the depletion
// of the apparatus eigenstates (diagonal in the eigenbasis of the incoming
// state, PSD). delta_plus is defined by the reconstruction identity
// rho_after = rho_before - delta_minus + delta_plus, which makes the
// identity and the trace equality Tr(delta_plus) = Tr(delta_minus) = epsilon
// exact for every unitary. delta_plus additionally carries a coherent
// (Hamiltonian-like) contribution for unitaries that interfere the scattered
// and unscattered amplitudes, so it is PSD only up to that contribution;
// both deltas are therefore stored as plain Hermitian matrices.
struct CollisionDelta {
    DensityMatrix rho_after;
    Matrix delta_plus;
    Matrix delta_minus;
    double epsilon = 0.0;
    // Depletion of each apparatus eigenstate |k>: sum over scattered final
    // states of |T|^2, molecule-averaged; equals 1 when the collision is
    // certain for that eigenstate.
    std::vector<double> depletion;
};

CollisionDelta scatter(const DensityMatrix& rho_a, const DensityMatrix& molecule,
                       const Matrix& joint_unitary);

// First-order eigenvector corrections |<k'|delta|k>| / |p_k - p_k'|.
// Pairs with a spectral gap below gap_floor are flagged, not divided.
struct SensitivityTerm {
    int k = 0;
    int k_other = 0;
    double magnitude = 0.0;  // 0 when degenerate
    double gap = 0.0;
    bool degenerate = false;
};

struct SensitivityReport {
    double max_term = 0.0;
    double gap_min = 0.0;
    std::vector<SensitivityTerm> terms;
};

SensitivityReport eigvec_sensitivity(const DensityMatrix& rho, const Matrix& perturbation,
                                     double gap_floor = 1e-13);

struct CollisionEvent {
    double time = 0.0;
    DensityMatrix molecule;
    Matrix joint_unitary;
};

using CollisionSchedule = std::vector<CollisionEvent>;

// Haar-random unitary on dim x dim via QR of a complex Gaussian matrix with
// the R-diagonal phase fix.
Matrix haar_unitary(int dim, Rng& rng);

// Poisson arrivals at the given rate on [0, t_end], each carrying an
// independent Haar-random joint unitary and a maximally mixed molecule.
CollisionSchedule random_collision_schedule(double rate, double t_end, std::uint64_t seed,
                                            int apparatus_dim, int molecule_dim);

// Sampled trajectory of the sourced evolution and the collision-free
// reference rho_iso(t) it is compared against. omega = rho - rho_iso is
// traceless; trace_plus is the trace of its positive spectral part.
struct OmegaTrajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> rho;
    std::vector<DensityMatrix> rho_iso;
    std::vector<Matrix> omega;
    std::vector<double> trace_plus;
    std::vector<double> purity;            // Tr(rho^2)
    std::vector<double> distance_iso;      // d(rho, rho_iso)
    std::vector<double> similarity_iso;    // K(rho, rho_iso)
};

// Exact unitary steps exp(-iH dt) between scheduled collisions; each
// collision applies scatter's rho_after. iso_reference_time is the t' from
// which the collision-free reference evolves (default 0, i.e. from rho0).
OmegaTrajectory evolve_with_source(const DensityMatrix& rho0, const Matrix& hamiltonian,
                                   const CollisionSchedule& schedule, double t_end, double dt,
                                   double iso_reference_time = 0.0);

}  // namespace precoh
