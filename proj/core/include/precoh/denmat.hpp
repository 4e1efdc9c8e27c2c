#pragma once

#include <Eigen/Dense>

#include "precoh/errors.hpp"

namespace precoh {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

namespace tol {
// Construction-level tolerances (double-precision eigensolver noise floor
// for the dimensions this library targets).
inline constexpr double hermitian = 1e-12;
inline constexpr double eigen_clamp = 1e-9;   // below this negativity is an error
inline constexpr double trace = 1e-10;
inline constexpr double spectral_drop = 1e-14;
}  // namespace tol

// Dense matrix dimension cap; dense eigendecompositions dominate the cost.
int max_matrix_dim();
void set_max_matrix_dim(int dim);

// Hermitian, positive-semidefinite matrix with an expected trace.
// Sub-normalized perturbations carry trace hints smaller than 1.
// Immutable after construction.
class DensityMatrix {
  public:
    DensityMatrix(Matrix entries, double trace_hint);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    double trace_hint() const { return trace_hint_; }
    double trace() const { return entries_.trace().real(); }

    // Eigen-decomposition cached at construction (ascending eigenvalues).
    const Vector& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }

  private:
    Matrix entries_;
    double trace_hint_;
    Vector eigenvalues_;
    Matrix eigenvectors_;
};

struct SignedSplit {
    DensityMatrix positive_part;
    DensityMatrix negative_part;
};

DensityMatrix new_density(const Matrix& m, double trace_hint);

// exp(-H/T)/Z via eigendecomposition, spectrum shifted so the smallest
// exponent is zero before exponentiating.
DensityMatrix thermal_state(const Matrix& hamiltonian, double temperature);

// sqrt(Tr[(a-b)^2])
double matrix_distance(const DensityMatrix& a, const DensityMatrix& b);

// Tr(ab)/sqrt(Tr(a^2) Tr(b^2)); 1 for proportional states, 0 for states
// with orthogonal support ("foreign" matrices).
double similarity_K(const DensityMatrix& a, const DensityMatrix& b);

// Spectral split of a Hermitian matrix into PSD positive/negative parts;
// eigenvalues below tol::spectral_drop in magnitude are dropped.
SignedSplit split_signed(const Matrix& omega);

// Reduced matrix of one tensor factor; keep is 0 (first) or 1 (second).
DensityMatrix partial_trace(const DensityMatrix& joint, int dim_first, int dim_second, int keep);
Matrix partial_trace_raw(const Matrix& joint, int dim_first, int dim_second, int keep);

bool is_hermitian(const Matrix& m, double eps = tol::hermitian);

}  // namespace precoh
