#include "precoh/denmat.hpp"

#include <atomic>
#include <cmath>

namespace precoh {

namespace {
std::atomic<int> g_max_dim{64};
}

int max_matrix_dim() { return g_max_dim.load(); }
void set_max_matrix_dim(int dim) { g_max_dim.store(dim); }

bool is_hermitian(const Matrix& m, double eps) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= eps;
}

DensityMatrix::DensityMatrix(Matrix entries, double trace_hint)
    : entries_(std::move(entries)), trace_hint_(trace_hint) {
    if (entries_.rows() != entries_.cols())
        throw DimMismatch("density matrix must be square");
    if (entries_.rows() == 0 || entries_.rows() > max_matrix_dim())
        throw DimMismatch("density matrix dimension out of range [1, " +
                          std::to_string(max_matrix_dim()) + "]");
    if (!is_hermitian(entries_))
        throw NotHermitian("matrix is not Hermitian within " + std::to_string(tol::hermitian));

    const double tr = entries_.trace().real();
    if (std::abs(tr - trace_hint_) > tol::trace)
        throw TraceMismatch("trace " + std::to_string(tr) + " differs from hint " +
                            std::to_string(trace_hint_));

    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_);
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();

    const double min_eig = eigenvalues_.minCoeff();
    if (min_eig < -tol::eigen_clamp)
        throw NotPositive("eigenvalue " + std::to_string(min_eig) + " below -" +
                          std::to_string(tol::eigen_clamp));
    if (min_eig < 0.0) {
        // Rounding-level negativity: clamp and rebuild the entries.
        for (int i = 0; i < eigenvalues_.size(); ++i)
            if (eigenvalues_[i] < 0.0) eigenvalues_[i] = 0.0;
        entries_ = eigenvectors_ * eigenvalues_.cast<std::complex<double>>().asDiagonal() *
                   eigenvectors_.adjoint();
    }
}

DensityMatrix new_density(const Matrix& m, double trace_hint) {
    return DensityMatrix(m, trace_hint);
}

DensityMatrix thermal_state(const Matrix& hamiltonian, double temperature) {
    if (!is_hermitian(hamiltonian, 1e-10))
        throw NotHermitian("Hamiltonian is not Hermitian");
    if (!(temperature > 0.0))
        throw NonPositiveTemperature("temperature must be positive");

    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian);
    const Vector& energies = es.eigenvalues();
    const double e_min = energies.minCoeff();

    Vector weights(energies.size());
    for (int i = 0; i < energies.size(); ++i)
        weights[i] = std::exp(-(energies[i] - e_min) / temperature);
    weights /= weights.sum();

    Matrix rho = es.eigenvectors() * weights.cast<std::complex<double>>().asDiagonal() *
                 es.eigenvectors().adjoint();
    // Symmetrize away multiplication round-off before validation.
    rho = 0.5 * (rho + rho.adjoint().eval());
    return DensityMatrix(std::move(rho), 1.0);
}

double matrix_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimMismatch("matrix_distance: dimensions differ");
    return (a.entries() - b.entries()).norm();
}

double similarity_K(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw DimMismatch("similarity_K: dimensions differ");
    const double na = a.entries().squaredNorm();
    const double nb = b.entries().squaredNorm();
    if (na <= 0.0 || nb <= 0.0) throw ZeroMatrix("similarity_K: zero matrix");
    const double overlap = (a.entries() * b.entries()).trace().real();
    return overlap / std::sqrt(na * nb);
}

SignedSplit split_signed(const Matrix& omega) {
    if (!is_hermitian(omega))
        throw NotHermitian("split_signed: input is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix> es(omega);
    const Vector& lambda = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    const int n = static_cast<int>(lambda.size());

    Vector pos = Vector::Zero(n), neg = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (lambda[i] > tol::spectral_drop)
            pos[i] = lambda[i];
        else if (lambda[i] < -tol::spectral_drop)
            neg[i] = -lambda[i];
    }
    auto rebuild = [&](const Vector& d) {
        Matrix m = vecs * d.cast<std::complex<double>>().asDiagonal() * vecs.adjoint();
        m = 0.5 * (m + m.adjoint().eval());
        return m;
    };
    Matrix p = rebuild(pos), q = rebuild(neg);
    return SignedSplit{DensityMatrix(p, p.trace().real()), DensityMatrix(q, q.trace().real())};
}

Matrix partial_trace_raw(const Matrix& joint, int dim_first, int dim_second, int keep) {
    if (keep != 0 && keep != 1) throw DimMismatch("partial_trace: keep must be 0 or 1");
    if (joint.rows() != static_cast<long>(dim_first) * dim_second)
        throw DimMismatch("partial_trace: joint dimension is not the product of the factors");

    const int dk = keep == 0 ? dim_first : dim_second;
    const int dt = keep == 0 ? dim_second : dim_first;
    Matrix out = Matrix::Zero(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            std::complex<double> sum = 0.0;
            for (int t = 0; t < dt; ++t) {
                const int row = keep == 0 ? a * dim_second + t : t * dim_second + a;
                const int col = keep == 0 ? b * dim_second + t : t * dim_second + b;
                sum += joint(row, col);
            }
            out(a, b) = sum;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& joint, int dim_first, int dim_second, int keep) {
    Matrix out = partial_trace_raw(joint.entries(), dim_first, dim_second, keep);
    return DensityMatrix(std::move(out), joint.trace_hint());
}

}  // namespace precoh
