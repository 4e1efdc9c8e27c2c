#include "precoh/collision.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace precoh {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_unitary(const Matrix& u, double eps, const char* what) {
    Matrix g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    if (g.cwiseAbs().maxCoeff() > eps)
        throw NotUnitary(std::string(what) + ": unitarity violated beyond tolerance");
}

Matrix symmetrized(Matrix m) {
    m = 0.5 * (m + m.adjoint().eval());
    return m;
}

}  // namespace

CollisionDelta scatter(const DensityMatrix& rho_a, const DensityMatrix& molecule,
                       const Matrix& joint_unitary) {
    const int da = rho_a.dim();
    const int dm = molecule.dim();
    if (joint_unitary.rows() != joint_unitary.cols() ||
        joint_unitary.rows() != static_cast<long>(da) * dm)
        throw DimMismatch("scatter: joint unitary dimension mismatch");
    check_unitary(joint_unitary, 1e-10, "scatter");

    const Matrix joint = kron(rho_a.entries(), molecule.entries());
    const Matrix joint_after = joint_unitary * joint * joint_unitary.adjoint();
    Matrix rho_after = symmetrized(partial_trace_raw(joint_after, da, dm, 0));

    // Depletion of each apparatus eigenstate: express U in the product of
    // the two eigenbases; the surviving amplitude of |k,g> is the diagonal
    // element, everything else is scattering.
    const Matrix basis = kron(rho_a.eigenvectors(), molecule.eigenvectors());
    const Matrix u_eig = basis.adjoint() * joint_unitary * basis;

    std::vector<double> depletion(da, 0.0);
    for (int k = 0; k < da; ++k) {
        double d = 0.0;
        for (int g = 0; g < dm; ++g) {
            const int idx = k * dm + g;
            const double survive = std::norm(u_eig(idx, idx));
            d += molecule.eigenvalues()[g] * (1.0 - survive);
        }
        depletion[k] = d;
    }

    Matrix delta_minus = Matrix::Zero(da, da);
    double epsilon = 0.0;
    {
        Vector diag(da);
        for (int k = 0; k < da; ++k) {
            diag[k] = rho_a.eigenvalues()[k] * depletion[k];
            epsilon += diag[k];
        }
        delta_minus = rho_a.eigenvectors() * diag.cast<std::complex<double>>().asDiagonal() *
                      rho_a.eigenvectors().adjoint();
        delta_minus = symmetrized(std::move(delta_minus));
    }

    Matrix delta_plus = symmetrized(rho_after - rho_a.entries() + delta_minus);

    return CollisionDelta{DensityMatrix(std::move(rho_after), rho_a.trace_hint()),
                          std::move(delta_plus), std::move(delta_minus), epsilon,
                          std::move(depletion)};
}

SensitivityReport eigvec_sensitivity(const DensityMatrix& rho, const Matrix& perturbation,
                                     double gap_floor) {
    if (!is_hermitian(perturbation, 1e-10))
        throw NotHermitian("eigvec_sensitivity: perturbation is not Hermitian");
    if (perturbation.rows() != rho.dim())
        throw DimMismatch("eigvec_sensitivity: dimension mismatch");

    const Matrix in_eigbasis = rho.eigenvectors().adjoint() * perturbation * rho.eigenvectors();
    const Vector& p = rho.eigenvalues();

    SensitivityReport report;
    report.gap_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < rho.dim(); ++k) {
        for (int k2 = 0; k2 < rho.dim(); ++k2) {
            if (k2 == k) continue;
            SensitivityTerm term;
            term.k = k;
            term.k_other = k2;
            term.gap = std::abs(p[k] - p[k2]);
            report.gap_min = std::min(report.gap_min, term.gap);
            const double num = std::abs(in_eigbasis(k2, k));
            if (term.gap < gap_floor) {
                term.degenerate = true;
            } else {
                term.magnitude = num / term.gap;
                report.max_term = std::max(report.max_term, term.magnitude);
            }
            report.terms.push_back(term);
        }
    }
    return report;
}

Matrix haar_unitary(int dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            z(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        std::complex<double> d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0.0 ? d / a : 1.0);
    }
    return q;
}

CollisionSchedule random_collision_schedule(double rate, double t_end, std::uint64_t seed,
                                            int apparatus_dim, int molecule_dim) {
    if (rate < 0.0) throw BadSchedule("random_collision_schedule: negative rate");
    CollisionSchedule schedule;
    if (rate == 0.0 || t_end <= 0.0) return schedule;

    Rng rng = make_rng(seed);
    std::exponential_distribution<double> gap(rate);
    const DensityMatrix molecule(
        Matrix::Identity(molecule_dim, molecule_dim) / static_cast<double>(molecule_dim), 1.0);

    double t = gap(rng);
    while (t < t_end) {
        schedule.push_back({t, molecule, haar_unitary(apparatus_dim * molecule_dim, rng)});
        t += gap(rng);
    }
    return schedule;
}

namespace {

// exp(-iH t) from the cached spectral decomposition of H.
class Propagator {
  public:
    explicit Propagator(const Matrix& hamiltonian) {
        if (!is_hermitian(hamiltonian, 1e-10))
            throw NotHermitian("evolve_with_source: Hamiltonian is not Hermitian");
        Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian);
        energies_ = es.eigenvalues();
        vecs_ = es.eigenvectors();
        Matrix g = vecs_.adjoint() * vecs_;
        g.diagonal().array() -= 1.0;
        if (g.cwiseAbs().maxCoeff() > 1e-8)
            throw NonUnitaryDrift("evolve_with_source: propagator basis not unitary");
    }

    Matrix at(double t) const {
        Eigen::VectorXcd phases(energies_.size());
        for (int i = 0; i < energies_.size(); ++i)
            phases[i] = std::exp(std::complex<double>(0.0, -energies_[i] * t));
        return vecs_ * phases.asDiagonal() * vecs_.adjoint();
    }

    Matrix evolve(const Matrix& rho, double t) const {
        const Matrix u = at(t);
        Matrix out = u * rho * u.adjoint();
        return 0.5 * (out + out.adjoint().eval());
    }

  private:
    Vector energies_;
    Matrix vecs_;
};

}  // namespace

OmegaTrajectory evolve_with_source(const DensityMatrix& rho0, const Matrix& hamiltonian,
                                   const CollisionSchedule& schedule, double t_end, double dt,
                                   double iso_reference_time) {
    if (!(dt > 0.0)) throw BadSchedule("evolve_with_source: dt must be positive");
    if (!(t_end >= 0.0)) throw BadSchedule("evolve_with_source: t_end must be nonnegative");
    if (iso_reference_time < 0.0 || iso_reference_time > t_end)
        throw BadSchedule("evolve_with_source: iso reference time outside [0, t_end]");

    CollisionSchedule events = schedule;
    std::sort(events.begin(), events.end(),
              [](const CollisionEvent& a, const CollisionEvent& b) { return a.time < b.time; });
    for (const auto& ev : events)
        if (ev.time < 0.0 || ev.time > t_end)
            throw BadSchedule("evolve_with_source: collision time outside [0, t_end]");

    const Propagator prop(hamiltonian);

    // Walk the sample grid, applying collisions as they come due. The
    // reference state for rho_iso is captured when the walk passes
    // iso_reference_time (which is snapped to the grid).
    const int n_samples = static_cast<int>(std::floor(t_end / dt + 0.5)) + 1;
    const int iso_index =
        std::clamp(static_cast<int>(std::floor(iso_reference_time / dt + 0.5)), 0, n_samples - 1);

    OmegaTrajectory traj;
    traj.times.reserve(n_samples);

    auto run = [&](auto&& on_sample) {
        Matrix rho = rho0.entries();
        double t = 0.0;
        std::size_t next_event = 0;
        for (int i = 0; i < n_samples; ++i) {
            const double t_sample = i * dt;
            while (next_event < events.size() && events[next_event].time <= t_sample) {
                const auto& ev = events[next_event];
                rho = prop.evolve(rho, ev.time - t);
                t = ev.time;
                DensityMatrix state(rho, rho0.trace_hint());
                rho = scatter(state, ev.molecule, ev.joint_unitary).rho_after.entries();
                ++next_event;
            }
            rho = prop.evolve(rho, t_sample - t);
            t = t_sample;
            on_sample(i, t_sample, rho);
        }
    };

    // First pass only locates the iso reference state.
    Matrix rho_ref = rho0.entries();
    if (iso_index > 0)
        run([&](int i, double, const Matrix& rho) {
            if (i == iso_index) rho_ref = rho;
        });

    const double t_ref = iso_index * dt;
    run([&](int, double t_sample, const Matrix& rho) {
        DensityMatrix state(rho, rho0.trace_hint());
        Matrix iso = prop.evolve(rho_ref, t_sample - t_ref);
        DensityMatrix iso_state(iso, rho0.trace_hint());

        Matrix omega = 0.5 * ((rho - iso) + (rho - iso).adjoint().eval());
        const SignedSplit split = split_signed(omega);

        traj.times.push_back(t_sample);
        traj.trace_plus.push_back(split.positive_part.trace());
        traj.purity.push_back(state.entries().squaredNorm());
        traj.distance_iso.push_back(matrix_distance(state, iso_state));
        traj.similarity_iso.push_back(similarity_K(state, iso_state));
        traj.omega.push_back(std::move(omega));
        traj.rho.push_back(std::move(state));
        traj.rho_iso.push_back(std::move(iso_state));
    });

    return traj;
}

}  // namespace precoh
