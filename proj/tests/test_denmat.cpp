#include <doctest.h>

#include <cmath>

#include "precoh/denmat.hpp"

using namespace precoh;
using std::complex;

namespace {

Matrix pure(int dim, int k) {
    Matrix m = Matrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("construction validates and caches the spectrum") {
    Matrix m(2, 2);
    m << 0.75, complex<double>(0.1, 0.2), complex<double>(0.1, -0.2), 0.25;
    DensityMatrix rho(m, 1.0);
    CHECK(rho.dim() == 2);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.eigenvalues().size() == 2);
    CHECK(rho.eigenvalues()[0] <= rho.eigenvalues()[1]);
    CHECK(rho.eigenvalues().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("construction rejects bad inputs") {
    Matrix herm = Matrix::Identity(2, 2) * 0.5;

    Matrix nonherm = herm;
    nonherm(0, 1) = complex<double>(0.1, 0.0);
    CHECK_THROWS_AS(DensityMatrix(nonherm, 1.0), NotHermitian);

    CHECK_THROWS_AS(DensityMatrix(herm, 0.5), TraceMismatch);

    Matrix neg(2, 2);
    neg << 1.1, 0.0, 0.0, -0.1;
    CHECK_THROWS_AS(DensityMatrix(neg, 1.0), NotPositive);

    CHECK_THROWS_AS(DensityMatrix(Matrix::Ones(2, 3), 1.0), DimMismatch);
}

TEST_CASE("eigensolver noise below the clamp is repaired, not rejected") {
    Matrix m(2, 2);
    m << 1.0 + 1e-10, 0.0, 0.0, -1e-10;
    DensityMatrix rho(m, 1.0);
    CHECK(rho.eigenvalues()[0] >= 0.0);
}

TEST_CASE("dimension cap") {
    const int old = max_matrix_dim();
    set_max_matrix_dim(4);
    Matrix big = Matrix::Identity(8, 8) / 8.0;
    CHECK_THROWS_AS(DensityMatrix(big, 1.0), DimMismatch);
    set_max_matrix_dim(old);
    CHECK_NOTHROW(DensityMatrix(big, 1.0));
}

TEST_CASE("thermal state populations follow the Boltzmann ratio") {
    Matrix h(2, 2);
    h << 0.0, 0.0, 0.0, 1.0;
    DensityMatrix rho = thermal_state(h, 0.5);
    const double ratio = rho.entries()(1, 1).real() / rho.entries()(0, 0).real();
    CHECK(ratio == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));

    // High temperature: maximally mixed. Huge gap: ground state, no overflow.
    DensityMatrix hot = thermal_state(h, 1e12);
    CHECK(hot.entries()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
    Matrix steep(2, 2);
    steep << 0.0, 0.0, 0.0, 1e6;
    DensityMatrix cold = thermal_state(steep, 1.0);
    CHECK(cold.entries()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(thermal_state(h, 0.0), NonPositiveTemperature);
    CHECK_THROWS_AS(thermal_state(h, -1.0), NonPositiveTemperature);
}

TEST_CASE("matrix distance") {
    DensityMatrix a(pure(2, 0), 1.0);
    DensityMatrix b(pure(2, 1), 1.0);
    CHECK(matrix_distance(a, a) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(matrix_distance(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("similarity K: 1 for equal states, 0 for foreign states") {
    DensityMatrix a(pure(3, 0), 1.0);
    DensityMatrix b(pure(3, 1), 1.0);
    Matrix mixed = Matrix::Zero(3, 3);
    mixed(0, 0) = 0.5;
    mixed(1, 1) = 0.5;
    DensityMatrix c(mixed, 1.0);
    CHECK(similarity_K(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity_K(a, b) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(similarity_K(a, c) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    DensityMatrix zero(Matrix::Zero(3, 3), 0.0);
    CHECK_THROWS_AS(similarity_K(a, zero), ZeroMatrix);
}

TEST_CASE("signed split reconstructs and balances a traceless matrix") {
    Matrix omega(2, 2);
    omega << 0.3, complex<double>(0.05, 0.01), complex<double>(0.05, -0.01), -0.3;
    SignedSplit split = split_signed(omega);
    const Matrix recon = split.positive_part.entries() - split.negative_part.entries();
    CHECK((recon - omega).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(split.positive_part.eigenvalues().minCoeff() >= 0.0);
    CHECK(split.negative_part.eigenvalues().minCoeff() >= 0.0);
    CHECK(split.positive_part.trace() ==
          doctest::Approx(split.negative_part.trace()).epsilon(1e-12));

    SignedSplit diag = split_signed([] {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = 0.3;
        m(1, 1) = -0.3;
        return m;
    }());
    CHECK(diag.positive_part.trace() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("partial trace recovers tensor factors") {
    Matrix a(2, 2);
    a << 0.7, 0.1, 0.1, 0.3;
    Matrix b(3, 3);
    b = Matrix::Zero(3, 3);
    b(0, 0) = 0.5;
    b(1, 1) = 0.3;
    b(2, 2) = 0.2;
    Matrix joint = Matrix::Zero(6, 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) joint(i * 3 + k, j * 3 + l) = a(i, j) * b(k, l);

    DensityMatrix rho(joint, 1.0);
    CHECK((partial_trace(rho, 2, 3, 0).entries() - a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((partial_trace(rho, 2, 3, 1).entries() - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    Matrix joint = bell * bell.adjoint();
    DensityMatrix rho(joint, 1.0);
    const Matrix reduced = partial_trace(rho, 2, 2, 0).entries();
    CHECK((reduced - Matrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-12);
}
