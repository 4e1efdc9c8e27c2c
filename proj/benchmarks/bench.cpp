#include <benchmark/benchmark.h>

#include "precoh/collapse.hpp"
#include "precoh/collision.hpp"
#include "precoh/transport.hpp"

using namespace precoh;

namespace {

DensityMatrix random_state(int dim, Rng& rng) {
    std::normal_distribution<double> gauss;
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = {gauss(rng), gauss(rng)};
    Matrix m = a * a.adjoint();
    return DensityMatrix(m / m.trace().real(), 1.0);
}

void bm_scatter_8x4(benchmark::State& state) {
    Rng rng = make_rng(1);
    const DensityMatrix rho = random_state(8, rng);
    const DensityMatrix mol(Matrix::Identity(4, 4) / 4.0, 1.0);
    const Matrix u = haar_unitary(32, rng);
    for (auto _ : state) benchmark::DoNotOptimize(scatter(rho, mol, u));
}

void bm_kpp_step(benchmark::State& state) {
    FrontField field = make_front_field(250.0, 0.25, true);
    for (int i = 0; i < 200; ++i) field = kpp_step(field, 0.025, KppMode::free_boundary);
    for (auto _ : state) benchmark::DoNotOptimize(kpp_step(field, 0.025, KppMode::free_boundary));
}

void bm_collapse_step(benchmark::State& state) {
    Rng rng = make_rng(2);
    Eigen::VectorXd p(3);
    p << 0.2, 0.3, 0.5;
    const SimplexState s0 = make_simplex(p);
    for (auto _ : state) benchmark::DoNotOptimize(step(s0, 1e-3, 1.0, rng));
}

}  // namespace

BENCHMARK(bm_scatter_8x4);
BENCHMARK(bm_kpp_step);
BENCHMARK(bm_collapse_step);
