#include "rfsim/kernels.hpp"
#include "rfsim/kinetics.hpp"
#include "rfsim/rd_solver.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

using namespace rfsim;

// Args: {grid size, exec} with exec 0 = serial, 1 = parallel.
namespace {

struct Setup {
  Grid grid;
  SpeciesSet species;
  SpeciesField Y;
  PaddedField padded;
  VelocityField v;
  Eigen::VectorXd theta;
  ChainModel chain{1.0, 4.0, 0.5, 6.0, Eigen::Vector3d(3.0, 2.0, 1.0)};

  explicit Setup(int n)
      : grid(n, n, 1.0, 1.0), species(Eigen::Vector3d(1.0, 2.0, 3.0), diffusion(), 1.0), v(VelocityField::lifting(grid)) {
    Y.boundary = SpeciesBoundary::Channel;
    Y.inlet = Eigen::Vector3d(0.5, 0.3, 0.2);
    Y.Y.resize(3, grid.cells());
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const double r2 = std::pow(grid.xc(i) - 0.5, 2) + std::pow(grid.zc(k) - 0.4, 2);
        const double b = 0.4 * std::exp(-20.0 * r2);
        Y.Y.col(grid.cell(i, k)) = (1.0 - b) * Y.inlet + b * Eigen::Vector3d(0.1, 0.2, 0.7);
      }
    padded = pad_field(grid, Y.Y, &Y.inlet);
    theta = Eigen::VectorXd::Constant(grid.cells(), 0.5);
  }

  static Eigen::MatrixXd diffusion() {
    Eigen::MatrixXd D(3, 3);
    D << 0.0, 1.0, 0.8, 1.0, 0.0, 0.5, 0.8, 0.5, 0.0;
    return D;
  }
};

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "parallel" : "serial");
  state.counters["threads"] = state.range(1) ? omp_get_max_threads() : 1;
  state.counters["cells"] = static_cast<double>(state.range(0) * state.range(0));
}

void BM_FaceCoefficients(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  FaceCoefficients c;
  for (auto _ : state) {
    face_coefficients(s.grid, s.species, s.padded, FluxModel::StefanMaxwell, exec_of(state), c);
    benchmark::DoNotOptimize(c.x.data());
  }
  label(state);
}

void BM_DiffusiveDivergence(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  FaceCoefficients c;
  face_coefficients(s.grid, s.species, s.padded, FluxModel::StefanMaxwell, Exec::Serial, c);
  Eigen::MatrixXd out;
  for (auto _ : state) {
    diffusive_divergence(s.grid, s.padded, c, exec_of(state), out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_QLaplacian(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  Eigen::MatrixXd out;
  for (auto _ : state) {
    q_laplacian(s.grid, s.padded, 1e-3, 4.0, exec_of(state), out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_UpwindAdvection(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  Eigen::MatrixXd out;
  for (auto _ : state) {
    upwind_advection(s.grid, s.v, s.padded, exec_of(state), out);
    benchmark::DoNotOptimize(out.data());
  }
  label(state);
}

void BM_SpeciesStep(benchmark::State& state) {
  const Setup s(static_cast<int>(state.range(0)));
  SpeciesStepper stepper(s.grid, 3);
  SpeciesStepOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) {
    SpeciesField next = stepper.step(s.species, s.chain, s.Y, s.v, s.theta, 1e-3, opts);
    benchmark::DoNotOptimize(next.Y.data());
  }
  label(state);
  state.counters["krylov_iterations"] = stepper.last_iterations();
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int n : {64, 128, 256})
    for (int e : {0, 1}) b->Args({n, e});
}

}  // namespace

BENCHMARK(BM_FaceCoefficients)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffusiveDivergence)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QLaplacian)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UpwindAdvection)->Apply(kernel_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpeciesStep)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
