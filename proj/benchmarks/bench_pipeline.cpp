#include "neumann/complex.hpp"
#include "neumann/fem.hpp"
#include "neumann/mesh.hpp"
#include "neumann/nodal.hpp"

#include <benchmark/benchmark.h>

using namespace neumann;

namespace {

MorseField lambda17() { return MorseField({{1.0, 1, 4, 0.0}, {0.6, 4, -1, 0.0}}); }

TriMesh square(int n) {
  MeshOptions o;
  o.h = kPi / n;
  return mesh_polygon({{0, 0}, {kPi, 0}, {kPi, kPi}, {0, kPi}}, o);
}

void BM_CriticalPoints(benchmark::State& state) {
  const MorseField f = lambda17();
  CriticalOptions o;
  o.seed_grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_critical_points(f, o));
}
BENCHMARK(BM_CriticalPoints)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Complex(benchmark::State& state) {
  const MorseField f = lambda17();
  for (auto _ : state) benchmark::DoNotOptimize(build_complex(f));
}
BENCHMARK(BM_Complex)->Unit(benchmark::kMillisecond);

void BM_NodalSet(benchmark::State& state) {
  const MorseField f = lambda17();
  for (auto _ : state) benchmark::DoNotOptimize(nodal_set(f, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_NodalSet)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MeshSquare(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::size_t vertices = 0;
  for (auto _ : state) {
    const TriMesh m = square(n);
    vertices = m.vertices.size();
  }
  state.counters["vertices"] = static_cast<double>(vertices);
}
BENCHMARK(BM_MeshSquare)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MeshDomain(benchmark::State& state) {
  const NeumannComplex cx = build_complex(lambda17());
  MeshOptions o;
  o.h = 0.025;
  for (auto _ : state) benchmark::DoNotOptimize(mesh_domain(cx, 0, o));
}
BENCHMARK(BM_MeshDomain)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const TriMesh m = square(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_p1(m));
}
BENCHMARK(BM_Assemble)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EigenDense(benchmark::State& state) {
  const FemMatrices fem = assemble_p1(square(static_cast<int>(state.range(0))));
  EigenOptions o;
  o.dense_threshold = 1 << 30;
  for (auto _ : state) benchmark::DoNotOptimize(generalized_eigs(fem, 10, o));
}
BENCHMARK(BM_EigenDense)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_EigenLanczos(benchmark::State& state) {
  const FemMatrices fem = assemble_p1(square(static_cast<int>(state.range(0))));
  EigenOptions o;
  o.dense_threshold = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generalized_eigs(fem, 10, o));
}
BENCHMARK(BM_EigenLanczos)->Arg(16)->Arg(24)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
