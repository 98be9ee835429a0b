#include <benchmark/benchmark.h>

#include "bvc/analysis.hpp"
#include "bvc/assembly.hpp"
#include "bvc/solver.hpp"

namespace {

struct Fixture {
  bvc::ImplicitDomain domain = bvc::ring_domain();
  bvc::Mesh mesh;
  bvc::PrimalSpace primal;
  bvc::MultiplierSpace multipliers;

  explicit Fixture(int level)
      : mesh(bvc::precompute_boundary_geometry(bvc::ladder_mesh(bvc::MeshFamily::annulus, level, domain), domain, bvc::default_facet_points(2))),
        primal(mesh, 2, true),
        multipliers(mesh, 1) {}
};

Fixture& fixture(int level) {
  static Fixture* fixtures[6] = {};
  if (!fixtures[level]) fixtures[level] = new Fixture(level);
  return *fixtures[level];
}

bvc::ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) ? bvc::ExecPolicy::parallel : bvc::ExecPolicy::serial;
}

void BM_AssembleBvc(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  bvc::AssemblyOptions options;
  options.policy = policy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(bvc::assemble_bvc(f.primal, f.multipliers, f.domain, options));
  state.counters["dofs"] = f.primal.dof_count();
}

void BM_ErrorNorms(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  const bvc::PrimalField u(f.primal, f.primal.interpolate(f.domain.u_exact));
  for (auto _ : state) benchmark::DoNotOptimize(bvc::l2_h1_errors(u, f.domain, -1, policy_of(state)));
  state.counters["cells"] = f.mesh.num_cells();
}

void BM_Solve(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  const bvc::SaddleSystem system = bvc::assemble_bvc(f.primal, f.multipliers, f.domain);
  for (auto _ : state) benchmark::DoNotOptimize(bvc::solve(system, f.primal, f.multipliers));
}

}  // namespace

// Second argument: 0 serial reference, 1 OpenMP.
BENCHMARK(BM_AssembleBvc)->ArgsProduct({{2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErrorNorms)->ArgsProduct({{2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
