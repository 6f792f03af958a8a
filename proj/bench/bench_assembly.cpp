#include <benchmark/benchmark.h>

#include <cstdio>
#include <exception>
#include <map>

#include "nsch/app.hpp"

namespace {

struct Fixture {
  nsch::Setup setup;
  nsch::State cand;
};

const Fixture& fixture(int n) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  nsch::RunConfig cfg = nsch::preset("kissing-1to10");
  cfg.adaptive = false;
  cfg.nx = cfg.ny = n;
  Fixture f;
  f.setup = nsch::initial_setup(cfg);
  f.cand = nsch::perturbed_pair(*f.setup.disc, f.setup.state, 1e-3, 7).second;
  return cache.emplace(n, std::move(f)).first->second;
}

void residual(benchmark::State& st, nsch::Exec exec) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto r = nsch::residual(*f.setup.disc, f.setup.state, f.cand, 0.01, exec);
    benchmark::DoNotOptimize(r.data());
  }
  st.counters["threads"] = exec == nsch::Exec::parallel ? nsch::assembly_threads() : 1;
  st.counters["elements"] = f.setup.disc->space().num_elements();
}

void jacobian(benchmark::State& st, nsch::Exec exec) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  nsch::Vector r;
  nsch::SparseMatrix j;
  for (auto _ : st) {
    nsch::residual_and_jacobian(*f.setup.disc, f.setup.state, f.cand, 0.01, r, j, exec);
    benchmark::DoNotOptimize(j);
  }
  st.counters["threads"] = exec == nsch::Exec::parallel ? nsch::assembly_threads() : 1;
  st.counters["elements"] = f.setup.disc->space().num_elements();
}

}  // namespace

BENCHMARK_CAPTURE(residual, serial, nsch::Exec::serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(residual, parallel, nsch::Exec::parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(jacobian, serial, nsch::Exec::serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(jacobian, parallel, nsch::Exec::parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  try {
    nsch::ensure_working_blas(argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
