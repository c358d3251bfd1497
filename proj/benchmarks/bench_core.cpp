#include <benchmark/benchmark.h>

#include "obd/conjugacy.hpp"
#include "obd/diagram.hpp"
#include "obd/paths.hpp"
#include "obd/premorphism.hpp"
#include "obd/rank_reduction.hpp"
#include "obd/transforms.hpp"
#include "obd/words.hpp"

namespace {

std::string data(const std::string& name) {
  return std::string(OBD_BENCH_DATA_DIR) + "/" + name;
}

void BM_compose_morphisms(benchmark::State& state) {
  auto d = obd::load_obd(data("chacon_c.obd"));
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(obd::compose_morphisms(d, 1, depth));
  }
}
BENCHMARK(BM_compose_morphisms)->Arg(5)->Arg(9)->Arg(13);

void BM_path_ordinal_roundtrip(benchmark::State& state) {
  auto d = obd::load_obd(data("chacon_c.obd"));
  int depth = static_cast<int>(state.range(0));
  auto count = obd::path_count(d, depth, 0);
  for (auto _ : state) {
    for (unsigned long long j = 0; j < count; j += 7) {
      auto p = obd::path_from_ordinal(d, depth, 0, j);
      benchmark::DoNotOptimize(obd::path_ordinal(d, p));
    }
  }
}
BENCHMARK(BM_path_ordinal_roundtrip)->Arg(6)->Arg(8);

void BM_vershik_orbit(benchmark::State& state) {
  auto d = obd::load_obd(data("chacon_c.obd"));
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto p = obd::extreme_path(d, depth, obd::Extreme::Min, 0);
    for (int i = 0; i < 200; ++i) {
      try {
        p = obd::vershik_successor(d, p);
      } catch (const obd::Error&) {
        break;
      }
    }
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_vershik_orbit)->Arg(8)->Arg(10);

void BM_is_independent(benchmark::State& state) {
  // Composed images form increasingly long independent codes.
  auto f = obd::load_opm(data("chacon.opm"));
  auto composed = obd::compose_morphisms(f.b1, 1, static_cast<int>(state.range(0)));
  obd::Code code;
  for (obd::Sym v = 0; v < composed.size(); ++v) code.add(composed.image(v));
  for (obd::Sym w = 0; w < f.tau(1).size(); ++w) code.add(f.tau(1).image(w));
  for (auto _ : state) {
    benchmark::DoNotOptimize(obd::is_independent(code));
  }
}
BENCHMARK(BM_is_independent)->Arg(4)->Arg(6)->Arg(8);

void BM_conjugacy_pipeline(benchmark::State& state) {
  auto f = obd::load_opm(data("chacon.opm"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(obd::conjugacy_certify(f, 4));
  }
}
BENCHMARK(BM_conjugacy_pipeline);

void BM_reduce_rank(benchmark::State& state) {
  auto f = obd::load_opm(data("chacon.opm"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(obd::reduce_rank(f, 8));
  }
}
BENCHMARK(BM_reduce_rank);

void BM_verify_certificate(benchmark::State& state) {
  auto cert = obd::load_cert(data("chacon_equiv.cert"));
  auto diagrams = obd::load_cert_diagrams(cert, data("chacon_equiv.cert"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        obd::verify_equivalence_certificate(cert, diagrams.first, diagrams.second));
  }
}
BENCHMARK(BM_verify_certificate);

}  // namespace

BENCHMARK_MAIN();
