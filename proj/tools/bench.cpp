// Timing harness for the solver: the serial elimination kernel vs the OpenMP
// one (bit-identical by construction), and instance-level batch scaling.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "ccm/formulation.hpp"
#include "ccm/lpsolve.hpp"
#include "ccm/simplex.hpp"
#include "ccm/synth.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

static void bench_kernel(int rows, int cols, int reps) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int stride = cols + 1;
  std::vector<double> base(static_cast<size_t>(rows) * stride);
  for (auto& v : base) v = u(rng);
  // Make the pivot usable.
  base[static_cast<size_t>(rows / 2) * stride + cols / 2] = 2.0;

  auto run = [&](bool parallel) {
    std::vector<double> tab = base;
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) {
      if (parallel)
        ccm::lp::detail::eliminate_parallel(tab.data(), rows, stride, rows / 2, cols / 2);
      else
        ccm::lp::detail::eliminate_serial(tab.data(), rows, stride, rows / 2, cols / 2);
    }
    return seconds_since(t0);
  };
  const double ts = run(false);
  const double tp = run(true);
  std::printf("kernel   %4dx%-4d reps=%-4d  serial %8.3f ms   openmp %8.3f ms   speedup %.2fx\n",
              rows, cols, reps, ts * 1e3, tp * 1e3, ts / tp);
}

static std::vector<ccm::LpInstance> make_instances(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  ccm::SynthOptions opts;
  opts.max_buses = 6;
  opts.max_gens = 10;
  opts.max_loads = 5;
  opts.max_lines = 8;
  opts.max_contingencies = 8;
  std::vector<ccm::LpInstance> out;
  while (static_cast<int>(out.size()) < count) {
    const ccm::MarketSystem raw = ccm::random_system(rng, opts);
    const ccm::System sys = ccm::System::validate(raw);
    out.push_back(ccm::build_network_lp(sys));
  }
  return out;
}

static void bench_solve(const std::vector<ccm::LpInstance>& lps) {
  ccm::SolverOptions serial, parallel;
  parallel.parallel = true;

  double ts = 0.0, tp = 0.0;
  int mism = 0;
  for (const auto& lp : lps) {
    auto t0 = Clock::now();
    const auto a = ccm::solve(lp, serial);
    ts += seconds_since(t0);
    t0 = Clock::now();
    const auto b = ccm::solve(lp, parallel);
    tp += seconds_since(t0);
    if (a.primal.x != b.primal.x || a.dual.row != b.dual.row) ++mism;
  }
  std::printf("solve    %zu instances        serial %8.3f ms   openmp %8.3f ms   mismatches %d\n",
              lps.size(), ts * 1e3, tp * 1e3, mism);
}

static void bench_batch(const std::vector<ccm::LpInstance>& lps) {
  const int n = static_cast<int>(lps.size());
  std::vector<double> obj(n);

  auto t0 = Clock::now();
  for (int i = 0; i < n; ++i) obj[i] = ccm::solve(lps[i]).primal.objective;
  const double ts = seconds_since(t0);

  std::vector<double> obj_par(n);
  t0 = Clock::now();
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) obj_par[i] = ccm::solve(lps[i]).primal.objective;
  const double tp = seconds_since(t0);

  int mism = 0;
  for (int i = 0; i < n; ++i)
    if (obj[i] != obj_par[i]) ++mism;
  std::printf("batch    %d solves x %d threads  serial %8.3f ms   openmp %8.3f ms   speedup %.2fx   mismatches %d\n",
              n, omp_get_max_threads(), ts * 1e3, tp * 1e3, ts / tp, mism);
}

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  bench_kernel(256, 512, 200);
  bench_kernel(1024, 2048, 20);
  bench_kernel(2048, 4096, 8);
  std::printf("\n");
  const auto lps = make_instances(40, 2024);
  bench_solve(lps);
  bench_batch(lps);
  return 0;
}
