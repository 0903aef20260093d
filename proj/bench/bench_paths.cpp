// Serial reference vs OpenMP path simulation on the 1D rough Heston lift.
//
//   bench_paths [n_paths] [horizon] [n_nodes]
//
// Prints wall times, the speedup and whether the two ensembles agree bitwise.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "svlift/lift_sim.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_paths = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
  const double horizon = argc > 2 ? std::atof(argv[2]) : 5.0;
  const std::size_t n_nodes = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 128;

  svlift::SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = horizon;
  cfg.n_paths = n_paths;
  cfg.n_nodes = n_nodes;
  cfg.record_grid = {horizon};
  const svlift::Lift lift(svlift::preset_rough_heston_1d(1.0, 0.3, 0.75, 1.0, 1.0), cfg);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif

  svlift::PathEnsemble serial, parallel;
  const double ts = seconds([&] { serial = svlift::simulate_paths_serial(lift, cfg, 42); });
  const double tp = seconds([&] { parallel = svlift::simulate_paths(lift, cfg, 42); });
  const bool same = serial.vbar.size() == parallel.vbar.size() &&
                    std::memcmp(serial.vbar.data(), parallel.vbar.data(), serial.vbar.size() * sizeof(double)) == 0;

  const double updates = static_cast<double>(n_paths) * (horizon / cfg.dt) * static_cast<double>(n_nodes);
  std::printf("paths=%zu steps=%.0f nodes=%zu threads=%d\n", n_paths, horizon / cfg.dt, n_nodes, threads);
  std::printf("serial   %8.3f s  %6.1f Mupdates/s\n", ts, updates / ts * 1e-6);
  std::printf("openmp   %8.3f s  %6.1f Mupdates/s\n", tp, updates / tp * 1e-6);
  std::printf("speedup  %8.2fx\n", ts / tp);
  std::printf("bitwise identical: %s\n", same ? "yes" : "no");
  return same ? 0 : 1;
}
