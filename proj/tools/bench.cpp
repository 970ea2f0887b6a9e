// Serial reference path vs OpenMP path on the grid kernels.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraclab/exec.hpp"
#include "fraclab/fracderiv.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/maximal.hpp"

using namespace fraclab;

namespace {

struct Case {
  std::string name;
  std::function<std::vector<double>(Exec)> run;
};

double seconds(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel timings"};
  int reps = 3;
  std::size_t n = 65;
  app.add_option("--reps", reps, "repetitions (best time kept)")->capture_default_str();
  app.add_option("--n", n, "grid nodes per axis")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  apply_thread_limit_from_env();

  const auto g1 = sample(make_function("gaussian(0,1)"), Grid1D(-4, 4, n));
  const auto gnd = sample(make_function("gaussian(0,1)"), GridND(Grid1D(-4, 4, n), 1));
  const auto g2 = sample(make_function("gaussian(0,1)", 2), GridND(Grid1D(-3, 3, n / 4 + 1), 2));
  const auto lat = ScaleLattice::dyadic(-6, 4);
  auto spec = [](Exec e) {
    QuadratureSpec q;
    q.exec = e;
    return q;
  };

  const std::vector<Case> cases{
      {"marchaud_left 1D", [&](Exec e) { return marchaud_left(g1, FracOrder::alpha(0.5), spec(e)).values; }},
      {"fraclap semigroup 1D",
       [&](Exec e) { return frac_laplacian_semigroup(gnd, FracOrder::s(0.5, 1), spec(e)).values; }},
      {"fraclap pv 2D", [&](Exec e) { return frac_laplacian_pv(g2, FracOrder::s(0.5, 2), spec(e)).values; }},
      {"m_minus 1D", [&](Exec e) { return m_minus(g1, lat, std::nullopt, e).values; }},
      {"m_hl 2D", [&](Exec e) { return m_hl(g2, lat, std::nullopt, e).values; }},
  };

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-24s %12s %12s %9s %12s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "max |diff|");
  for (const auto& c : cases) {
    std::vector<double> a, b;
    const double ts = seconds([&] { a = c.run(Exec::serial); }, reps);
    const double tp = seconds([&] { b = c.run(Exec::parallel); }, reps);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    std::printf("%-24s %12.4f %12.4f %9.2f %12.3g\n", c.name.c_str(), ts, tp, ts / tp, diff);
  }
  return 0;
}
