// Timing comparison of the OpenMP phase-sum kernel against the serial
// reference, plus one end-to-end propagator assembly. The parallel kernel
// must be bitwise identical to the serial one; any mismatch is reported.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "dprime/experiments.hpp"
#include "dprime/phase_sum.hpp"

using namespace dprime;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::high_resolution_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::high_resolution_clock::now() - t0)
        .count();
}

void bench_kernel(int n_targets, int n_nodes) {
    std::mt19937 rng(n_targets + n_nodes);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    std::vector<double> nodes(n_nodes), alphas(n_targets);
    std::vector<Complex> weights(n_nodes);
    for (auto& v : nodes) v = 50.0 * ur(rng);
    for (auto& v : alphas) v = 10.0 * ur(rng);
    for (auto& w : weights) w = Complex{ur(rng), ur(rng)};
    std::vector<Complex> out_s(n_targets), out_p(n_targets);

    auto t0 = chrono::high_resolution_clock::now();
    phase_sum_serial(nodes, weights, alphas, out_s);
    const double serial_ms = ms_since(t0);

    t0 = chrono::high_resolution_clock::now();
    phase_sum(nodes, weights, alphas, out_p);
    const double parallel_ms = ms_since(t0);

    int mismatches = 0;
    for (int i = 0; i < n_targets; ++i)
        if (out_s[i] != out_p[i]) ++mismatches;

    std::printf("%8d x %-8d %10.2f %10.2f %8.2fx %s\n", n_targets, n_nodes, serial_ms,
                parallel_ms, serial_ms / parallel_ms,
                mismatches == 0 ? "bitwise-equal" : "MISMATCH");
}

void bench_propagator() {
    const ModelParams params{0.05, 1.0, 1.0, 1.0};
    const PhasePoint xi{-4.0, 2.0};
    const CoherentState psi = CoherentState::initial(params, xi);
    const GridSpec grid = experiment_grid(params, xi, 2.0, SweepKind::Dynamics);

    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    auto t0 = chrono::high_resolution_clock::now();
    const WaveSample a = evolve_exact(params, psi, 2.0, grid);
    const double serial_ms = ms_since(t0);

    omp_set_num_threads(max_threads);
    t0 = chrono::high_resolution_clock::now();
    const WaveSample b = evolve_exact(params, psi, 2.0, grid);
    const double parallel_ms = ms_since(t0);

    int mismatches = 0;
    for (int i = 0; i < grid.n; ++i)
        if (a.values[i] != b.values[i]) ++mismatches;

    std::printf(
        "evolve_exact, n = %d grid, t = 2: %0.1f ms (1 thread) vs %0.1f ms (%d threads),"
        " %.2fx, %s\n",
        grid.n, serial_ms, parallel_ms, max_threads, serial_ms / parallel_ms,
        mismatches == 0 ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("phase_sum kernel, %d threads available\n", omp_get_max_threads());
    std::printf("%8s x %-8s %10s %10s %9s\n", "targets", "nodes", "serial/ms", "omp/ms",
                "speedup");
    bench_kernel(1024, 2048);
    bench_kernel(4096, 8192);
    bench_kernel(8192, 16384);
    bench_kernel(16384, 16384);
    bench_propagator();
    return 0;
}
