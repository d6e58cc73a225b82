// Micro-benchmark comparing the serial reference kernels against the
// OpenMP-parallel ones, and checking they agree bitwise.
#include "calgeo/ebin.hpp"
#include "calgeo/grid.hpp"
#include "calgeo/ops.hpp"

#include <chrono>
#include <cstdio>
#include <random>

using namespace calgeo;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    f(); // warm up
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) f();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-28s %10.3f ms %10.3f ms   x%5.2f   %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms,
                match ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main() {
    auto grid = GridSpec::torus2d(256);
    std::mt19937_64 rng(42);
    ScalarField f = random_smooth_field(grid, rng, 1.0);
    SymTensorField g = reference_metric(grid) + random_sym_tensor(grid, rng, 0.1);
    SymTensorField h = random_sym_tensor(grid, rng, 1.0);
    SymTensorField k = random_sym_tensor(grid, rng, 1.0);

    std::printf("grid torus2d:256 (%zu nodes)\n", grid->nodes);
    std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "parallel",
                "speedup");

    {
        std::vector<double> a(grid->nodes), b(grid->nodes);
        const double ts = time_ms(
            [&] { grid->apply_axis_derivative_serial(f.v, a, 0, 1); }, 20);
        const double tp =
            time_ms([&] { grid->apply_axis_derivative(f.v, b, 0, 1); }, 20);
        row("axis derivative", ts, tp, a == b);
    }
    {
        ScalarField a(grid), b(grid);
        const double ts =
            time_ms([&] { a = pointwise_trace_pair_serial(g, h, k); }, 20);
        const double tp = time_ms([&] { b = pointwise_trace_pair(g, h, k); }, 20);
        row("metric trace pairing", ts, tp, a.v == b.v);
    }
    {
        ebin::GeodesicResult a, b;
        SymTensorField hsmall = 0.05 * h;
        const double ts = time_ms(
            [&] { a = ebin::geodesic_serial(g, hsmall, 0.1, 50); }, 3);
        const double tp =
            time_ms([&] { b = ebin::geodesic(g, hsmall, 0.1, 50); }, 3);
        bool match = a.path.times == b.path.times;
        for (std::size_t j = 0; match && j < a.path.metrics.size(); ++j)
            match = a.path.metrics[j].v == b.path.metrics[j].v;
        row("ebin geodesic (50 steps)", ts, tp, match);
    }
    return 0;
}
