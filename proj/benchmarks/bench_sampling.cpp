// Timing comparison of the OpenMP sampling/scan kernels against their serial
// reference twins. Not a correctness test (the suite asserts bitwise equality).
#include <chrono>
#include <cstdio>

#include "dsym/carleson.hpp"
#include "dsym/parallel.hpp"
#include "dsym/symbol.hpp"

using namespace dsym;
using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main() {
    DirichletSymbol sym = parse_symbol("9/2 - 2^-s - 3^-s - 2*6^-s");
    SymbolProfile prof = degree_profile(sym);
    BohrLift L = lift(sym, prof.optimal_set);

    std::printf("workers available: %d\n\n", max_workers());

    {
        SampleConfig cfg;
        cfg.seed = 7;
        cfg.chunks = 64;
        CarlesonBox box{0.0, 0.05};
        const long long n = 4000000;

        auto t0 = Clock::now();
        MeasureEstimate ref = box_measure_reference(L, box, cfg, n);
        double t_ref = seconds_since(t0);

        t0 = Clock::now();
        MeasureEstimate par = box_measure(L, box, cfg, n);
        double t_par = seconds_since(t0);

        std::printf("box_measure         n=%lld\n", n);
        std::printf("  serial reference  %.3fs   value %.6e\n", t_ref, ref.value);
        std::printf("  openmp kernel     %.3fs   value %.6e\n", t_par, par.value);
        std::printf("  speedup           %.2fx   (hits %lld vs %lld)\n\n", t_ref / t_par,
                    ref.hits, par.hits);
    }
    {
        BoundaryConfig cfg;
        cfg.grid_per_dim = 128;

        auto t0 = Clock::now();
        BoundaryScan ref = find_boundary_points_reference(L, cfg);
        double t_ref = seconds_since(t0);

        t0 = Clock::now();
        BoundaryScan par = find_boundary_points(L, cfg);
        double t_par = seconds_since(t0);

        std::printf("boundary scan       grid=%d^2\n", cfg.grid_per_dim);
        std::printf("  serial reference  %.3fs   points %zu\n", t_ref, ref.points.size());
        std::printf("  openmp kernel     %.3fs   points %zu\n", t_par, par.points.size());
        std::printf("  speedup           %.2fx\n", t_ref / t_par);
    }
    return 0;
}
