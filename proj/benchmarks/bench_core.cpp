/// Microbenchmarks for the hot paths: root finding, resolvent extraction,
/// loop assembly, Nyquist sweeps, the RK4 inner loop, and FFT analysis.
/// Build with -DSLGFM_BUILD_BENCHMARKS=ON and run ./benchmarks/bench_core.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <slgfm/loops.hpp>
#include <slgfm/plant.hpp>
#include <slgfm/poly.hpp>
#include <slgfm/simulator.hpp>
#include <slgfm/stability.hpp>

namespace {

constexpr double kLf = 0.10557757289946795;
constexpr double kCf = 0.047862792395971215;
constexpr double kLg = 0.19795794918650242;

slgfm::PlantParams bench_plant() {
    return slgfm::PlantParams::from_per_unit(kLf, kCf, kLg, 0.0, 8.0, 50.0);
}

slgfm::ControlParams bench_control(slgfm::ControlLaw law) {
    slgfm::ControlParams cp;
    cp.law = law;
    cp.H = 0.5;
    cp.D_p = 50.0;
    cp.D_q = 10.0;
    cp.T_q = 0.051;
    cp.k_iq = 2.99;
    cp.P_st = 0.5;
    return cp;
}

slgfm::Polynomial bench_quintic() {
    const slgfm::PlantParams pp =
        slgfm::PlantParams::from_per_unit(kLf, kCf, kLg, 0.0, 0.0, 50.0);
    const slgfm::ControlParams cp = bench_control(slgfm::ControlLaw::DroopI);
    const slgfm::OperatingPoint op = slgfm::solve_operating_point(pp, cp);
    return slgfm::char_coeffs_lossless(pp, op, cp.D_q, 0.0, cp.k_iq)
        .to_polynomial();
}

void BM_roots_quintic(benchmark::State& state) {
    const slgfm::Polynomial p = bench_quintic();
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgfm::roots(p));
    }
}
BENCHMARK(BM_roots_quintic);

void BM_ss_to_rational(benchmark::State& state) {
    const slgfm::PlantParams pp = bench_plant();
    const slgfm::ControlParams cp = bench_control(slgfm::ControlLaw::Droop);
    const slgfm::LinearPlant plant =
        slgfm::linearize(pp, slgfm::solve_operating_point(pp, cp));
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgfm::ss_to_rational(plant.ss));
    }
}
BENCHMARK(BM_ss_to_rational);

void BM_build_reactive_loop(benchmark::State& state) {
    const slgfm::PlantParams pp = bench_plant();
    const slgfm::ControlParams cp = bench_control(slgfm::ControlLaw::DroopI);
    for (auto _ : state) {
        const slgfm::LinearPlant plant =
            slgfm::linearize(pp, slgfm::solve_operating_point(pp, cp));
        benchmark::DoNotOptimize(
            slgfm::build_droopI_ol(plant, cp.D_q, cp.k_pq, cp.k_iq));
    }
}
BENCHMARK(BM_build_reactive_loop);

void BM_nyquist_sweep(benchmark::State& state) {
    const slgfm::PlantParams pp = bench_plant();
    const slgfm::ControlParams cp = bench_control(slgfm::ControlLaw::Droop);
    const slgfm::LinearPlant plant =
        slgfm::linearize(pp, slgfm::solve_operating_point(pp, cp));
    const slgfm::OlModel ol = slgfm::build_droop_ol(plant, cp.D_q, cp.T_q);
    const auto points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgfm::nyquist(ol, 1.0, 5.5e4, points));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(points));
}
BENCHMARK(BM_nyquist_sweep)->Arg(500)->Arg(2000);

void BM_rk4_stepping(benchmark::State& state) {
    slgfm::SimScenario sc;
    sc.pp = bench_plant();
    sc.cp = bench_control(slgfm::ControlLaw::DroopI);
    sc.t_end = 0.05;  // 10k steps at the default dt
    sc.record = {"q"};
    const auto steps_per_run =
        static_cast<int64_t>(std::llround(sc.t_end / sc.dt));
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgfm::simulate(sc));
    }
    state.SetItemsProcessed(state.iterations() * steps_per_run);
}
BENCHMARK(BM_rk4_stepping)->Unit(benchmark::kMillisecond);

void BM_fft_window(benchmark::State& state) {
    slgfm::SimTrace tr;
    const std::size_t n = 8192;
    const double dt = 1e-4;
    std::vector<double> q(n);
    tr.t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        tr.t[i] = t;
        q[i] = 0.3 * std::sin(2.0 * std::numbers::pi * 830.0 * t);
    }
    tr.signals["q"] = std::move(q);
    const std::pair<double, double> window{0.0, tr.t.back()};
    for (auto _ : state) {
        benchmark::DoNotOptimize(slgfm::dominant_frequency(tr, "q", window));
    }
}
BENCHMARK(BM_fft_window);

}  // namespace

BENCHMARK_MAIN();
