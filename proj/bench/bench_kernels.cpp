// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vortex/cantor.hpp"
#include "vortex/contour.hpp"
#include "vortex/greens.hpp"
#include "vortex/spectrum.hpp"
#include "vortex/vstates.hpp"

using namespace vortex;

namespace {

contour::RadialPatch bench_patch(int M) {
    return contour::cosine_patch(M, 0.5, 1.0, {2, 3, 5}, {0.05, 0.03, 0.01});
}

std::vector<greens::Complex> bench_points(int M) {
    const auto c = greens::circle(1.0, M);
    std::vector<greens::Complex> z = c.points;
    for (int k = 0; k < M; ++k) z[k] *= 1.0 + 0.05 * std::cos(3 * 2 * std::numbers::pi * k / M);
    return z;
}

vstates::ConformalPerturbation bench_map() {
    return vstates::symmetric_perturbation(3, {0.05, 0.004, 4e-4, 4e-5});
}

spectrum::TransversalityQuery bench_query() {
    spectrum::TransversalityQuery q;
    q.S = {2, 3};
    q.l = {2, -1};
    q.variant = spectrum::Variant::plus_Omega_j;
    q.j = -4;
    return q;
}

cantor::DiophantineSpec bench_spec() {
    cantor::DiophantineSpec s;
    s.gamma = 1e-2;
    s.tau = 3.0;
    s.l_cutoff = 10;
    s.j_cutoff = 10;
    s.S = {2, 3};
    return s;
}

template <auto F>
void BM_kernel_matrix(benchmark::State& st) {
    const auto z = bench_points(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(F(1.0, z));
}

template <auto F>
void BM_velocity_at_targets(benchmark::State& st) {
    const auto c = greens::circle(1.0, static_cast<int>(st.range(0)));
    std::vector<greens::Complex> targets;
    for (int k = 0; k < 256; ++k) targets.push_back(std::polar(2.0, 0.1 * k));
    for (auto _ : st) benchmark::DoNotOptimize(F(1.0, c, targets));
}

template <auto F>
void BM_evaluate_F(benchmark::State& st) {
    const auto f = bench_map();
    for (auto _ : st) benchmark::DoNotOptimize(F(1.0, 0.15, f, static_cast<int>(st.range(0)), 0));
}

template <auto F>
void BM_contour_rhs(benchmark::State& st) {
    const auto p = bench_patch(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(F(p));
}

template <auto F>
void BM_energy_contour(benchmark::State& st) {
    const auto p = bench_patch(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(F(p));
}

template <auto F>
void BM_transversality(benchmark::State& st) {
    const auto q = bench_query();
    for (auto _ : st) benchmark::DoNotOptimize(F(q));
}

template <auto F>
void BM_excluded_set(benchmark::State& st) {
    const auto s = bench_spec();
    for (auto _ : st) benchmark::DoNotOptimize(F(s, 0.5, 1.5, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(BM_kernel_matrix<greens::kernel_matrix>)->Name("kernel_matrix/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_kernel_matrix<greens::kernel_matrix_serial>)->Name("kernel_matrix/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_velocity_at_targets<greens::velocity_at_targets>)->Name("velocity_at_targets/parallel")->Arg(1024);
BENCHMARK(BM_velocity_at_targets<greens::velocity_at_targets_serial>)->Name("velocity_at_targets/serial")->Arg(1024);
BENCHMARK(BM_evaluate_F<vstates::evaluate_F>)->Name("evaluate_F/parallel")->Arg(384);
BENCHMARK(BM_evaluate_F<vstates::evaluate_F_serial>)->Name("evaluate_F/serial")->Arg(384);
BENCHMARK(BM_contour_rhs<contour::rhs>)->Name("contour_rhs/parallel")->Arg(128)->Arg(256);
BENCHMARK(BM_contour_rhs<contour::rhs_serial>)->Name("contour_rhs/serial")->Arg(128)->Arg(256);
BENCHMARK(BM_energy_contour<contour::energy_contour>)->Name("energy_contour/parallel")->Arg(256);
BENCHMARK(BM_energy_contour<contour::energy_contour_serial>)->Name("energy_contour/serial")->Arg(256);
BENCHMARK(BM_transversality<spectrum::transversality_report>)->Name("transversality_report/parallel");
BENCHMARK(BM_transversality<spectrum::transversality_report_serial>)->Name("transversality_report/serial");
BENCHMARK(BM_excluded_set<cantor::excluded_set>)->Name("excluded_set/parallel")->Arg(2000);
BENCHMARK(BM_excluded_set<cantor::excluded_set_serial>)->Name("excluded_set/serial")->Arg(2000);

BENCHMARK_MAIN();
