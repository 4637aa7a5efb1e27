// Compares the OpenMP kernels against their serial reference implementations
// and verifies that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "srspos/kernels.hpp"
#include "srspos/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) {
        fn();
    }
    const auto t1 = Clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_s, double omp_s, bool identical) {
    std::printf("%-22s serial %9.4f ms   omp %9.4f ms   speedup %5.2fx   %s\n", name,
                serial_s * 1e3, omp_s * 1e3, serial_s / omp_s,
                identical ? "bit-identical" : "MISMATCH");
}

std::vector<double> random_vec(std::size_t n, srspos::Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(-1.0, 1.0);
    }
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main() {
    using namespace srspos;
    Rng rng(42);

    const std::size_t n = 512;
    const std::size_t in_w = 384;
    const std::size_t out_w = 128;
    const int reps = 20;

    const auto x = random_vec(n * in_w, rng);
    const auto w = random_vec(out_w * in_w, rng);
    const auto b = random_vec(out_w, rng);
    const auto dy = random_vec(n * out_w, rng);

    {
        std::vector<double> ys(n * out_w);
        std::vector<double> yp(n * out_w);
        const double ts = time_of(
            [&] {
                kernels::dense_forward_serial(x.data(), n, in_w, w.data(), b.data(), out_w,
                                              ys.data());
            },
            reps);
        const double tp = time_of(
            [&] { kernels::dense_forward(x.data(), n, in_w, w.data(), b.data(), out_w, yp.data()); },
            reps);
        report("dense_forward", ts, tp, same_bits(ys, yp));
    }
    {
        std::vector<double> dxs(n * in_w);
        std::vector<double> dxp(n * in_w);
        const double ts = time_of(
            [&] { kernels::dense_backward_input_serial(dy.data(), w.data(), n, in_w, out_w, dxs.data()); },
            reps);
        const double tp = time_of(
            [&] { kernels::dense_backward_input(dy.data(), w.data(), n, in_w, out_w, dxp.data()); },
            reps);
        report("dense_backward_input", ts, tp, same_bits(dxs, dxp));
    }
    {
        std::vector<double> dws(out_w * in_w);
        std::vector<double> dbs(out_w);
        std::vector<double> dwp(out_w * in_w);
        std::vector<double> dbp(out_w);
        const double ts = time_of(
            [&] {
                kernels::dense_backward_params_serial(dy.data(), x.data(), n, in_w, out_w,
                                                      dws.data(), dbs.data());
            },
            reps);
        const double tp = time_of(
            [&] {
                kernels::dense_backward_params(dy.data(), x.data(), n, in_w, out_w, dwp.data(),
                                               dbp.data());
            },
            reps);
        report("dense_backward_params", ts, tp, same_bits(dws, dwp) && same_bits(dbs, dbp));
    }
    {
        const std::size_t nq = 128;
        const std::size_t nr = 2048;
        const auto queries = random_vec(nq * in_w, rng);
        const auto refs = random_vec(nr * in_w, rng);
        std::vector<double> ds(nq * nr);
        std::vector<double> dp(nq * nr);
        const double ts = time_of(
            [&] { kernels::sq_dist_rows_serial(queries.data(), nq, refs.data(), nr, in_w, ds.data()); },
            5);
        const double tp = time_of(
            [&] { kernels::sq_dist_rows(queries.data(), nq, refs.data(), nr, in_w, dp.data()); },
            5);
        report("sq_dist_rows", ts, tp, same_bits(ds, dp));
    }
    return 0;
}
