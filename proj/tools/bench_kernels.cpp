#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "ttrnn/kernels.hpp"
#include "ttrnn/rng.hpp"

using namespace ttrnn;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <typename F>
double time_loop(int iters, F&& fn) {
    fn(); // warm up
    const double t0 = omp_get_wtime();
    for (int i = 0; i < iters; ++i) fn();
    return (omp_get_wtime() - t0) / iters;
}

void report(const char* name, double serial_s, double omp_s, double diff) {
    std::printf("%-16s serial %10.6f s   omp %10.6f s   speedup %5.2fx   max|diff| %g\n", name,
                serial_s, omp_s, serial_s / omp_s, diff);
}

} // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    const int iters = argc > 2 ? std::atoi(argv[2]) : 20;
    kernels::set_threads(threads);
    std::printf("threads: %d, iterations per kernel: %d\n", threads, iters);

    Rng rng(42);

    {
        // Classifier-sized matmul.
        const index_t R = 256, K = 512, C = 256;
        const std::vector<double> a = random_vector(static_cast<std::size_t>(R * K), rng);
        const std::vector<double> b = random_vector(static_cast<std::size_t>(K * C), rng);
        std::vector<double> out_serial(static_cast<std::size_t>(R * C));
        std::vector<double> out_omp(out_serial.size());
        const double ts = time_loop(iters, [&] {
            kernels::matmul_ab_serial(a.data(), b.data(), out_serial.data(), R, K, C, false);
        });
        const double tp = time_loop(iters, [&] {
            kernels::matmul_ab_omp(a.data(), b.data(), out_omp.data(), R, K, C, false);
        });
        report("matmul_ab", ts, tp, max_abs_diff(out_serial, out_omp));
    }

    // Mid-chain TT contraction step at the 8x20x20x18 -> 4x4x4x4 scale:
    // two steps done (NJ = 16), consuming m = 20 with M = 18 remaining.
    const index_t B = 16, NJ = 16, m = 20, n = 4, M = 18, r_prev = 4, r_next = 4;
    const std::vector<double> in =
        random_vector(static_cast<std::size_t>(B * NJ * m * M * r_prev), rng);
    const std::vector<double> core =
        random_vector(static_cast<std::size_t>(m * n * r_prev * r_next), rng);

    {
        std::vector<double> out_serial(static_cast<std::size_t>(B * NJ * n * M * r_next));
        std::vector<double> out_omp(out_serial.size());
        const double ts = time_loop(iters, [&] {
            kernels::tt_step_forward_serial(in.data(), core.data(), out_serial.data(), B, NJ, m, n,
                                            M, r_prev, r_next);
        });
        const double tp = time_loop(iters, [&] {
            kernels::tt_step_forward_omp(in.data(), core.data(), out_omp.data(), B, NJ, m, n, M,
                                         r_prev, r_next);
        });
        report("tt_step_forward", ts, tp, max_abs_diff(out_serial, out_omp));
    }

    const std::vector<double> suffix =
        random_vector(static_cast<std::size_t>(B * NJ * n * M * r_next), rng);

    {
        std::vector<double> out_serial(static_cast<std::size_t>(B * NJ * m * M * r_prev));
        std::vector<double> out_omp(out_serial.size());
        const double ts = time_loop(iters, [&] {
            kernels::tt_step_suffix_serial(suffix.data(), core.data(), out_serial.data(), B, NJ, m,
                                           n, M, r_prev, r_next);
        });
        const double tp = time_loop(iters, [&] {
            kernels::tt_step_suffix_omp(suffix.data(), core.data(), out_omp.data(), B, NJ, m, n, M,
                                        r_prev, r_next);
        });
        report("tt_step_suffix", ts, tp, max_abs_diff(out_serial, out_omp));
    }

    {
        std::vector<double> grad_serial(static_cast<std::size_t>(m * n * r_prev * r_next));
        std::vector<double> grad_omp(grad_serial.size());
        const double ts = time_loop(iters, [&] {
            std::fill(grad_serial.begin(), grad_serial.end(), 0.0);
            kernels::tt_core_grad_serial(in.data(), suffix.data(), grad_serial.data(), B, NJ, m, n,
                                         M, r_prev, r_next);
        });
        const double tp = time_loop(iters, [&] {
            std::fill(grad_omp.begin(), grad_omp.end(), 0.0);
            kernels::tt_core_grad_omp(in.data(), suffix.data(), grad_omp.data(), B, NJ, m, n, M,
                                      r_prev, r_next);
        });
        report("tt_core_grad", ts, tp, max_abs_diff(grad_serial, grad_omp));
    }

    return 0;
}
