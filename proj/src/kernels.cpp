#include "ttrnn/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace ttrnn::kernels {

namespace {

int env_threads() {
    const char* s = std::getenv("TTRNN_THREADS");
    if (!s) return 1;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1) return 1;
    return static_cast<int>(std::min(v, 1024L));
}

int& thread_setting() {
    static int n = env_threads();
    return n;
}

} // namespace

int configured_threads() { return thread_setting(); }

void set_threads(int n) { thread_setting() = n < 1 ? 1 : n; }

// ---------------------------------------------------------------------------
// matmul_ab

void matmul_ab_serial(const double* a, const double* b, double* out,
                      index_t R, index_t K, index_t C, bool accumulate) {
    for (index_t i = 0; i < R; ++i) {
        double* o = out + i * C;
        if (!accumulate) std::fill(o, o + C, 0.0);
        const double* ar = a + i * K;
        for (index_t k = 0; k < K; ++k) {
            const double v = ar[k];
            const double* br = b + k * C;
            for (index_t j = 0; j < C; ++j) o[j] += v * br[j];
        }
    }
}

void matmul_ab_omp(const double* a, const double* b, double* out,
                   index_t R, index_t K, index_t C, bool accumulate) {
    const int nt = configured_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
    for (index_t i = 0; i < R; ++i) {
        double* o = out + i * C;
        if (!accumulate) std::fill(o, o + C, 0.0);
        const double* ar = a + i * K;
        for (index_t k = 0; k < K; ++k) {
            const double v = ar[k];
            const double* br = b + k * C;
            for (index_t j = 0; j < C; ++j) o[j] += v * br[j];
        }
    }
}

void matmul_ab(const double* a, const double* b, double* out,
               index_t R, index_t K, index_t C, bool accumulate) {
    if (configured_threads() > 1)
        matmul_ab_omp(a, b, out, R, K, C, accumulate);
    else
        matmul_ab_serial(a, b, out, R, K, C, accumulate);
}

// ---------------------------------------------------------------------------
// matmul_abt

void matmul_abt_serial(const double* a, const double* b, double* out,
                       index_t R, index_t K, index_t C, bool accumulate) {
    for (index_t i = 0; i < R; ++i) {
        const double* ar = a + i * K;
        double* o = out + i * C;
        for (index_t j = 0; j < C; ++j) {
            const double* br = b + j * K;
            double acc = 0.0;
            for (index_t k = 0; k < K; ++k) acc += ar[k] * br[k];
            if (accumulate) o[j] += acc; else o[j] = acc;
        }
    }
}

void matmul_abt_omp(const double* a, const double* b, double* out,
                    index_t R, index_t K, index_t C, bool accumulate) {
    const int nt = configured_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
    for (index_t i = 0; i < R; ++i) {
        const double* ar = a + i * K;
        double* o = out + i * C;
        for (index_t j = 0; j < C; ++j) {
            const double* br = b + j * K;
            double acc = 0.0;
            for (index_t k = 0; k < K; ++k) acc += ar[k] * br[k];
            if (accumulate) o[j] += acc; else o[j] = acc;
        }
    }
}

void matmul_abt(const double* a, const double* b, double* out,
                index_t R, index_t K, index_t C, bool accumulate) {
    if (configured_threads() > 1)
        matmul_abt_omp(a, b, out, R, K, C, accumulate);
    else
        matmul_abt_serial(a, b, out, R, K, C, accumulate);
}

// ---------------------------------------------------------------------------
// matmul_atb

void matmul_atb_serial(const double* a, const double* b, double* out,
                       index_t R, index_t K, index_t C, bool accumulate) {
    for (index_t i = 0; i < R; ++i) {
        double* o = out + i * C;
        if (!accumulate) std::fill(o, o + C, 0.0);
        for (index_t k = 0; k < K; ++k) {
            const double v = a[k * R + i];
            const double* br = b + k * C;
            for (index_t j = 0; j < C; ++j) o[j] += v * br[j];
        }
    }
}

void matmul_atb_omp(const double* a, const double* b, double* out,
                    index_t R, index_t K, index_t C, bool accumulate) {
    const int nt = configured_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
    for (index_t i = 0; i < R; ++i) {
        double* o = out + i * C;
        if (!accumulate) std::fill(o, o + C, 0.0);
        for (index_t k = 0; k < K; ++k) {
            const double v = a[k * R + i];
            const double* br = b + k * C;
            for (index_t j = 0; j < C; ++j) o[j] += v * br[j];
        }
    }
}

void matmul_atb(const double* a, const double* b, double* out,
                index_t R, index_t K, index_t C, bool accumulate) {
    if (configured_threads() > 1)
        matmul_atb_omp(a, b, out, R, K, C, accumulate);
    else
        matmul_atb_serial(a, b, out, R, K, C, accumulate);
}

// ---------------------------------------------------------------------------
// tt_step_forward

namespace {

inline void tt_step_forward_block(const double* in, const double* core, double* out,
                                  index_t b, index_t jj,
                                  index_t NJ, index_t m, index_t n, index_t M,
                                  index_t r_prev, index_t r_next) {
    double* ob = out + ((b * NJ + jj) * n) * M * r_next;
    std::fill(ob, ob + n * M * r_next, 0.0);
    for (index_t i = 0; i < m; ++i) {
        const double* ib = in + (((b * NJ + jj) * m + i) * M) * r_prev;
        for (index_t j = 0; j < n; ++j) {
            const double* cb = core + (i * n + j) * r_prev * r_next;
            double* oj = ob + j * M * r_next;
            for (index_t ii = 0; ii < M; ++ii) {
                const double* iv = ib + ii * r_prev;
                double* ov = oj + ii * r_next;
                for (index_t q = 0; q < r_prev; ++q) {
                    const double v = iv[q];
                    const double* cs = cb + q * r_next;
                    for (index_t s = 0; s < r_next; ++s) ov[s] += v * cs[s];
                }
            }
        }
    }
}

} // namespace

void tt_step_forward_serial(const double* in, const double* core, double* out,
                            index_t B, index_t NJ, index_t m, index_t n, index_t M,
                            index_t r_prev, index_t r_next) {
    for (index_t b = 0; b < B; ++b)
        for (index_t jj = 0; jj < NJ; ++jj)
            tt_step_forward_block(in, core, out, b, jj, NJ, m, n, M, r_prev, r_next);
}

void tt_step_forward_omp(const double* in, const double* core, double* out,
                         index_t B, index_t NJ, index_t m, index_t n, index_t M,
                         index_t r_prev, index_t r_next) {
    const int nt = configured_threads();
#pragma omp parallel for num_threads(nt) schedule(static) collapse(2)
    for (index_t b = 0; b < B; ++b)
        for (index_t jj = 0; jj < NJ; ++jj)
            tt_step_forward_block(in, core, out, b, jj, NJ, m, n, M, r_prev, r_next);
}

void tt_step_forward(const double* in, const double* core, double* out,
                     index_t B, index_t NJ, index_t m, index_t n, index_t M,
                     index_t r_prev, index_t r_next) {
    if (configured_threads() > 1)
        tt_step_forward_omp(in, core, out, B, NJ, m, n, M, r_prev, r_next);
    else
        tt_step_forward_serial(in, core, out, B, NJ, m, n, M, r_prev, r_next);
}

// ---------------------------------------------------------------------------
// tt_step_suffix

namespace {

inline void tt_step_suffix_block(const double* in, const double* core, double* out,
                                 index_t b, index_t jj,
                                 index_t NJ, index_t m, index_t n, index_t M,
                                 index_t r_prev, index_t r_next) {
    double* ob = out + ((b * NJ + jj) * m) * M * r_prev;
    std::fill(ob, ob + m * M * r_prev, 0.0);
    for (index_t i = 0; i < m; ++i) {
        double* oi = ob + i * M * r_prev;
        for (index_t j = 0; j < n; ++j) {
            const double* cb = core + (i * n + j) * r_prev * r_next;
            const double* ib = in + (((b * NJ + jj) * n + j) * M) * r_next;
            for (index_t ii = 0; ii < M; ++ii) {
                const double* iv = ib + ii * r_next;
                double* ov = oi + ii * r_prev;
                for (index_t q = 0; q < r_prev; ++q) {
                    const double* cs = cb + q * r_next;
                    double acc = 0.0;
                    for (index_t s = 0; s < r_next; ++s) acc += cs[s] * iv[s];
                    ov[q] += acc;
                }
            }
        }
    }
}

} // namespace

void tt_step_suffix_serial(const double* in, const double* core, double* out,
                           index_t B, index_t NJ, index_t m, index_t n, index_t M,
                           index_t r_prev, index_t r_next) {
    for (index_t b = 0; b < B; ++b)
        for (index_t jj = 0; jj < NJ; ++jj)
            tt_step_suffix_block(in, core, out, b, jj, NJ, m, n, M, r_prev, r_next);
}

void tt_step_suffix_omp(const double* in, const double* core, double* out,
                        index_t B, index_t NJ, index_t m, index_t n, index_t M,
                        index_t r_prev, index_t r_next) {
    const int nt = configured_threads();
#pragma omp parallel for num_threads(nt) schedule(static) collapse(2)
    for (index_t b = 0; b < B; ++b)
        for (index_t jj = 0; jj < NJ; ++jj)
            tt_step_suffix_block(in, core, out, b, jj, NJ, m, n, M, r_prev, r_next);
}

void tt_step_suffix(const double* in, const double* core, double* out,
                    index_t B, index_t NJ, index_t m, index_t n, index_t M,
                    index_t r_prev, index_t r_next) {
    if (configured_threads() > 1)
        tt_step_suffix_omp(in, core, out, B, NJ, m, n, M, r_prev, r_next);
    else
        tt_step_suffix_serial(in, core, out, B, NJ, m, n, M, r_prev, r_next);
}

// ---------------------------------------------------------------------------
// tt_core_grad

namespace {

inline void tt_core_grad_slice(const double* f, const double* r, double* grad,
                               index_t i, index_t j,
                               index_t B, index_t NJ, index_t m, index_t n, index_t M,
                               index_t r_prev, index_t r_next) {
    double* g = grad + (i * n + j) * r_prev * r_next;
    for (index_t b = 0; b < B; ++b) {
        for (index_t jj = 0; jj < NJ; ++jj) {
            const double* fb = f + (((b * NJ + jj) * m + i) * M) * r_prev;
            const double* rb = r + (((b * NJ + jj) * n + j) * M) * r_next;
            for (index_t ii = 0; ii < M; ++ii) {
                const double* fv = fb + ii * r_prev;
                const double* rv = rb + ii * r_next;
                for (index_t q = 0; q < r_prev; ++q) {
                    const double fq = fv[q];
                    double* gq = g + q * r_next;
                    for (index_t s = 0; s < r_next; ++s) gq[s] += fq * rv[s];
                }
            }
        }
    }
}

} // namespace

void tt_core_grad_serial(const double* f, const double* r, double* grad,
                         index_t B, index_t NJ, index_t m, index_t n, index_t M,
                         index_t r_prev, index_t r_next) {
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < n; ++j)
            tt_core_grad_slice(f, r, grad, i, j, B, NJ, m, n, M, r_prev, r_next);
}

void tt_core_grad_omp(const double* f, const double* r, double* grad,
                      index_t B, index_t NJ, index_t m, index_t n, index_t M,
                      index_t r_prev, index_t r_next) {
    const int nt = configured_threads();
#pragma omp parallel for num_threads(nt) schedule(static) collapse(2)
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < n; ++j)
            tt_core_grad_slice(f, r, grad, i, j, B, NJ, m, n, M, r_prev, r_next);
}

void tt_core_grad(const double* f, const double* r, double* grad,
                  index_t B, index_t NJ, index_t m, index_t n, index_t M,
                  index_t r_prev, index_t r_next) {
    if (configured_threads() > 1)
        tt_core_grad_omp(f, r, grad, B, NJ, m, n, M, r_prev, r_next);
    else
        tt_core_grad_serial(f, r, grad, B, NJ, m, n, M, r_prev, r_next);
}

} // namespace ttrnn::kernels
