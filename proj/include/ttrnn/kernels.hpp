#pragma once

#include "ttrnn/tensor.hpp"

namespace ttrnn::kernels {

/// Worker-thread cap. Initialized from the TTRNN_THREADS environment
/// variable on first use; defaults to 1 (deterministic serial mode).
int configured_threads();
void set_threads(int n);

/// Every kernel below ships in two variants: *_serial is the reference
/// implementation, *_omp distributes independent output slices over OpenMP
/// threads. Each output element is accumulated in the same order in both
/// variants, so the parallel results are bit-identical to the serial ones.
/// The unsuffixed entry points dispatch on configured_threads().

// out(R x C) = A(R x K) * B(K x C), optionally accumulating into out.
void matmul_ab_serial(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate);
void matmul_ab_omp(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate);
void matmul_ab(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate = false);

// out(R x C) = A(R x K) * B(C x K)^T
void matmul_abt_serial(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate);
void matmul_abt_omp(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate);
void matmul_abt(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate = false);

// out(R x C) = A(K x R)^T * B(K x C)
void matmul_atb_serial(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate);
void matmul_atb_omp(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate);
void matmul_atb(const double* a, const double* b, double* out, index_t R, index_t K, index_t C, bool accumulate = false);

/// One step of the left-to-right tensor-train contraction. Buffers are
/// row-major with layout
///   in : (B, NJ, m*M, r_prev)   out: (B, NJ*n, M, r_next)
/// where NJ is the already-produced output-factor block, m/n the current
/// core's factors, M the not-yet-consumed input-factor block, and the core
/// is (m, n, r_prev, r_next):
///   out[b, jj*n + j, ii, s] = sum_{i,q} in[b, jj, i*M + ii, q] * core[i, j, q, s]
void tt_step_forward_serial(const double* in, const double* core, double* out,
                            index_t B, index_t NJ, index_t m, index_t n, index_t M,
                            index_t r_prev, index_t r_next);
void tt_step_forward_omp(const double* in, const double* core, double* out,
                         index_t B, index_t NJ, index_t m, index_t n, index_t M,
                         index_t r_prev, index_t r_next);
void tt_step_forward(const double* in, const double* core, double* out,
                     index_t B, index_t NJ, index_t m, index_t n, index_t M,
                     index_t r_prev, index_t r_next);

/// One step of the right-to-left sweep used by the backward pass. Adjoint of
/// tt_step_forward with respect to its input:
///   in : (B, NJ*n, M, r_next)   out: (B, NJ, m*M, r_prev)
///   out[b, jj, i*M + ii, q] = sum_{j,s} core[i, j, q, s] * in[b, jj*n + j, ii, s]
void tt_step_suffix_serial(const double* in, const double* core, double* out,
                           index_t B, index_t NJ, index_t m, index_t n, index_t M,
                           index_t r_prev, index_t r_next);
void tt_step_suffix_omp(const double* in, const double* core, double* out,
                        index_t B, index_t NJ, index_t m, index_t n, index_t M,
                        index_t r_prev, index_t r_next);
void tt_step_suffix(const double* in, const double* core, double* out,
                    index_t B, index_t NJ, index_t m, index_t n, index_t M,
                    index_t r_prev, index_t r_next);

/// Gradient of one core given the forward prefix F (layout of a step-k-1
/// forward buffer) and the backward suffix R (layout of a step-k suffix
/// input). Accumulates into grad (m, n, r_prev, r_next):
///   grad[i, j, q, s] += sum_{b,jj,ii} F[b, jj, i*M + ii, q] * R[b, jj*n + j, ii, s]
void tt_core_grad_serial(const double* f, const double* r, double* grad,
                         index_t B, index_t NJ, index_t m, index_t n, index_t M,
                         index_t r_prev, index_t r_next);
void tt_core_grad_omp(const double* f, const double* r, double* grad,
                      index_t B, index_t NJ, index_t m, index_t n, index_t M,
                      index_t r_prev, index_t r_next);
void tt_core_grad(const double* f, const double* r, double* grad,
                  index_t B, index_t NJ, index_t m, index_t n, index_t M,
                  index_t r_prev, index_t r_next);

} // namespace ttrnn::kernels
