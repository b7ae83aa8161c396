#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ttrnn/tensor.hpp"

namespace ttrnn {

/// Factorization plan of a TT layer: input factors m_k, output factors n_k
/// (k = 1..d) and ranks r_0..r_d with r_0 = r_d = 1. The layer acts as an
/// (M x N) matrix with M = prod(m), N = prod(n).
struct TTShape {
    std::vector<index_t> m;
    std::vector<index_t> n;
    std::vector<index_t> ranks;

    index_t d() const { return static_cast<index_t>(m.size()); }
    index_t input_size() const;
    index_t output_size() const;

    bool operator==(const TTShape&) const = default;
};

/// Throws ShapeError unless all TTShape invariants hold (matching factor
/// list lengths, d >= 1, positive extents, boundary ranks equal to 1).
void validate_shape(const TTShape& s);

/// The learnable cores. Core k has shape (m_k, n_k, r_{k-1}, r_k); entry
/// (i, j, :, :) is the matrix G*_k(i, j) of the chain product.
struct TTCores {
    TTShape shape;
    std::vector<DenseTensor> cores;
};

class Rng;

/// Gaussian cores with per-core std sigma_k = (2/(M+N))^(1/(2d)) / sqrt(r_k),
/// which puts the variance of each reconstructed matrix entry at 2/(M+N).
/// Deterministic given the seed.
TTCores init_cores(const TTShape& s, std::uint64_t seed);
TTCores init_cores(const TTShape& s, Rng& rng);

/// Chain product G*_1(i_1,j_1) * ... * G*_d(i_d,j_d), a 1x1 matrix read as a
/// scalar. i and j are the per-dimension indices (length d).
double reconstruct_entry(const TTCores& c, std::span<const index_t> i, std::span<const index_t> j);

/// The full (M x N) matrix represented by the cores. Entry (l_in, l_out)
/// equals reconstruct_entry at the row-major multi-indices of l_in over m
/// and l_out over n. Desk-scale only.
DenseTensor reconstruct_matrix(const TTCores& c);

struct TTLayer {
    TTCores cores;
    std::optional<DenseTensor> bias;
};

/// Freshly initialized layer; the bias, when requested, starts at zero.
TTLayer make_tt_layer(const TTShape& s, std::uint64_t seed, bool with_bias);

/// Batched forward pass: x is (B, M), the result is (B, N) and equals
/// x * reconstruct_matrix + bias without ever materializing the matrix.
/// Left-to-right contraction over the cores, batch kept leading.
DenseTensor tt_forward(const TTLayer& layer, const DenseTensor& x);

struct TTGradients {
    std::vector<DenseTensor> cores;
    std::optional<DenseTensor> bias;
    DenseTensor input;
};

/// Gradients of sum(grad_y ⊙ tt_forward(x)) with respect to every core, the
/// bias (when present) and x. Runs one stashing forward sweep and one
/// right-to-left adjoint sweep.
TTGradients tt_backward(const TTLayer& layer, const DenseTensor& x, const DenseTensor& grad_y);

/// Number of stored scalars for the layer whose first output factor n_1 is
/// scaled by the gate multiplier c:
///   sum_k m_k n_k r_{k-1} r_k + (c-1) m_1 n_1 r_0 r_1.
index_t tt_param_count(const TTShape& s, index_t gate_multiplier = 1);

/// Scalar count of the dense counterpart, M * c * N.
index_t dense_param_count(index_t input_size, index_t output_size, index_t gate_multiplier = 1);

/// Exact fraction, always reduced, denominator positive. Used for the
/// compression-rate accounting where float rounding is not acceptable.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t numerator, std::int64_t denominator);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

bool operator<(const Rational& a, const Rational& b);

/// tt_param_count(s, c) over c*M*N as an exact rational.
Rational compression_rate(const TTShape& s, index_t gate_multiplier = 1);

} // namespace ttrnn
