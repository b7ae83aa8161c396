#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "ttrnn/rng.hpp"
#include "ttrnn/tensor.hpp"
#include "ttrnn/tt_layer.hpp"

namespace ttrnn {

enum class CellKind { SRNN, GRU, LSTM };

/// Number of gates c: 1 (SRNN), 3 (GRU), 4 (LSTM).
index_t gate_count(CellKind kind);

/// Gates that carry a bias, counted from the front of the fixed gate order.
/// SRNN: 1 of 1. GRU: r and z but not the candidate d, so 2 of 3. LSTM: all 4.
index_t biased_gate_count(CellKind kind);

/// Returns s with the first output factor n_1 scaled by c, so one TT layer
/// produces all gate pre-activations concatenated along the output axis.
TTShape fuse_gate_shape(const TTShape& s, index_t c);

/// Input-to-hidden map producing all c gate pre-activations at once: either
/// a dense (M, c*N) matrix or a TT layer whose shape is the fused one. The
/// map is bias-free; gate biases live on the cell.
struct DenseMap {
    DenseTensor weight;
};
struct TTMap {
    TTLayer layer;
};
using InputMap = std::variant<DenseMap, TTMap>;

/// One recurrent cell. Gate order is fixed and determines the layout of the
/// fused pre-activation, the U/bias lists and the checkpoint format:
///   SRNN: (h)   GRU: (r, z, d)   LSTM: (k, f, o, g)
struct RNNCell {
    CellKind kind = CellKind::SRNN;
    index_t input_size = 0;
    index_t hidden_size = 0;
    InputMap input_map;
    std::vector<DenseTensor> u;      // one (N, N) matrix per gate
    std::vector<DenseTensor> biases; // one length-N vector per biased gate

    index_t gates() const { return gate_count(kind); }
};

struct HiddenState {
    DenseTensor h;
    DenseTensor c; // LSTM only; empty otherwise
};

struct CellConfig {
    CellKind kind = CellKind::SRNN;
    bool tt = false;
    index_t input_size = 0;  // dense map only; derived from tt_shape otherwise
    index_t hidden_size = 0; // dense map only
    TTShape tt_shape;        // unfused: n holds the hidden-size factors
};

/// Gaussian-initialized cell, biases zero. All randomness comes from one
/// seeded stream: input map first, then the U matrices in gate order.
RNNCell make_cell(const CellConfig& cfg, std::uint64_t seed);
RNNCell make_cell(const CellConfig& cfg, Rng& rng);

/// Number of stored scalars (input map + U matrices + biases).
index_t cell_param_count(const RNNCell& cell);

/// Slices a fused pre-activation vector of length c*N into c contiguous
/// length-N gate vectors in the fixed gate order.
std::vector<DenseTensor> gate_slices(const DenseTensor& fused, index_t c, index_t n);

/// Single-vector steps (x length M, h length N), dropout disabled.
DenseTensor srnn_step(const RNNCell& cell, const DenseTensor& x, const DenseTensor& h_prev);
DenseTensor gru_step(const RNNCell& cell, const DenseTensor& x, const DenseTensor& h_prev);
HiddenState lstm_step(const RNNCell& cell, const DenseTensor& x, const HiddenState& state);

/// Everything the backward pass needs about one timestep of a batched run.
/// Tensors that a cell kind does not use stay empty.
struct StepCache {
    DenseTensor x_used;  // (B, M) input after the dropout mask
    DenseTensor h_prev;  // (B, N) incoming hidden state, unmasked
    DenseTensor h_tilde; // (B, N) hidden state fed to the U products
    DenseTensor x_mask;  // empty when dropout is off
    DenseTensor h_mask;
    std::vector<char> active;                // per sequence: t < length
    DenseTensor r, z, d, rh;                 // GRU (rh = r ∘ h_tilde)
    DenseTensor k, f, o, g, c_prev, tanh_c;  // LSTM
    DenseTensor h_act;                       // SRNN tanh output
};

struct Dropout {
    double rate = 0.0; // 0 disables; inverted scaling at train time
};

/// Runs one cell over a right-padded batch x of shape (B, T_max, M) with
/// per-sequence lengths; masked (padded) steps copy the state through
/// unchanged, so the returned (B, N) hidden state is each sequence's own
/// h^{[T_b]}. Dropout draws fresh masks each timestep (x mask first, then h
/// mask) from rng; caches, when non-null, receive one StepCache per step.
DenseTensor run_batch(const RNNCell& cell, const DenseTensor& x,
                      const std::vector<index_t>& lengths, const Dropout& dropout,
                      Rng* rng, std::vector<StepCache>* caches);

/// Single sequence, frames as length-M vectors. Returns h^{[T]}.
DenseTensor run_sequence(const RNNCell& cell, const std::vector<DenseTensor>& frames,
                         const Dropout& dropout, Rng* rng);

/// Parameter gradients in the cell's own layout. Exactly one of
/// dense_weight / cores is populated, matching the input map.
struct CellGradients {
    DenseTensor dense_weight;
    std::vector<DenseTensor> cores;
    std::vector<DenseTensor> u;
    std::vector<DenseTensor> biases;
};

CellGradients zero_cell_gradients(const RNNCell& cell);

/// Backpropagation through time over the cached steps of one run_batch
/// call. grad_h is dL/dh for the final state (B, N). Parameter gradients
/// are accumulated into grads.
void backprop_batch(const RNNCell& cell, const std::vector<StepCache>& caches,
                    const DenseTensor& grad_h, CellGradients& grads);

} // namespace ttrnn
