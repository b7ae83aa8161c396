#include "ttrnn/rnn_cell.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ttrnn/kernels.hpp"

namespace ttrnn {

index_t gate_count(CellKind kind) {
    switch (kind) {
        case CellKind::SRNN: return 1;
        case CellKind::GRU: return 3;
        case CellKind::LSTM: return 4;
    }
    throw ArgumentError("unknown cell kind");
}

index_t biased_gate_count(CellKind kind) {
    switch (kind) {
        case CellKind::SRNN: return 1;
        case CellKind::GRU: return 2; // r and z; the candidate d has no bias
        case CellKind::LSTM: return 4;
    }
    throw ArgumentError("unknown cell kind");
}

TTShape fuse_gate_shape(const TTShape& s, index_t c) {
    validate_shape(s);
    if (c < 1) throw ArgumentError("gate multiplier must be >= 1");
    TTShape fused = s;
    fused.n[0] *= c;
    return fused;
}

RNNCell make_cell(const CellConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    return make_cell(cfg, rng);
}

RNNCell make_cell(const CellConfig& cfg, Rng& rng) {
    RNNCell cell;
    cell.kind = cfg.kind;
    const index_t c = gate_count(cfg.kind);

    if (cfg.tt) {
        const TTShape fused = fuse_gate_shape(cfg.tt_shape, c);
        cell.input_size = fused.input_size();
        cell.hidden_size = cfg.tt_shape.output_size();
        TTMap map;
        map.layer.cores = init_cores(fused, rng);
        cell.input_map = std::move(map);
    } else {
        if (cfg.input_size < 1 || cfg.hidden_size < 1)
            throw ArgumentError("dense cell needs positive input and hidden sizes");
        cell.input_size = cfg.input_size;
        cell.hidden_size = cfg.hidden_size;
        DenseMap map;
        map.weight = DenseTensor(Shape({cell.input_size, c * cell.hidden_size}));
        const double sigma =
            std::sqrt(2.0 / static_cast<double>(cell.input_size + c * cell.hidden_size));
        for (double& v : map.weight.data) v = sigma * rng.normal();
        cell.input_map = std::move(map);
    }

    const index_t n = cell.hidden_size;
    const double usigma = std::sqrt(1.0 / static_cast<double>(n));
    for (index_t g = 0; g < c; ++g) {
        DenseTensor u(Shape({n, n}));
        for (double& v : u.data) v = usigma * rng.normal();
        cell.u.push_back(std::move(u));
    }
    for (index_t g = 0; g < biased_gate_count(cfg.kind); ++g)
        cell.biases.emplace_back(Shape({n}));
    return cell;
}

index_t cell_param_count(const RNNCell& cell) {
    index_t total = 0;
    if (const auto* dm = std::get_if<DenseMap>(&cell.input_map)) {
        total += dm->weight.size();
    } else {
        for (const DenseTensor& core : std::get<TTMap>(cell.input_map).layer.cores.cores)
            total += core.size();
    }
    for (const DenseTensor& u : cell.u) total += u.size();
    for (const DenseTensor& b : cell.biases) total += b.size();
    return total;
}

std::vector<DenseTensor> gate_slices(const DenseTensor& fused, index_t c, index_t n) {
    if (fused.shape.rank() != 1 || fused.shape.extent(0) != c * n)
        throw ShapeError("gate_slices expects a vector of length " + std::to_string(c * n));
    std::vector<DenseTensor> out;
    out.reserve(static_cast<std::size_t>(c));
    for (index_t g = 0; g < c; ++g) {
        DenseTensor v(Shape({n}));
        for (index_t j = 0; j < n; ++j) v[j] = fused[g * n + j];
        out.push_back(std::move(v));
    }
    return out;
}

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

DenseTensor apply_input_map(const RNNCell& cell, const DenseTensor& x) {
    if (const auto* dm = std::get_if<DenseMap>(&cell.input_map)) {
        const index_t b = x.shape.extent(0);
        const index_t m = cell.input_size;
        const index_t w = cell.gates() * cell.hidden_size;
        if (x.shape.extent(1) != m)
            throw ShapeError("input width " + std::to_string(x.shape.extent(1)) +
                             " does not match cell input size " + std::to_string(m));
        DenseTensor out(Shape({b, w}));
        kernels::matmul_ab(x.data.data(), dm->weight.data.data(), out.data.data(), b, m, w);
        return out;
    }
    return tt_forward(std::get<TTMap>(cell.input_map).layer, x);
}

// (b, c*n) fused pre-activation -> copy of gate column block g.
DenseTensor slice_gate(const DenseTensor& pre, index_t g, index_t n) {
    const index_t b = pre.shape.extent(0);
    const index_t w = pre.shape.extent(1);
    DenseTensor out(Shape({b, n}));
    for (index_t r = 0; r < b; ++r) {
        const double* src = pre.data.data() + static_cast<std::size_t>(r * w + g * n);
        double* dst = out.data.data() + static_cast<std::size_t>(r * n);
        for (index_t j = 0; j < n; ++j) dst[j] = src[j];
    }
    return out;
}

void paste_gate(DenseTensor& pre, const DenseTensor& block, index_t g, index_t n) {
    const index_t b = pre.shape.extent(0);
    const index_t w = pre.shape.extent(1);
    for (index_t r = 0; r < b; ++r) {
        const double* src = block.data.data() + static_cast<std::size_t>(r * n);
        double* dst = pre.data.data() + static_cast<std::size_t>(r * w + g * n);
        for (index_t j = 0; j < n; ++j) dst[j] = src[j];
    }
}

void add_bias_rows(DenseTensor& m, const DenseTensor& bias) {
    const index_t b = m.shape.extent(0);
    const index_t n = m.shape.extent(1);
    for (index_t r = 0; r < b; ++r) {
        double* row = m.data.data() + static_cast<std::size_t>(r * n);
        for (index_t j = 0; j < n; ++j) row[j] += bias[j];
    }
}

// out(b, n) = h(b, n) * u(n, n)^T, accumulated into `pre`.
void add_recurrent(DenseTensor& pre, const DenseTensor& h, const DenseTensor& u) {
    kernels::matmul_abt(h.data.data(), u.data.data(), pre.data.data(),
                        pre.shape.extent(0), h.shape.extent(1), pre.shape.extent(1), true);
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
    DenseTensor out(a.shape);
    for (index_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

void map_sigmoid(DenseTensor& t) {
    for (double& v : t.data) v = sigmoid(v);
}

void map_tanh(DenseTensor& t) {
    for (double& v : t.data) v = std::tanh(v);
}

void column_sums_into(const DenseTensor& m, DenseTensor& out) {
    const index_t b = m.shape.extent(0);
    const index_t n = m.shape.extent(1);
    for (index_t r = 0; r < b; ++r) {
        const double* row = m.data.data() + static_cast<std::size_t>(r * n);
        for (index_t j = 0; j < n; ++j) out[j] += row[j];
    }
}

void zero_inactive_rows(DenseTensor& m, const std::vector<char>& active) {
    const index_t b = m.shape.extent(0);
    const index_t n = m.shape.extent(1);
    for (index_t r = 0; r < b; ++r)
        if (!active[static_cast<std::size_t>(r)])
            std::fill_n(m.data.data() + static_cast<std::size_t>(r * n), n, 0.0);
}

DenseTensor draw_mask(Rng& rng, index_t rows, index_t cols, double rate) {
    DenseTensor mask(Shape({rows, cols}));
    const double scale = 1.0 / (1.0 - rate);
    for (double& v : mask.data) v = rng.uniform() < rate ? 0.0 : scale;
    return mask;
}

/// One batched cell update. h_prev/c_prev are (B, N); x_t is (B, M). When
/// `active` is given, rows flagged inactive keep their previous state. The
/// cache, when requested, receives every intermediate the backward pass
/// reads.
HiddenState step_batch(const RNNCell& cell, const DenseTensor& x_t, const HiddenState& prev,
                       const DenseTensor* x_mask, const DenseTensor* h_mask,
                       const std::vector<char>* active, StepCache* cache) {
    const index_t n = cell.hidden_size;
    const index_t bsz = x_t.shape.extent(0);
    if (prev.h.shape.rank() != 2 || prev.h.shape.extent(0) != bsz || prev.h.shape.extent(1) != n)
        throw ShapeError("hidden state must be (batch, " + std::to_string(n) + ")");

    const DenseTensor x_used = x_mask ? hadamard(x_t, *x_mask) : x_t;
    const DenseTensor h_tilde = h_mask ? hadamard(prev.h, *h_mask) : prev.h;
    DenseTensor pre = apply_input_map(cell, x_used);

    HiddenState out;
    if (cell.kind == CellKind::SRNN) {
        DenseTensor a = std::move(pre);
        add_recurrent(a, h_tilde, cell.u[0]);
        add_bias_rows(a, cell.biases[0]);
        map_tanh(a);
        if (cache) cache->h_act = a;
        out.h = std::move(a);
    } else if (cell.kind == CellKind::GRU) {
        DenseTensor r = slice_gate(pre, 0, n);
        add_recurrent(r, h_tilde, cell.u[0]);
        add_bias_rows(r, cell.biases[0]);
        map_sigmoid(r);

        DenseTensor z = slice_gate(pre, 1, n);
        add_recurrent(z, h_tilde, cell.u[1]);
        add_bias_rows(z, cell.biases[1]);
        map_sigmoid(z);

        DenseTensor rh = hadamard(r, h_tilde);
        DenseTensor d = slice_gate(pre, 2, n);
        add_recurrent(d, rh, cell.u[2]);
        map_tanh(d);

        DenseTensor h(prev.h.shape);
        for (index_t i = 0; i < h.size(); ++i)
            h[i] = (1.0 - z[i]) * prev.h[i] + z[i] * d[i];
        if (cache) {
            cache->r = std::move(r);
            cache->z = std::move(z);
            cache->d = std::move(d);
            cache->rh = std::move(rh);
        }
        out.h = std::move(h);
    } else {
        if (prev.c.shape != prev.h.shape)
            throw ShapeError("LSTM cell memory must match the hidden state shape");
        DenseTensor gates[4];
        for (index_t g = 0; g < 4; ++g) {
            gates[g] = slice_gate(pre, g, n);
            add_recurrent(gates[g], h_tilde, cell.u[static_cast<std::size_t>(g)]);
            add_bias_rows(gates[g], cell.biases[static_cast<std::size_t>(g)]);
        }
        map_sigmoid(gates[0]); // k
        map_sigmoid(gates[1]); // f
        map_sigmoid(gates[2]); // o
        map_tanh(gates[3]);    // g

        DenseTensor c(prev.c.shape);
        for (index_t i = 0; i < c.size(); ++i)
            c[i] = gates[1][i] * prev.c[i] + gates[0][i] * gates[3][i];
        DenseTensor tanh_c = c;
        map_tanh(tanh_c);
        DenseTensor h = hadamard(gates[2], tanh_c);
        if (cache) {
            cache->k = std::move(gates[0]);
            cache->f = std::move(gates[1]);
            cache->o = std::move(gates[2]);
            cache->g = std::move(gates[3]);
            cache->c_prev = prev.c;
            cache->tanh_c = std::move(tanh_c);
        }
        out.h = std::move(h);
        out.c = std::move(c);
    }

    if (active) {
        for (index_t r = 0; r < bsz; ++r) {
            if ((*active)[static_cast<std::size_t>(r)]) continue;
            for (index_t j = 0; j < n; ++j) {
                out.h[r * n + j] = prev.h[r * n + j];
                if (cell.kind == CellKind::LSTM) out.c[r * n + j] = prev.c[r * n + j];
            }
        }
    }
    if (cache) {
        cache->x_used = x_used;
        cache->h_prev = prev.h;
        cache->h_tilde = h_tilde;
        if (x_mask) cache->x_mask = *x_mask;
        if (h_mask) cache->h_mask = *h_mask;
        cache->active = active ? *active
                               : std::vector<char>(static_cast<std::size_t>(bsz), char(1));
    }
    return out;
}

DenseTensor as_row(const DenseTensor& v, index_t width, const char* what) {
    if (v.shape.rank() != 1 || v.shape.extent(0) != width)
        throw ShapeError(std::string(what) + " must be a vector of length " + std::to_string(width));
    return DenseTensor(Shape({1, width}), v.data);
}

DenseTensor as_vector(DenseTensor row) {
    const index_t n = row.shape.extent(1);
    return DenseTensor(Shape({n}), std::move(row.data));
}

} // namespace

DenseTensor srnn_step(const RNNCell& cell, const DenseTensor& x, const DenseTensor& h_prev) {
    if (cell.kind != CellKind::SRNN) throw ArgumentError("srnn_step on a non-SRNN cell");
    HiddenState prev;
    prev.h = as_row(h_prev, cell.hidden_size, "h_prev");
    return as_vector(step_batch(cell, as_row(x, cell.input_size, "x"), prev,
                                nullptr, nullptr, nullptr, nullptr)
                         .h);
}

DenseTensor gru_step(const RNNCell& cell, const DenseTensor& x, const DenseTensor& h_prev) {
    if (cell.kind != CellKind::GRU) throw ArgumentError("gru_step on a non-GRU cell");
    HiddenState prev;
    prev.h = as_row(h_prev, cell.hidden_size, "h_prev");
    return as_vector(step_batch(cell, as_row(x, cell.input_size, "x"), prev,
                                nullptr, nullptr, nullptr, nullptr)
                         .h);
}

HiddenState lstm_step(const RNNCell& cell, const DenseTensor& x, const HiddenState& state) {
    if (cell.kind != CellKind::LSTM) throw ArgumentError("lstm_step on a non-LSTM cell");
    HiddenState prev;
    prev.h = as_row(state.h, cell.hidden_size, "h");
    prev.c = as_row(state.c, cell.hidden_size, "c");
    HiddenState next = step_batch(cell, as_row(x, cell.input_size, "x"), prev,
                                  nullptr, nullptr, nullptr, nullptr);
    HiddenState out;
    out.h = as_vector(std::move(next.h));
    out.c = as_vector(std::move(next.c));
    return out;
}

DenseTensor run_batch(const RNNCell& cell, const DenseTensor& x,
                      const std::vector<index_t>& lengths, const Dropout& dropout,
                      Rng* rng, std::vector<StepCache>* caches) {
    if (x.shape.rank() != 3)
        throw ShapeError("run_batch expects (batch, time, features) input");
    const index_t bsz = x.shape.extent(0);
    const index_t tmax = x.shape.extent(1);
    const index_t m = x.shape.extent(2);
    const index_t n = cell.hidden_size;
    if (m != cell.input_size)
        throw ShapeError("frame width " + std::to_string(m) + " does not match cell input size " +
                         std::to_string(cell.input_size));
    if (static_cast<index_t>(lengths.size()) != bsz)
        throw ShapeError("lengths count does not match the batch size");
    for (index_t len : lengths)
        if (len < 1 || len > tmax)
            throw ArgumentError("sequence lengths must lie in [1, " + std::to_string(tmax) + "]");
    if (dropout.rate < 0.0 || dropout.rate >= 1.0)
        throw ArgumentError("dropout rate must lie in [0, 1)");
    if (dropout.rate > 0.0 && !rng)
        throw ArgumentError("dropout needs a random source");

    HiddenState state;
    state.h = DenseTensor(Shape({bsz, n}));
    if (cell.kind == CellKind::LSTM) state.c = DenseTensor(Shape({bsz, n}));

    DenseTensor x_t(Shape({bsz, m}));
    std::vector<char> active(static_cast<std::size_t>(bsz));
    for (index_t t = 0; t < tmax; ++t) {
        for (index_t r = 0; r < bsz; ++r) {
            const double* src = x.data.data() + static_cast<std::size_t>((r * tmax + t) * m);
            std::copy_n(src, m, x_t.data.data() + static_cast<std::size_t>(r * m));
            active[static_cast<std::size_t>(r)] = t < lengths[static_cast<std::size_t>(r)];
        }
        DenseTensor x_mask, h_mask;
        if (dropout.rate > 0.0) {
            x_mask = draw_mask(*rng, bsz, m, dropout.rate);
            h_mask = draw_mask(*rng, bsz, n, dropout.rate);
        }
        StepCache* cc = caches ? &caches->emplace_back() : nullptr;
        state = step_batch(cell, x_t, state,
                           dropout.rate > 0.0 ? &x_mask : nullptr,
                           dropout.rate > 0.0 ? &h_mask : nullptr, &active, cc);
    }
    return state.h;
}

DenseTensor run_sequence(const RNNCell& cell, const std::vector<DenseTensor>& frames,
                         const Dropout& dropout, Rng* rng) {
    if (frames.empty()) throw ArgumentError("run_sequence needs at least one frame");
    const index_t t = static_cast<index_t>(frames.size());
    const index_t m = cell.input_size;
    DenseTensor x(Shape({1, t, m}));
    for (index_t s = 0; s < t; ++s) {
        const DenseTensor& f = frames[static_cast<std::size_t>(s)];
        if (f.shape.rank() != 1 || f.shape.extent(0) != m)
            throw ShapeError("frame " + std::to_string(s) + " must be a vector of length " +
                             std::to_string(m));
        std::copy(f.data.begin(), f.data.end(),
                  x.data.begin() + static_cast<std::ptrdiff_t>(s * m));
    }
    DenseTensor h = run_batch(cell, x, {t}, dropout, rng, nullptr);
    return DenseTensor(Shape({cell.hidden_size}), std::move(h.data));
}

CellGradients zero_cell_gradients(const RNNCell& cell) {
    CellGradients g;
    if (const auto* dm = std::get_if<DenseMap>(&cell.input_map)) {
        g.dense_weight = DenseTensor(dm->weight.shape);
    } else {
        for (const DenseTensor& core : std::get<TTMap>(cell.input_map).layer.cores.cores)
            g.cores.emplace_back(core.shape);
    }
    for (const DenseTensor& u : cell.u) g.u.emplace_back(u.shape);
    for (const DenseTensor& b : cell.biases) g.biases.emplace_back(b.shape);
    return g;
}

namespace {

void input_map_backward(const RNNCell& cell, const DenseTensor& x_used, const DenseTensor& gpre,
                        CellGradients& grads) {
    if (std::holds_alternative<DenseMap>(cell.input_map)) {
        kernels::matmul_atb(x_used.data.data(), gpre.data.data(), grads.dense_weight.data.data(),
                            x_used.shape.extent(1), x_used.shape.extent(0), gpre.shape.extent(1),
                            true);
        return;
    }
    TTGradients g = tt_backward(std::get<TTMap>(cell.input_map).layer, x_used, gpre);
    for (std::size_t k = 0; k < g.cores.size(); ++k)
        for (index_t i = 0; i < g.cores[k].size(); ++i) grads.cores[k][i] += g.cores[k][i];
}

// gh_tilde contributions flow to h_prev through the dropout mask.
void add_tilde_grad(DenseTensor& gh_prev, const DenseTensor& gh_tilde, const DenseTensor& h_mask) {
    if (h_mask.data.empty()) {
        for (index_t i = 0; i < gh_prev.size(); ++i) gh_prev[i] += gh_tilde[i];
    } else {
        for (index_t i = 0; i < gh_prev.size(); ++i) gh_prev[i] += gh_tilde[i] * h_mask[i];
    }
}

// Accumulates one recurrent product's gradients: gU += ga^T * h_tilde and
// gh_tilde += ga * U.
void recurrent_backward(const DenseTensor& ga, const DenseTensor& h_tilde, const DenseTensor& u,
                        DenseTensor& gu, DenseTensor& gh_tilde) {
    const index_t bsz = ga.shape.extent(0);
    const index_t n = ga.shape.extent(1);
    kernels::matmul_atb(ga.data.data(), h_tilde.data.data(), gu.data.data(), n, bsz, n, true);
    kernels::matmul_ab(ga.data.data(), u.data.data(), gh_tilde.data.data(), bsz, n, n, true);
}

} // namespace

void backprop_batch(const RNNCell& cell, const std::vector<StepCache>& caches,
                    const DenseTensor& grad_h, CellGradients& grads) {
    if (caches.empty()) return;
    const index_t n = cell.hidden_size;
    const index_t bsz = caches.front().h_prev.shape.extent(0);
    if (grad_h.shape.rank() != 2 || grad_h.shape.extent(0) != bsz || grad_h.shape.extent(1) != n)
        throw ShapeError("grad_h must be (batch, " + std::to_string(n) + ")");
    const index_t c = cell.gates();

    DenseTensor gh = grad_h;
    DenseTensor gc;
    if (cell.kind == CellKind::LSTM) gc = DenseTensor(Shape({bsz, n}));

    for (std::size_t t = caches.size(); t-- > 0;) {
        const StepCache& cc = caches[t];
        DenseTensor gh_a = gh;
        zero_inactive_rows(gh_a, cc.active);

        DenseTensor gh_prev(Shape({bsz, n}));
        DenseTensor gh_tilde(Shape({bsz, n}));
        DenseTensor gpre(Shape({bsz, c * n}));

        if (cell.kind == CellKind::SRNN) {
            DenseTensor ga(gh_a.shape);
            for (index_t i = 0; i < ga.size(); ++i)
                ga[i] = gh_a[i] * (1.0 - cc.h_act[i] * cc.h_act[i]);
            column_sums_into(ga, grads.biases[0]);
            recurrent_backward(ga, cc.h_tilde, cell.u[0], grads.u[0], gh_tilde);
            gpre.data = ga.data;
        } else if (cell.kind == CellKind::GRU) {
            DenseTensor gd(gh_a.shape), gz(gh_a.shape);
            for (index_t i = 0; i < gh_a.size(); ++i) {
                gd[i] = gh_a[i] * cc.z[i];
                gz[i] = gh_a[i] * (cc.d[i] - cc.h_prev[i]);
                gh_prev[i] = gh_a[i] * (1.0 - cc.z[i]);
            }
            DenseTensor ga_d(gh_a.shape);
            for (index_t i = 0; i < ga_d.size(); ++i)
                ga_d[i] = gd[i] * (1.0 - cc.d[i] * cc.d[i]);
            DenseTensor grh(Shape({bsz, n}));
            kernels::matmul_ab(ga_d.data.data(), cell.u[2].data.data(), grh.data.data(), bsz, n, n,
                               false);
            kernels::matmul_atb(ga_d.data.data(), cc.rh.data.data(), grads.u[2].data.data(), n, bsz,
                                n, true);
            DenseTensor gr(gh_a.shape);
            for (index_t i = 0; i < gr.size(); ++i) {
                gr[i] = grh[i] * cc.h_tilde[i];
                gh_tilde[i] = grh[i] * cc.r[i];
            }
            DenseTensor ga_z(gh_a.shape), ga_r(gh_a.shape);
            for (index_t i = 0; i < ga_z.size(); ++i) {
                ga_z[i] = gz[i] * cc.z[i] * (1.0 - cc.z[i]);
                ga_r[i] = gr[i] * cc.r[i] * (1.0 - cc.r[i]);
            }
            column_sums_into(ga_r, grads.biases[0]);
            column_sums_into(ga_z, grads.biases[1]);
            recurrent_backward(ga_r, cc.h_tilde, cell.u[0], grads.u[0], gh_tilde);
            recurrent_backward(ga_z, cc.h_tilde, cell.u[1], grads.u[1], gh_tilde);
            paste_gate(gpre, ga_r, 0, n);
            paste_gate(gpre, ga_z, 1, n);
            paste_gate(gpre, ga_d, 2, n);
        } else {
            DenseTensor gc_a = gc;
            zero_inactive_rows(gc_a, cc.active);
            DenseTensor go(gh_a.shape), gc_eff(gh_a.shape);
            for (index_t i = 0; i < gh_a.size(); ++i) {
                go[i] = gh_a[i] * cc.tanh_c[i];
                gc_eff[i] = gc_a[i] + gh_a[i] * cc.o[i] * (1.0 - cc.tanh_c[i] * cc.tanh_c[i]);
            }
            DenseTensor ga_k(gh_a.shape), ga_f(gh_a.shape), ga_o(gh_a.shape), ga_g(gh_a.shape);
            DenseTensor gc_prev(gh_a.shape);
            for (index_t i = 0; i < gh_a.size(); ++i) {
                const double gk = gc_eff[i] * cc.g[i];
                const double gf = gc_eff[i] * cc.c_prev[i];
                const double gg = gc_eff[i] * cc.k[i];
                gc_prev[i] = gc_eff[i] * cc.f[i];
                ga_k[i] = gk * cc.k[i] * (1.0 - cc.k[i]);
                ga_f[i] = gf * cc.f[i] * (1.0 - cc.f[i]);
                ga_o[i] = go[i] * cc.o[i] * (1.0 - cc.o[i]);
                ga_g[i] = gg * (1.0 - cc.g[i] * cc.g[i]);
            }
            const DenseTensor* gas[4] = {&ga_k, &ga_f, &ga_o, &ga_g};
            for (index_t g = 0; g < 4; ++g) {
                column_sums_into(*gas[g], grads.biases[static_cast<std::size_t>(g)]);
                recurrent_backward(*gas[g], cc.h_tilde, cell.u[static_cast<std::size_t>(g)],
                                   grads.u[static_cast<std::size_t>(g)], gh_tilde);
                paste_gate(gpre, *gas[g], g, n);
            }
            for (index_t r = 0; r < bsz; ++r)
                if (!cc.active[static_cast<std::size_t>(r)])
                    for (index_t j = 0; j < n; ++j) gc_prev[r * n + j] = gc[r * n + j];
            gc = std::move(gc_prev);
        }

        input_map_backward(cell, cc.x_used, gpre, grads);
        add_tilde_grad(gh_prev, gh_tilde, cc.h_mask);
        for (index_t r = 0; r < bsz; ++r)
            if (!cc.active[static_cast<std::size_t>(r)])
                for (index_t j = 0; j < n; ++j) gh_prev[r * n + j] += gh[r * n + j];
        gh = std::move(gh_prev);
    }
}

} // namespace ttrnn
