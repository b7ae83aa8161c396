#include "ttrnn/tt_layer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ttrnn/kernels.hpp"
#include "ttrnn/rng.hpp"

namespace ttrnn {

namespace {

index_t checked_product(const std::vector<index_t>& v) {
    index_t p = 1;
    for (index_t e : v) {
        if (e < 1) throw ShapeError("factor extents must be positive");
        if (__builtin_mul_overflow(p, e, &p)) throw ShapeError("factor product overflows index type");
    }
    return p;
}

} // namespace

index_t TTShape::input_size() const { return checked_product(m); }
index_t TTShape::output_size() const { return checked_product(n); }

void validate_shape(const TTShape& s) {
    const std::size_t d = s.m.size();
    if (d < 1) throw ShapeError("TT shape needs at least one dimension");
    if (s.n.size() != d)
        throw ShapeError("TT shape has " + std::to_string(d) + " input factors but " +
                         std::to_string(s.n.size()) + " output factors");
    if (s.ranks.size() != d + 1)
        throw ShapeError("TT shape needs " + std::to_string(d + 1) + " ranks, got " +
                         std::to_string(s.ranks.size()));
    for (index_t e : s.m)
        if (e < 1) throw ShapeError("input factors must be positive");
    for (index_t e : s.n)
        if (e < 1) throw ShapeError("output factors must be positive");
    for (index_t r : s.ranks)
        if (r < 1) throw ShapeError("ranks must be positive");
    if (s.ranks.front() != 1 || s.ranks.back() != 1)
        throw ShapeError("boundary ranks r_0 and r_d must equal 1");
    checked_product(s.m);
    checked_product(s.n);
}

TTCores init_cores(const TTShape& s, std::uint64_t seed) {
    Rng rng(seed);
    return init_cores(s, rng);
}

TTCores init_cores(const TTShape& s, Rng& rng) {
    validate_shape(s);
    const index_t d = s.d();
    const double M = static_cast<double>(s.input_size());
    const double N = static_cast<double>(s.output_size());
    const double base = std::pow(2.0 / (M + N), 1.0 / (2.0 * static_cast<double>(d)));

    TTCores c;
    c.shape = s;
    c.cores.reserve(static_cast<std::size_t>(d));
    for (index_t k = 0; k < d; ++k) {
        const double sigma = base / std::sqrt(static_cast<double>(s.ranks[static_cast<std::size_t>(k) + 1]));
        DenseTensor core(Shape({s.m[static_cast<std::size_t>(k)], s.n[static_cast<std::size_t>(k)],
                                s.ranks[static_cast<std::size_t>(k)], s.ranks[static_cast<std::size_t>(k) + 1]}));
        for (double& v : core.data) v = sigma * rng.normal();
        c.cores.push_back(std::move(core));
    }
    return c;
}

double reconstruct_entry(const TTCores& c, std::span<const index_t> i, std::span<const index_t> j) {
    const TTShape& s = c.shape;
    const std::size_t d = s.m.size();
    if (i.size() != d || j.size() != d)
        throw IndexError("reconstruct_entry expects " + std::to_string(d) + " indices per side");
    for (std::size_t k = 0; k < d; ++k) {
        if (i[k] < 0 || i[k] >= s.m[k])
            throw IndexError("row index " + std::to_string(i[k]) + " out of range for factor " + std::to_string(k));
        if (j[k] < 0 || j[k] >= s.n[k])
            throw IndexError("column index " + std::to_string(j[k]) + " out of range for factor " + std::to_string(k));
    }
    std::vector<double> cur{1.0};
    std::vector<double> next;
    for (std::size_t k = 0; k < d; ++k) {
        const index_t rp = s.ranks[k];
        const index_t rn = s.ranks[k + 1];
        const double* slice = c.cores[k].data.data() +
                              static_cast<std::size_t>((i[k] * s.n[k] + j[k]) * rp * rn);
        next.assign(static_cast<std::size_t>(rn), 0.0);
        for (index_t q = 0; q < rp; ++q) {
            const double v = cur[static_cast<std::size_t>(q)];
            for (index_t r = 0; r < rn; ++r)
                next[static_cast<std::size_t>(r)] += v * slice[q * rn + r];
        }
        cur.swap(next);
    }
    return cur[0];
}

DenseTensor reconstruct_matrix(const TTCores& c) {
    const TTShape& s = c.shape;
    validate_shape(s);
    const index_t M = s.input_size();
    const index_t N = s.output_size();
    Shape out_shape({M, N});

    // Grow the explicit matrix one core at a time, keeping a trailing rank
    // axis: P has logical shape (rows, cols, r_k) and P(a,b,:) is the chain
    // product over the first k cores at the accumulated indices (a, b).
    std::vector<double> p{1.0};
    std::vector<double> next;
    index_t rows = 1, cols = 1;
    for (std::size_t k = 0; k < s.m.size(); ++k) {
        const index_t mk = s.m[k], nk = s.n[k];
        const index_t rp = s.ranks[k], rn = s.ranks[k + 1];
        const double* core = c.cores[k].data.data();
        next.assign(static_cast<std::size_t>(rows * mk * cols * nk * rn), 0.0);
        for (index_t a = 0; a < rows; ++a)
            for (index_t i = 0; i < mk; ++i)
                for (index_t b = 0; b < cols; ++b)
                    for (index_t j = 0; j < nk; ++j) {
                        const double* pv = p.data() + static_cast<std::size_t>((a * cols + b) * rp);
                        const double* cb = core + static_cast<std::size_t>((i * nk + j) * rp * rn);
                        double* ov = next.data() +
                                     static_cast<std::size_t>(((a * mk + i) * (cols * nk) + b * nk + j) * rn);
                        for (index_t q = 0; q < rp; ++q) {
                            const double v = pv[q];
                            for (index_t r = 0; r < rn; ++r) ov[r] += v * cb[q * rn + r];
                        }
                    }
        p.swap(next);
        rows *= mk;
        cols *= nk;
    }
    return DenseTensor(std::move(out_shape), std::move(p));
}

TTLayer make_tt_layer(const TTShape& s, std::uint64_t seed, bool with_bias) {
    TTLayer layer;
    layer.cores = init_cores(s, seed);
    if (with_bias) layer.bias = DenseTensor(Shape({s.output_size()}));
    return layer;
}

namespace {

void check_forward_shapes(const TTLayer& layer, const DenseTensor& x) {
    const index_t M = layer.cores.shape.input_size();
    if (x.shape.rank() != 2)
        throw ShapeError("tt_forward expects a (batch, features) input, got rank " +
                         std::to_string(x.shape.rank()));
    if (x.shape.extent(1) != M)
        throw ShapeError("input width " + std::to_string(x.shape.extent(1)) +
                         " does not match layer input size " + std::to_string(M));
}

/// One left-to-right sweep. When `stash` is non-null it receives the inputs
/// of every contraction step (the prefix buffers F_0..F_{d-1}); the return
/// value is the pre-bias output laid out (B, N).
std::vector<double> contract_forward(const TTLayer& layer, const DenseTensor& x,
                                     std::vector<std::vector<double>>* stash) {
    const TTShape& s = layer.cores.shape;
    const index_t d = s.d();
    const index_t B = x.shape.extent(0);

    std::vector<double> cur = x.data;
    std::vector<double> next;
    index_t nj = 1;
    index_t mrem = s.input_size();
    for (index_t k = 0; k < d; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const index_t mk = s.m[ku], nk = s.n[ku];
        const index_t rp = s.ranks[ku], rn = s.ranks[ku + 1];
        mrem /= mk;
        next.resize(static_cast<std::size_t>(B * nj * nk * mrem * rn));
        kernels::tt_step_forward(cur.data(), layer.cores.cores[ku].data.data(), next.data(),
                                 B, nj, mk, nk, mrem, rp, rn);
        if (stash)
            stash->push_back(std::move(cur));
        cur.swap(next);
        nj *= nk;
    }
    return cur;
}

} // namespace

DenseTensor tt_forward(const TTLayer& layer, const DenseTensor& x) {
    check_forward_shapes(layer, x);
    const index_t B = x.shape.extent(0);
    const index_t N = layer.cores.shape.output_size();

    DenseTensor y(Shape({B, N}), contract_forward(layer, x, nullptr));
    if (layer.bias) {
        const double* b = layer.bias->data.data();
        for (index_t r = 0; r < B; ++r) {
            double* row = y.data.data() + static_cast<std::size_t>(r * N);
            for (index_t jc = 0; jc < N; ++jc) row[jc] += b[jc];
        }
    }
    return y;
}

TTGradients tt_backward(const TTLayer& layer, const DenseTensor& x, const DenseTensor& grad_y) {
    check_forward_shapes(layer, x);
    const TTShape& s = layer.cores.shape;
    const index_t d = s.d();
    const index_t B = x.shape.extent(0);
    const index_t M = s.input_size();
    const index_t N = s.output_size();
    if (grad_y.shape.rank() != 2 || grad_y.shape.extent(0) != B || grad_y.shape.extent(1) != N)
        throw ShapeError("grad_y must be (batch, " + std::to_string(N) + ")");

    std::vector<std::vector<double>> prefixes;
    prefixes.reserve(static_cast<std::size_t>(d));
    contract_forward(layer, x, &prefixes);

    TTGradients g;
    g.cores.reserve(static_cast<std::size_t>(d));
    for (index_t k = 0; k < d; ++k)
        g.cores.emplace_back(layer.cores.cores[static_cast<std::size_t>(k)].shape);

    // Right-to-left adjoint sweep. suffix holds dL/dF_k in F_k's layout
    // (B, NJ_k, Mrem_k, r_k), starting from grad_y as (B, N, 1, 1).
    std::vector<double> suffix = grad_y.data;
    std::vector<double> next;
    index_t nj = N;
    index_t mrem = 1;
    for (index_t k = d - 1; k >= 0; --k) {
        const auto ku = static_cast<std::size_t>(k);
        const index_t mk = s.m[ku], nk = s.n[ku];
        const index_t rp = s.ranks[ku], rn = s.ranks[ku + 1];
        nj /= nk;
        kernels::tt_core_grad(prefixes[ku].data(), suffix.data(), g.cores[ku].data.data(),
                              B, nj, mk, nk, mrem, rp, rn);
        next.resize(static_cast<std::size_t>(B * nj * mk * mrem * rp));
        kernels::tt_step_suffix(suffix.data(), layer.cores.cores[ku].data.data(), next.data(),
                                B, nj, mk, nk, mrem, rp, rn);
        suffix.swap(next);
        mrem *= mk;
    }
    g.input = DenseTensor(Shape({B, M}), std::move(suffix));

    if (layer.bias) {
        DenseTensor gb(Shape({N}));
        for (index_t r = 0; r < B; ++r) {
            const double* row = grad_y.data.data() + static_cast<std::size_t>(r * N);
            for (index_t jc = 0; jc < N; ++jc) gb.data[static_cast<std::size_t>(jc)] += row[jc];
        }
        g.bias = std::move(gb);
    }
    return g;
}

index_t tt_param_count(const TTShape& s, index_t gate_multiplier) {
    validate_shape(s);
    if (gate_multiplier < 1) throw ArgumentError("gate multiplier must be >= 1");
    index_t total = 0;
    for (std::size_t k = 0; k < s.m.size(); ++k)
        total += s.m[k] * s.n[k] * s.ranks[k] * s.ranks[k + 1];
    total += (gate_multiplier - 1) * s.m[0] * s.n[0] * s.ranks[0] * s.ranks[1];
    return total;
}

index_t dense_param_count(index_t input_size, index_t output_size, index_t gate_multiplier) {
    if (input_size < 1 || output_size < 1 || gate_multiplier < 1)
        throw ArgumentError("sizes and gate multiplier must be >= 1");
    index_t p = input_size;
    if (__builtin_mul_overflow(p, gate_multiplier, &p) || __builtin_mul_overflow(p, output_size, &p))
        throw ShapeError("dense parameter count overflows index type");
    return p;
}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) : num(numerator), den(denominator) {
    if (den == 0) throw ArgumentError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

Rational compression_rate(const TTShape& s, index_t gate_multiplier) {
    const index_t count = tt_param_count(s, gate_multiplier);
    const index_t dense = dense_param_count(s.input_size(), s.output_size(), gate_multiplier);
    return Rational(count, dense);
}

} // namespace ttrnn
