// Acceptance suite: every release criterion, one PASS/FAIL line each.
// Runs the desk-scale checks in order; exits non-zero when any fail.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ttrnn/checkpoint.hpp"
#include "ttrnn/dataset.hpp"
#include "ttrnn/kernels.hpp"
#include "ttrnn/training.hpp"

using namespace ttrnn;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool expect(bool cond, const std::string& why, std::string& detail) {
    if (!cond && detail.empty()) detail = why;
    return cond;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

std::vector<index_t> const_ranks(index_t d, index_t r) {
    std::vector<index_t> ranks(static_cast<std::size_t>(d) + 1, r);
    ranks.front() = 1;
    ranks.back() = 1;
    return ranks;
}

std::vector<unsigned char> slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) return {};
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<unsigned char>& bytes) {
    std::ofstream os(p, std::ios::binary);
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

bool files_equal(const fs::path& a, const fs::path& b) {
    const auto ba = slurp(a);
    const auto bb = slurp(b);
    return !ba.empty() && ba == bb;
}

int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

// ---- criterion 1: parameter-count goldens -------------------------------

bool criterion_counts(std::string& detail) {
    bool ok = true;
    const auto check = [&](index_t got, index_t want, const std::string& label) {
        ok &= expect(got == want,
                     label + ": got " + std::to_string(got) + ", want " + std::to_string(want),
                     detail);
    };

    TTShape ucf;
    ucf.m = {8, 20, 20, 18};
    ucf.n = {4, 4, 4, 4};
    const index_t ttl[3] = {1752, 2976, 4520};
    const index_t lstm_fused[3] = {2040, 3360, 5000};
    const index_t gru_fused[3] = {1944, 3232, 4840};
    for (int i = 0; i < 3; ++i) {
        ucf.ranks = const_ranks(4, i + 3);
        const std::string tag = "rank " + std::to_string(i + 3) + " ";
        check(tt_param_count(ucf), ttl[i], tag + "TTL");
        check(4 * tt_param_count(ucf), 4 * ttl[i], tag + "vanilla TT-LSTM");
        check(3 * tt_param_count(ucf), 3 * ttl[i], tag + "vanilla TT-GRU");
        check(tt_param_count(ucf, 4), lstm_fused[i], tag + "fused TT-LSTM");
        check(tt_param_count(ucf, 3), gru_fused[i], tag + "fused TT-GRU");
    }
    check(dense_param_count(57600, 256), 14745600, "dense layer");

    TTShape holly;
    holly.m = {10, 18, 13, 30};
    holly.n = {4, 4, 4, 4};
    holly.ranks = const_ranks(4, 4);
    check(tt_param_count(holly, 3), 2944, "70200-input fused TT-GRU");
    check(tt_param_count(holly, 4), 3104, "70200-input fused TT-LSTM");

    TTShape faces;
    faces.m = {4, 20, 20, 36};
    faces.n = {4, 4, 4, 4};
    faces.ranks = const_ranks(4, 4);
    check(tt_param_count(faces, 3), 3328, "4x20x20x36 fused TT-GRU");
    check(tt_param_count(faces, 4), 3392, "4x20x20x36 fused TT-LSTM");

    check(dense_param_count(57600, 256, 3), 44236800, "plain GRU, 57600->256");
    check(dense_param_count(57600, 256, 4), 58982400, "plain LSTM, 57600->256");
    check(dense_param_count(70200, 256, 3), 53913600, "plain GRU, 70200->256");
    check(dense_param_count(70200, 256, 4), 71884800, "plain LSTM, 70200->256");
    check(dense_param_count(57600, 225, 3), 38880000, "plain GRU, 57600->225");
    check(dense_param_count(57600, 225, 4), 51840000, "plain LSTM, 57600->225");
    if (ok) detail = "24 golden counts exact";
    return ok;
}

// ---- criterion 2: compression rates --------------------------------------

bool criterion_rates(std::string& detail) {
    bool ok = true;
    TTShape s;
    s.m = {8, 20, 20, 18};
    s.n = {4, 4, 4, 4};

    s.ranks = const_ranks(4, 4);
    ok &= expect(compression_rate(s) == Rational(2976, 14745600),
                 "rank-4 rate is not 2976/14745600", detail);
    const std::string r4 = fmt("%.1e", compression_rate(s).value());

    s.ranks = const_ranks(4, 5);
    ok &= expect(compression_rate(s) == Rational(4520, 14745600),
                 "rank-5 rate is not 4520/14745600", detail);
    const std::string r5 = fmt("%.1e", compression_rate(s).value());

    ok &= expect(r4 == "2.0e-04", "rank-4 rate prints as " + r4, detail);
    ok &= expect(r5 == "3.1e-04", "rank-5 rate prints as " + r5, detail);
    if (ok) detail = "rates " + r4 + " and " + r5 + " from exact rationals";
    return ok;
}

// ---- criterion 3: TT forward vs dense oracle ------------------------------

TTShape random_shape(Rng& rng, index_t dmin, index_t dmax, index_t fmax, index_t rmax,
                     index_t cap) {
    while (true) {
        TTShape s;
        const index_t d = rng.uniform_int(dmin, dmax);
        for (index_t k = 0; k < d; ++k) {
            s.m.push_back(rng.uniform_int(1, fmax));
            s.n.push_back(rng.uniform_int(1, fmax));
        }
        s.ranks.push_back(1);
        for (index_t k = 1; k < d; ++k) s.ranks.push_back(rng.uniform_int(1, rmax));
        s.ranks.push_back(1);
        if (s.input_size() <= cap && s.output_size() <= cap) return s;
    }
}

bool criterion_forward_oracle(std::string& detail) {
    Rng rng(301);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const TTShape s = random_shape(rng, 1, 4, 6, 6, 1024);
        const TTLayer layer = make_tt_layer(s, 400 + trial, true);
        const index_t b = rng.uniform_int(1, 4);
        const index_t m = s.input_size(), n = s.output_size();

        DenseTensor x(Shape({b, m}));
        for (double& v : x.data) v = 2.0 * rng.uniform() - 1.0;

        const DenseTensor y = tt_forward(layer, x);
        const DenseTensor w = reconstruct_matrix(layer.cores);
        for (index_t r = 0; r < b; ++r) {
            for (index_t c = 0; c < n; ++c) {
                double want = (*layer.bias)[c];
                for (index_t k = 0; k < m; ++k) want += x[r * m + k] * w[k * n + c];
                const double rel =
                    std::abs(y[r * n + c] - want) / std::max(std::abs(want), 1e-9);
                worst = std::max(worst, rel);
            }
        }
    }
    detail = "50 layers, max relative error " + fmt("%.2e", worst);
    return worst < 1e-8;
}

// ---- criterion 4: gradient checks -----------------------------------------

double layer_fd_worst(const TTShape& s, std::uint64_t seed, Rng& rng) {
    TTLayer layer = make_tt_layer(s, seed, true);
    const index_t b = rng.uniform_int(1, 2);
    DenseTensor x(Shape({b, s.input_size()}));
    for (double& v : x.data) v = 2.0 * rng.uniform() - 1.0;
    DenseTensor gy(Shape({b, s.output_size()}));
    for (double& v : gy.data) v = 2.0 * rng.uniform() - 1.0;

    const TTGradients grads = tt_backward(layer, x, gy);
    const auto objective = [&] {
        const DenseTensor y = tt_forward(layer, x);
        double acc = 0.0;
        for (index_t i = 0; i < y.size(); ++i) acc += gy[i] * y[i];
        return acc;
    };

    const double h = 1e-5;
    double worst = 0.0;
    const auto fd_slot = [&](double got, double* slot) {
        const double save = *slot;
        *slot = save + h;
        const double up = objective();
        *slot = save - h;
        const double down = objective();
        *slot = save;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(got - fd) / std::max(std::abs(fd), 1e-6));
    };

    for (std::size_t k = 0; k < layer.cores.cores.size(); ++k)
        for (index_t i = 0; i < layer.cores.cores[k].size(); ++i)
            fd_slot(grads.cores[k][i], &layer.cores.cores[k].data[static_cast<std::size_t>(i)]);
    for (index_t i = 0; i < layer.bias->size(); ++i)
        fd_slot((*grads.bias)[i], &layer.bias->data[static_cast<std::size_t>(i)]);
    for (index_t i = 0; i < x.size(); ++i)
        fd_slot(grads.input[i], &x.data[static_cast<std::size_t>(i)]);
    return worst;
}

double model_fd_worst(CellKind kind, std::uint64_t seed) {
    CellConfig cfg;
    cfg.kind = kind;
    cfg.tt = true;
    cfg.tt_shape.m = {2, 3};
    cfg.tt_shape.n = {2, 2};
    cfg.tt_shape.ranks = {1, 2, 1};
    Model model = make_model(cfg, 3, ClassifierMode::Softmax, seed);

    Rng rng(seed + 17);
    Batch batch;
    batch.x = DenseTensor(Shape({2, 4, 6}));
    for (double& v : batch.x.data) v = rng.uniform();
    batch.lengths = {4, 3};
    batch.labels_single = {1, 2};

    const double lambda = 0.01;
    const BatchResult res = compute_batch(model, batch, lambda, 0.0, nullptr);
    const auto loss_now = [&] { return compute_batch(model, batch, lambda, 0.0, nullptr).loss; };

    const double h = 1e-5;
    double worst = 0.0;
    const auto fd_slot = [&](double got, double* slot) {
        const double save = *slot;
        *slot = save + h;
        const double up = loss_now();
        *slot = save - h;
        const double down = loss_now();
        *slot = save;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(got - fd) / std::max(std::abs(fd), 1e-6));
    };

    auto& cores = std::get<TTMap>(model.cell.input_map).layer.cores.cores;
    for (std::size_t k = 0; k < cores.size(); ++k)
        for (index_t i = 0; i < cores[k].size(); ++i)
            fd_slot(res.grads.cell.cores[k][i], &cores[k].data[static_cast<std::size_t>(i)]);
    for (std::size_t g = 0; g < model.cell.u.size(); ++g)
        for (index_t i = 0; i < model.cell.u[g].size(); ++i)
            fd_slot(res.grads.cell.u[g][i], &model.cell.u[g].data[static_cast<std::size_t>(i)]);
    for (std::size_t g = 0; g < model.cell.biases.size(); ++g)
        for (index_t i = 0; i < model.cell.biases[g].size(); ++i)
            fd_slot(res.grads.cell.biases[g][i],
                    &model.cell.biases[g].data[static_cast<std::size_t>(i)]);
    for (index_t i = 0; i < model.clf.weight.size(); ++i)
        fd_slot(res.grads.clf_weight[i], &model.clf.weight.data[static_cast<std::size_t>(i)]);
    for (index_t i = 0; i < model.clf.bias.size(); ++i)
        fd_slot(res.grads.clf_bias[i], &model.clf.bias.data[static_cast<std::size_t>(i)]);
    return worst;
}

bool criterion_gradients(std::string& detail) {
    Rng rng(401);
    double layer_worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const TTShape s = random_shape(rng, 1, 3, 3, 3, 64);
        layer_worst = std::max(layer_worst, layer_fd_worst(s, 500 + trial, rng));
    }
    const double gru_worst = model_fd_worst(CellKind::GRU, 42);
    const double lstm_worst = model_fd_worst(CellKind::LSTM, 43);
    const double e2e_worst = std::max(gru_worst, lstm_worst);

    detail = "20 layers max rel " + fmt("%.2e", layer_worst) + "; TT-GRU/TT-LSTM end-to-end max rel " +
             fmt("%.2e", e2e_worst);
    return layer_worst < 1e-4 && e2e_worst < 1e-3;
}

// ---- criterion 5: fused rate strictly below vanilla -----------------------

bool criterion_fused_rate(std::string& detail) {
    Rng rng(501);
    for (int trial = 0; trial < 1000; ++trial) {
        const TTShape s = random_shape(rng, 2, 4, 8, 6, 1 << 20);
        validate_shape(s);
        for (index_t c : {index_t{3}, index_t{4}}) {
            const Rational fused = compression_rate(s, c);
            const Rational vanilla(c * tt_param_count(s), c * dense_param_count(s.input_size(),
                                                                                s.output_size()));
            if (!(fused < vanilla)) {
                detail = "shape " + std::to_string(trial) + " with c=" + std::to_string(c) +
                         " has fused rate >= vanilla rate";
                return false;
            }
        }
    }
    detail = "r* < r exact for 1000 shapes, c in {3,4}";
    return true;
}

// ---- criterion 6: synthetic-task training ---------------------------------

SequenceDataset shuffle_frames(const SequenceDataset& ds, std::uint64_t seed) {
    SequenceDataset out = ds;
    Rng rng(seed);
    for (SequenceRecord& rec : out.records) {
        const index_t t_len = rec.frames.shape.extent(0);
        const index_t fsize = rec.frames.size() / t_len;
        double* base = rec.frames.data.data();
        for (index_t i = t_len - 1; i > 0; --i) {
            const index_t j = rng.uniform_int(0, i);
            if (i != j)
                std::swap_ranges(base + i * fsize, base + (i + 1) * fsize, base + j * fsize);
        }
    }
    return out;
}

bool criterion_synthetic(std::string& detail) {
    SyntheticSpec spec;
    spec.n_per_class = 125; // 500 sequences: fit splits them 400/100
    spec.t_min = 12;
    spec.t_max = 20;
    spec.height = 16;
    spec.width = 16;
    spec.channels = 3;
    spec.square = 4;
    spec.noise_std = 0.05;
    spec.seed = 7;
    const SequenceDataset ds = generate_synthetic(spec);

    CellConfig cell_cfg;
    cell_cfg.kind = CellKind::GRU;
    cell_cfg.tt = true;
    cell_cfg.tt_shape.m = {4, 4, 4, 12};
    cell_cfg.tt_shape.n = {4, 4, 2, 2};
    cell_cfg.tt_shape.ranks = {1, 3, 3, 3, 1};

    TrainConfig cfg;
    cfg.max_epochs = 30;
    cfg.seed = 1;

    const Model model = make_model(cell_cfg, ds.class_count(), ClassifierMode::Softmax, cfg.seed);

    const double t0 = now_seconds();
    const FitResult main_run = fit(model, ds, cfg);
    const double main_secs = now_seconds() - t0;

    const SequenceDataset control_ds = shuffle_frames(ds, 99);
    const FitResult control = fit(model, control_ds, cfg);

    detail = "val accuracy " + fmt("%.3f", main_run.best_metric) + " at epoch " +
             std::to_string(main_run.best_epoch) + " in " + fmt("%.0f", main_secs) +
             " s; frame-shuffled control " + fmt("%.3f", control.best_metric);
    if (!(control.best_metric < 0.5)) {
        // The control cannot drop below 0.5 by construction: the multiset of
        // frames still reveals the motion axis (horizontal vs vertical), only
        // the sign along it is destroyed, so the control converges to the
        // axis-only solution whose accuracy is exactly 0.5 plus noise.
        const double ablation =
            evaluate_dataset(main_run.best_model, control_ds, cfg.batch_size, nullptr);
        detail += ", not < 0.5: shuffled frames still reveal the motion axis (exact ceiling"
                  " 0.5, sign unrecoverable); the trained model itself scores " +
                  fmt("%.3f", ablation) + " on shuffled input for the same reason";
    }
    return main_run.best_metric >= 0.90 && main_secs <= 900.0 && control.best_metric < 0.5;
}

// ---- criteria 7/8: determinism, serialization, exit codes ------------------

struct CliContext {
    std::string cli;    // empty when TTRNN_CLI_PATH is unset
    fs::path work;      // scratch directory
    fs::path data_dir;  // small on-disk dataset
    fs::path run_a;     // first training run output
};

SequenceDataset tiny_training_set() {
    SyntheticSpec spec;
    spec.n_per_class = 8;
    spec.t_min = 4;
    spec.t_max = 6;
    spec.height = 8;
    spec.width = 8;
    spec.channels = 1;
    spec.square = 3;
    spec.noise_std = 0.05;
    spec.seed = 21;
    return generate_synthetic(spec);
}

bool criterion_determinism(CliContext& ctx, std::string& detail) {
    if (ctx.cli.empty()) {
        detail = "TTRNN_CLI_PATH is not set";
        return false;
    }
    write_dataset(tiny_training_set(), ctx.data_dir.string());

    const std::string flags =
        " --cell tt-gru --input-factors 4,4,4 --hidden-factors 2,2,2 --ranks 1,2,2,1"
        " --batch-size 8 --max-epochs 4 --seed 3 --data " + ctx.data_dir.string();
    const fs::path run_b = ctx.work / "run_b";
    const int code_a =
        run_cli(ctx.cli, "train" + flags + " --out " + ctx.run_a.string());
    const int code_b = run_cli(ctx.cli, "train" + flags + " --out " + run_b.string());

    bool ok = true;
    ok &= expect(code_a == 0 && code_b == 0,
                 "train exited with " + std::to_string(code_a) + "/" + std::to_string(code_b),
                 detail);
    ok &= ok && expect(files_equal(ctx.run_a / "metrics.tsv", run_b / "metrics.tsv"),
                       "metrics.tsv differs between identical runs", detail);
    ok &= ok && expect(files_equal(ctx.run_a / "model.ttrn", run_b / "model.ttrn"),
                       "model.ttrn differs between identical runs", detail);
    if (ok) detail = "metrics.tsv and model.ttrn byte-identical across reruns";
    return ok;
}

bool criterion_serialization(CliContext& ctx, std::string& detail) {
    bool ok = true;

    // Dataset round trip, byte level.
    const SequenceDataset ds = tiny_training_set();
    const fs::path d1 = ctx.work / "rt1";
    const fs::path d2 = ctx.work / "rt2";
    write_dataset(ds, d1.string());
    write_dataset(read_dataset(d1.string()), d2.string());
    for (const auto& entry : fs::directory_iterator(d1))
        ok &= expect(files_equal(entry.path(), d2 / entry.path().filename()),
                     entry.path().filename().string() + " changed across a round trip", detail);

    // Checkpoint round trip, byte level.
    CellConfig cell_cfg;
    cell_cfg.kind = CellKind::LSTM;
    cell_cfg.tt = true;
    cell_cfg.tt_shape.m = {4, 4, 4};
    cell_cfg.tt_shape.n = {2, 2, 2};
    cell_cfg.tt_shape.ranks = {1, 2, 2, 1};
    Model model = make_model(cell_cfg, 4, ClassifierMode::Softmax, 5);
    const AdamState adam = init_adam(model);
    const fs::path c1 = ctx.work / "rt1.ttrn";
    const fs::path c2 = ctx.work / "rt2.ttrn";
    write_checkpoint(c1.string(), model, adam, Rng(8).save_state());
    const Checkpoint back = read_checkpoint(c1.string());
    write_checkpoint(c2.string(), back.model, back.adam, back.rng_state);
    ok &= expect(files_equal(c1, c2), "checkpoint changed across a round trip", detail);

    // Corrupted magic bytes exit with the data/format code.
    if (ctx.cli.empty()) {
        if (ok) detail.clear();
        ok &= expect(false, "TTRNN_CLI_PATH is not set", detail);
        return ok;
    }
    const fs::path ckpt = ctx.run_a / "model.ttrn";
    {
        const fs::path bad_dir = ctx.work / "bad_data";
        fs::create_directories(bad_dir);
        for (const auto& entry : fs::directory_iterator(ctx.data_dir))
            fs::copy_file(entry.path(), bad_dir / entry.path().filename(),
                          fs::copy_options::overwrite_existing);
        auto bytes = slurp(bad_dir / "seq_00000.ttsq");
        bytes[0] = 'X';
        spit(bad_dir / "seq_00000.ttsq", bytes);
        const int code = run_cli(ctx.cli, "eval --checkpoint " + ckpt.string() + " --data " +
                                              bad_dir.string());
        ok &= expect(code == 3, "corrupt dataset magic exited with code " + std::to_string(code),
                     detail);
    }
    {
        const fs::path bad_ckpt = ctx.work / "bad.ttrn";
        auto bytes = slurp(ckpt);
        ok &= expect(!bytes.empty(), "training run left no checkpoint to corrupt", detail);
        if (!bytes.empty()) {
            bytes[0] = 'X';
            spit(bad_ckpt, bytes);
            const int code = run_cli(ctx.cli, "eval --checkpoint " + bad_ckpt.string() +
                                                  " --data " + ctx.data_dir.string());
            ok &= expect(code == 3,
                         "corrupt checkpoint magic exited with code " + std::to_string(code),
                         detail);
        }
    }
    if (ok) detail = "round trips bitwise; corrupted magic exits with code 3";
    return ok;
}

// ---- criterion 9: MAP brute-force oracle -----------------------------------

double brute_force_map(const DenseTensor& scores, const DenseTensor& labels) {
    const index_t s = scores.shape.extent(0);
    const index_t j = scores.shape.extent(1);
    double ap_sum = 0.0;
    index_t counted = 0;
    for (index_t cls = 0; cls < j; ++cls) {
        // Rank of sample i: positions strictly above it, plus earlier ties,
        // plus itself. Every rank is distinct, so sorting the positives by
        // rank reproduces the module's summation order exactly.
        std::vector<std::pair<index_t, index_t>> positives; // (rank, hits at rank)
        for (index_t i = 0; i < s; ++i) {
            if (labels[i * j + cls] != 1.0) continue;
            index_t rank = 1;
            for (index_t t = 0; t < s; ++t) {
                if (scores[t * j + cls] > scores[i * j + cls]) ++rank;
                else if (scores[t * j + cls] == scores[i * j + cls] && t < i) ++rank;
            }
            positives.emplace_back(rank, 0);
        }
        if (positives.empty()) continue;
        for (auto& [rank, hits] : positives) {
            for (const auto& other : positives) hits += other.first <= rank;
        }
        std::sort(positives.begin(), positives.end());
        double ap = 0.0;
        for (const auto& [rank, hits] : positives)
            ap += static_cast<double>(hits) / static_cast<double>(rank);
        ap_sum += ap / static_cast<double>(positives.size());
        ++counted;
    }
    return ap_sum / static_cast<double>(counted);
}

bool criterion_map_oracle(std::string& detail) {
    Rng rng(909);
    for (int trial = 0; trial < 200; ++trial) {
        const index_t s = rng.uniform_int(1, 12);
        const index_t j = rng.uniform_int(1, 5);
        DenseTensor scores(Shape({s, j}));
        DenseTensor labels(Shape({s, j}));
        const bool quantize = trial % 2 == 0; // force score ties half the time
        for (index_t i = 0; i < scores.size(); ++i) {
            scores[i] = quantize ? 0.25 * static_cast<double>(rng.uniform_int(0, 3))
                                 : rng.uniform();
            labels[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
        }
        bool any = false;
        for (double v : labels.data) any = any || v == 1.0;
        if (!any) labels[rng.uniform_int(0, labels.size() - 1)] = 1.0;

        const double got = mean_average_precision(scores, labels);
        const double want = brute_force_map(scores, labels);
        if (got != want) {
            detail = "trial " + std::to_string(trial) + ": module " + fmt("%.17g", got) +
                     " vs brute force " + fmt("%.17g", want);
            return false;
        }
    }
    detail = "exact match on 200 matrices including tied scores";
    return true;
}

} // namespace

int main() {
    kernels::set_threads(1);

    CliContext ctx;
    const char* cli_env = std::getenv("TTRNN_CLI_PATH");
    ctx.cli = cli_env ? cli_env : "";
    ctx.work = fs::temp_directory_path() / "ttrnn_acceptance";
    fs::remove_all(ctx.work);
    fs::create_directories(ctx.work);
    ctx.data_dir = ctx.work / "data";
    ctx.run_a = ctx.work / "run_a";

    struct Criterion {
        int id;
        const char* title;
        std::function<bool(std::string&)> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "parameter-count goldens", criterion_counts},
        {2, "compression rates to two significant figures", criterion_rates},
        {3, "TT forward matches the dense oracle", criterion_forward_oracle},
        {4, "analytic gradients match finite differences", criterion_gradients},
        {5, "fused compression rate beats vanilla exactly", criterion_fused_rate},
        {6, "synthetic motion task trains to 0.90", criterion_synthetic},
        {7, "seeded reruns are bitwise identical", [&](std::string& d) {
             return criterion_determinism(ctx, d);
         }},
        {8, "serialization round trips and corrupt-magic exit code", [&](std::string& d) {
             return criterion_serialization(ctx, d);
         }},
        {9, "MAP matches a brute-force enumeration", criterion_map_oracle},
    };

    int failures = 0;
    for (const Criterion& crit : criteria) {
        std::string detail;
        const double t0 = now_seconds();
        bool ok = false;
        try {
            ok = crit.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = now_seconds() - t0;
        std::printf("criterion %d: %s  %s (%.1f s)%s%s\n", crit.id, ok ? "PASS" : "FAIL",
                    crit.title, secs, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }

    std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
    fs::remove_all(ctx.work);
    return failures == 0 ? 0 : 1;
}
