#include "ttrnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ttrnn/checkpoint.hpp"
#include "ttrnn/kernels.hpp"

namespace ttrnn {

Classifier make_classifier(index_t hidden, index_t classes, ClassifierMode mode, Rng& rng) {
    if (hidden < 1) throw ArgumentError("classifier hidden size must be positive");
    const index_t min_classes = mode == ClassifierMode::Softmax ? 2 : 1;
    if (classes < min_classes)
        throw ArgumentError("classifier needs at least " + std::to_string(min_classes) + " classes");
    Classifier clf;
    clf.mode = mode;
    clf.weight = DenseTensor(Shape({hidden, classes}));
    clf.bias = DenseTensor(Shape({classes}));
    const double sigma = std::sqrt(2.0 / static_cast<double>(hidden + classes));
    for (double& v : clf.weight.data) v = sigma * rng.normal();
    return clf;
}

DenseTensor classify_batch(const Classifier& clf, const DenseTensor& h) {
    const index_t n = clf.hidden_size();
    const index_t j = clf.class_count();
    if (h.shape.rank() != 2 || h.shape.extent(1) != n)
        throw ShapeError("classifier input must be (batch, " + std::to_string(n) + ")");
    for (double v : h.data)
        if (!std::isfinite(v)) throw NumericsError("non-finite hidden state fed to the classifier");
    const index_t b = h.shape.extent(0);

    DenseTensor logits(Shape({b, j}));
    kernels::matmul_ab(h.data.data(), clf.weight.data.data(), logits.data.data(), b, n, j);
    for (index_t r = 0; r < b; ++r)
        for (index_t k = 0; k < j; ++k) logits[r * j + k] += clf.bias[k];

    if (clf.mode == ClassifierMode::Softmax) {
        for (index_t r = 0; r < b; ++r) {
            double* row = logits.data.data() + static_cast<std::size_t>(r * j);
            double hi = row[0];
            for (index_t k = 1; k < j; ++k) hi = std::max(hi, row[k]);
            double sum = 0.0;
            for (index_t k = 0; k < j; ++k) {
                row[k] = std::exp(row[k] - hi);
                sum += row[k];
            }
            for (index_t k = 0; k < j; ++k) row[k] /= sum;
        }
    } else {
        for (double& v : logits.data) v = 1.0 / (1.0 + std::exp(-v));
    }
    return logits;
}

DenseTensor classify(const Classifier& clf, const DenseTensor& h) {
    const index_t n = clf.hidden_size();
    if (h.shape.rank() != 1 || h.shape.extent(0) != n)
        throw ShapeError("classify expects a hidden vector of length " + std::to_string(n));
    DenseTensor row = classify_batch(clf, DenseTensor(Shape({1, n}), h.data));
    return DenseTensor(Shape({clf.class_count()}), std::move(row.data));
}

namespace {

constexpr double kProbFloor = 1e-12;

double ridge_term(const Classifier& clf, double lambda) {
    double sq = 0.0;
    for (double v : clf.weight.data) sq += v * v;
    return lambda * sq;
}

} // namespace

double loss(const DenseTensor& probs, index_t label, const Classifier& clf, double lambda) {
    if (clf.mode != ClassifierMode::Softmax)
        throw ArgumentError("single-label loss needs a softmax classifier");
    const index_t j = clf.class_count();
    if (probs.shape.rank() != 1 || probs.shape.extent(0) != j)
        throw ShapeError("probability vector must have length " + std::to_string(j));
    if (label < 0 || label >= j) throw IndexError("label " + std::to_string(label) + " out of range");
    return -std::log(std::max(probs[label], kProbFloor)) + ridge_term(clf, lambda);
}

double loss(const DenseTensor& probs, const std::vector<char>& targets, const Classifier& clf,
            double lambda) {
    if (clf.mode != ClassifierMode::PerClassLogistic)
        throw ArgumentError("multi-hot loss needs a per-class logistic classifier");
    const index_t j = clf.class_count();
    if (probs.shape.rank() != 1 || probs.shape.extent(0) != j)
        throw ShapeError("probability vector must have length " + std::to_string(j));
    if (static_cast<index_t>(targets.size()) != j)
        throw ShapeError("target vector must have length " + std::to_string(j));
    double total = 0.0;
    for (index_t k = 0; k < j; ++k) {
        const double p = probs[k];
        if (targets[static_cast<std::size_t>(k)])
            total -= std::log(std::max(p, kProbFloor));
        else
            total -= std::log(std::max(1.0 - p, kProbFloor));
    }
    return total + ridge_term(clf, lambda);
}

Model make_model(const CellConfig& cell_cfg, index_t classes, ClassifierMode mode,
                 std::uint64_t seed) {
    Rng rng(seed);
    Model m;
    m.cell = make_cell(cell_cfg, rng);
    m.clf = make_classifier(m.cell.hidden_size, classes, mode, rng);
    return m;
}

index_t model_param_count(const Model& m) {
    return cell_param_count(m.cell) + m.clf.weight.size() + m.clf.bias.size();
}

ModelGradients zero_model_gradients(const Model& m) {
    ModelGradients g;
    g.cell = zero_cell_gradients(m.cell);
    g.clf_weight = DenseTensor(m.clf.weight.shape);
    g.clf_bias = DenseTensor(m.clf.bias.shape);
    return g;
}

std::vector<ParamRef> param_blocks(Model& m) {
    std::vector<ParamRef> blocks;
    if (auto* dm = std::get_if<DenseMap>(&m.cell.input_map)) {
        blocks.push_back({"cell.input_weight", &dm->weight});
    } else {
        auto& cores = std::get<TTMap>(m.cell.input_map).layer.cores.cores;
        for (std::size_t k = 0; k < cores.size(); ++k)
            blocks.push_back({"cell.core[" + std::to_string(k) + "]", &cores[k]});
    }
    for (std::size_t g = 0; g < m.cell.u.size(); ++g)
        blocks.push_back({"cell.u[" + std::to_string(g) + "]", &m.cell.u[g]});
    for (std::size_t g = 0; g < m.cell.biases.size(); ++g)
        blocks.push_back({"cell.bias[" + std::to_string(g) + "]", &m.cell.biases[g]});
    blocks.push_back({"classifier.weight", &m.clf.weight});
    blocks.push_back({"classifier.bias", &m.clf.bias});
    return blocks;
}

std::vector<const DenseTensor*> gradient_blocks(const ModelGradients& g, const Model& m) {
    std::vector<const DenseTensor*> blocks;
    if (std::holds_alternative<DenseMap>(m.cell.input_map)) {
        blocks.push_back(&g.cell.dense_weight);
    } else {
        for (const DenseTensor& core : g.cell.cores) blocks.push_back(&core);
    }
    for (const DenseTensor& u : g.cell.u) blocks.push_back(&u);
    for (const DenseTensor& b : g.cell.biases) blocks.push_back(&b);
    blocks.push_back(&g.clf_weight);
    blocks.push_back(&g.clf_bias);
    return blocks;
}

void validate_config(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
    if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
        throw ArgumentError("Adam betas must lie in [0, 1)");
    if (!(cfg.epsilon > 0.0)) throw ArgumentError("Adam epsilon must be positive");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw ArgumentError("dropout rate must lie in [0, 1)");
    if (cfg.ridge_lambda < 0.0) throw ArgumentError("ridge strength must be non-negative");
    if (cfg.batch_size < 1) throw ArgumentError("batch size must be positive");
    if (cfg.max_epochs < 1) throw ArgumentError("epoch count must be positive");
}

AdamState init_adam(Model& model) {
    AdamState st;
    for (const ParamRef& ref : param_blocks(model)) {
        st.m.emplace_back(static_cast<std::size_t>(ref.tensor->size()), 0.0);
        st.v.emplace_back(static_cast<std::size_t>(ref.tensor->size()), 0.0);
    }
    return st;
}

void adam_update(TrainState& state, const ModelGradients& grads, const TrainConfig& cfg) {
    const std::vector<ParamRef> params = param_blocks(state.model);
    const std::vector<const DenseTensor*> gblocks = gradient_blocks(grads, state.model);
    if (params.size() != gblocks.size() || params.size() != state.adam.m.size())
        throw ShapeError("optimizer state does not match the parameter blocks");

    state.adam.step += 1;
    const double t = static_cast<double>(state.adam.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);

    for (std::size_t k = 0; k < params.size(); ++k) {
        DenseTensor& p = *params[k].tensor;
        const DenseTensor& g = *gblocks[k];
        if (!(g.shape == p.shape))
            throw ShapeError("gradient shape mismatch in " + params[k].name);
        std::vector<double>& m = state.adam.m[k];
        std::vector<double>& v = state.adam.v[k];
        for (index_t i = 0; i < p.size(); ++i) {
            const double gi = g[i];
            if (!std::isfinite(gi))
                throw NumericsError("non-finite gradient in " + params[k].name);
            const auto iu = static_cast<std::size_t>(i);
            m[iu] = cfg.beta1 * m[iu] + (1.0 - cfg.beta1) * gi;
            v[iu] = cfg.beta2 * v[iu] + (1.0 - cfg.beta2) * gi * gi;
            const double mhat = m[iu] / bc1;
            const double vhat = v[iu] / bc2;
            p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    }
}

index_t argmax_index(const DenseTensor& probs) {
    if (probs.shape.rank() != 1 || probs.size() < 1)
        throw ArgumentError("argmax needs a non-empty vector");
    index_t best = 0;
    for (index_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[best]) best = i;
    return best;
}

double accuracy(const std::vector<index_t>& predicted, const std::vector<index_t>& truth) {
    if (predicted.empty() || predicted.size() != truth.size())
        throw ArgumentError("accuracy needs equal-length non-empty label lists");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double mean_average_precision(const DenseTensor& scores, const DenseTensor& labels) {
    if (scores.shape.rank() != 2 || !(scores.shape == labels.shape))
        throw ShapeError("scores and labels must be matching (samples, classes) matrices");
    const index_t s = scores.shape.extent(0);
    const index_t j = scores.shape.extent(1);
    if (s < 1) throw ArgumentError("need at least one sample");
    for (double v : labels.data)
        if (v != 0.0 && v != 1.0) throw ArgumentError("labels must be 0 or 1");

    std::vector<index_t> order(static_cast<std::size_t>(s));
    double ap_sum = 0.0;
    index_t counted = 0;
    for (index_t cls = 0; cls < j; ++cls) {
        index_t npos = 0;
        for (index_t r = 0; r < s; ++r)
            if (labels[r * j + cls] == 1.0) ++npos;
        if (npos == 0) continue;

        std::iota(order.begin(), order.end(), index_t{0});
        std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            return scores[a * j + cls] > scores[b * j + cls];
        });
        index_t hits = 0;
        double ap = 0.0;
        for (index_t rank = 1; rank <= s; ++rank) {
            if (labels[order[static_cast<std::size_t>(rank - 1)] * j + cls] == 1.0) {
                ++hits;
                ap += static_cast<double>(hits) / static_cast<double>(rank);
            }
        }
        ap_sum += ap / static_cast<double>(npos);
        ++counted;
    }
    if (counted == 0) throw UndefinedMetricError("no class has a positive label");
    return ap_sum / static_cast<double>(counted);
}

BatchResult compute_batch(const Model& model, const Batch& batch, double ridge_lambda,
                          double dropout_rate, Rng* rng) {
    const index_t b = batch.x.shape.extent(0);
    const index_t j = model.clf.class_count();

    std::vector<StepCache> caches;
    DenseTensor h = run_batch(model.cell, batch.x, batch.lengths, Dropout{dropout_rate}, rng,
                              &caches);
    DenseTensor probs = classify_batch(model.clf, h);

    double total = 0.0;
    DenseTensor glogits(Shape({b, j}));
    if (model.clf.mode == ClassifierMode::Softmax) {
        if (batch.multi) throw ArgumentError("softmax head needs single-label batches");
        if (static_cast<index_t>(batch.labels_single.size()) != b)
            throw ShapeError("label count does not match the batch size");
        for (index_t r = 0; r < b; ++r) {
            const index_t y = batch.labels_single[static_cast<std::size_t>(r)];
            if (y < 0 || y >= j) throw IndexError("label out of range in batch");
            total -= std::log(std::max(probs[r * j + y], kProbFloor));
            for (index_t k = 0; k < j; ++k)
                glogits[r * j + k] =
                    (probs[r * j + k] - (k == y ? 1.0 : 0.0)) / static_cast<double>(b);
        }
    } else {
        if (!(batch.labels_multi.shape == Shape({b, j})))
            throw ShapeError("multi-hot labels must be (batch, classes)");
        for (index_t r = 0; r < b; ++r) {
            for (index_t k = 0; k < j; ++k) {
                const double y = batch.labels_multi[r * j + k];
                const double p = probs[r * j + k];
                total -= y * std::log(std::max(p, kProbFloor)) +
                         (1.0 - y) * std::log(std::max(1.0 - p, kProbFloor));
                glogits[r * j + k] = (p - y) / static_cast<double>(b);
            }
        }
    }
    total /= static_cast<double>(b);
    total += ridge_term(model.clf, ridge_lambda);

    BatchResult out;
    out.loss = total;
    out.grads = zero_model_gradients(model);

    const index_t n = model.clf.hidden_size();
    kernels::matmul_atb(h.data.data(), glogits.data.data(), out.grads.clf_weight.data.data(), n, b,
                        j, true);
    for (index_t i = 0; i < out.grads.clf_weight.size(); ++i)
        out.grads.clf_weight[i] += 2.0 * ridge_lambda * model.clf.weight[i];
    for (index_t r = 0; r < b; ++r)
        for (index_t k = 0; k < j; ++k) out.grads.clf_bias[k] += glogits[r * j + k];

    DenseTensor gh(Shape({b, n}));
    kernels::matmul_abt(glogits.data.data(), model.clf.weight.data.data(), gh.data.data(), b, j, n,
                        false);
    backprop_batch(model.cell, caches, gh, out.grads.cell);
    return out;
}

namespace {

struct PackedRecord {
    DenseTensor frames; // (T, M)
    index_t label = -1;
    std::vector<char> multi_hot;
};

PackedRecord pack_record(const SequenceRecord& rec, LabelMode mode, index_t classes) {
    PackedRecord p;
    const index_t t_len = rec.frames.shape.extent(0);
    const index_t fsize = rec.frames.size() / t_len;
    p.frames = reshape(rec.frames, Shape({t_len, fsize}));
    if (mode == LabelMode::Single) {
        p.label = rec.label;
    } else {
        p.multi_hot.assign(static_cast<std::size_t>(classes), 0);
        for (index_t cls : rec.labels) p.multi_hot[static_cast<std::size_t>(cls)] = 1;
    }
    return p;
}

Batch assemble_batch(const std::vector<PackedRecord>& packed, const std::vector<index_t>& idx,
                     LabelMode mode, index_t classes) {
    const index_t b = static_cast<index_t>(idx.size());
    index_t tmax = 1;
    const index_t m = packed.front().frames.shape.extent(1);
    for (index_t i : idx)
        tmax = std::max(tmax, packed[static_cast<std::size_t>(i)].frames.shape.extent(0));

    Batch batch;
    batch.x = DenseTensor(Shape({b, tmax, m}));
    batch.lengths.resize(static_cast<std::size_t>(b));
    batch.multi = mode == LabelMode::Multi;
    if (batch.multi)
        batch.labels_multi = DenseTensor(Shape({b, classes}));
    else
        batch.labels_single.resize(static_cast<std::size_t>(b));

    for (index_t r = 0; r < b; ++r) {
        const PackedRecord& rec = packed[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
        const index_t t_len = rec.frames.shape.extent(0);
        batch.lengths[static_cast<std::size_t>(r)] = t_len;
        std::copy_n(rec.frames.data.data(), t_len * m,
                    batch.x.data.data() + static_cast<std::size_t>(r * tmax * m));
        if (batch.multi) {
            for (index_t k = 0; k < classes; ++k)
                batch.labels_multi[r * classes + k] = rec.multi_hot[static_cast<std::size_t>(k)]
                                                          ? 1.0
                                                          : 0.0;
        } else {
            batch.labels_single[static_cast<std::size_t>(r)] = rec.label;
        }
    }
    return batch;
}

double evaluate_indices(const Model& model, const std::vector<PackedRecord>& packed,
                        const std::vector<index_t>& idx, LabelMode mode, index_t classes,
                        index_t batch_size) {
    std::vector<index_t> pred, truth;
    DenseTensor scores(Shape({static_cast<index_t>(idx.size()), classes}));
    DenseTensor labels(Shape({static_cast<index_t>(idx.size()), classes}));
    index_t row = 0;
    for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t stop = std::min(idx.size(), start + static_cast<std::size_t>(batch_size));
        const std::vector<index_t> chunk(idx.begin() + static_cast<std::ptrdiff_t>(start),
                                         idx.begin() + static_cast<std::ptrdiff_t>(stop));
        Batch batch = assemble_batch(packed, chunk, mode, classes);
        DenseTensor h = run_batch(model.cell, batch.x, batch.lengths, Dropout{0.0}, nullptr,
                                  nullptr);
        DenseTensor probs = classify_batch(model.clf, h);
        for (index_t r = 0; r < static_cast<index_t>(chunk.size()); ++r, ++row) {
            for (index_t k = 0; k < classes; ++k) {
                scores[row * classes + k] = probs[r * classes + k];
                if (mode == LabelMode::Multi)
                    labels[row * classes + k] = batch.labels_multi[r * classes + k];
            }
            if (mode == LabelMode::Single) {
                DenseTensor prow(Shape({classes}));
                std::copy_n(probs.data.data() + static_cast<std::size_t>(r * classes), classes,
                            prow.data.data());
                pred.push_back(argmax_index(prow));
                truth.push_back(batch.labels_single[static_cast<std::size_t>(r)]);
            }
        }
    }
    return mode == LabelMode::Single ? accuracy(pred, truth)
                                     : mean_average_precision(scores, labels);
}

void shuffle_indices(std::vector<index_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(idx[i - 1], idx[pick]);
    }
}

std::string format_log_line(index_t epoch, double train_loss, const std::string& metric_name,
                            double metric_value) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%lld\t%.9g\t%s\t%.9g", static_cast<long long>(epoch),
                  train_loss, metric_name.c_str(), metric_value);
    return buf;
}

double clf_weight_norm(const Model& m) {
    double sq = 0.0;
    for (double v : m.clf.weight.data) sq += v * v;
    return std::sqrt(sq);
}

} // namespace

FitResult fit(Model model, const SequenceDataset& ds, const TrainConfig& cfg,
              const FitOptions& opts) {
    validate_config(cfg);
    if (ds.records.empty()) throw ArgumentError("dataset is empty");
    if (ds.frame_size() != model.cell.input_size)
        throw ShapeError("dataset frame size " + std::to_string(ds.frame_size()) +
                         " does not match the cell input size " +
                         std::to_string(model.cell.input_size));
    if (ds.class_count() != model.clf.class_count())
        throw ShapeError("dataset has " + std::to_string(ds.class_count()) +
                         " classes, the classifier " + std::to_string(model.clf.class_count()));
    if (ds.mode == LabelMode::Multi && model.clf.mode == ClassifierMode::Softmax)
        throw ArgumentError("multi-label data needs a per-class logistic classifier");

    const index_t classes = ds.class_count();
    std::vector<PackedRecord> packed;
    packed.reserve(ds.records.size());
    for (const SequenceRecord& rec : ds.records)
        packed.push_back(pack_record(rec, ds.mode, classes));

    const index_t n_total = static_cast<index_t>(packed.size());
    const index_t n_val = n_total / 5;
    if (n_val < 1)
        throw ArgumentError("dataset too small for an 80/20 validation split");

    TrainState state{std::move(model), AdamState{}, Rng(cfg.seed)};
    state.adam = init_adam(state.model);

    std::vector<index_t> all_idx(static_cast<std::size_t>(n_total));
    std::iota(all_idx.begin(), all_idx.end(), index_t{0});
    shuffle_indices(all_idx, state.rng);
    std::vector<index_t> train_idx(all_idx.begin(), all_idx.end() - n_val);
    std::vector<index_t> val_idx(all_idx.end() - n_val, all_idx.end());

    FitResult result;
    result.val_metric_name = ds.mode == LabelMode::Single ? "val_accuracy" : "val_map";

    const auto evaluate = [&](const std::vector<index_t>& idx) {
        return evaluate_indices(state.model, packed, idx, ds.mode, classes, cfg.batch_size);
    };

    for (index_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_indices(train_idx, state.rng);
        double train_loss = 0.0;
        double metric = 0.0;
        try {
            double loss_sum = 0.0;
            index_t loss_count = 0;
            for (std::size_t start = 0; start < train_idx.size();
                 start += static_cast<std::size_t>(cfg.batch_size)) {
                const std::size_t stop =
                    std::min(train_idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
                const std::vector<index_t> chunk(
                    train_idx.begin() + static_cast<std::ptrdiff_t>(start),
                    train_idx.begin() + static_cast<std::ptrdiff_t>(stop));
                Batch batch = assemble_batch(packed, chunk, ds.mode, classes);
                BatchResult br = compute_batch(state.model, batch, cfg.ridge_lambda,
                                               cfg.dropout_rate, &state.rng);
                if (!std::isfinite(br.loss))
                    throw DivergedError("training loss became non-finite at epoch " +
                                        std::to_string(epoch));
                adam_update(state, br.grads, cfg);
                loss_sum += br.loss * static_cast<double>(chunk.size());
                loss_count += static_cast<index_t>(chunk.size());
            }
            train_loss = loss_sum / static_cast<double>(loss_count);
            metric = evaluate(val_idx);
        } catch (const NumericsError& e) {
            throw DivergedError(std::string("training diverged: ") + e.what());
        }

        result.clf_weight_norms.push_back(clf_weight_norm(state.model));
        const std::string line = format_log_line(epoch, train_loss, result.val_metric_name, metric);
        result.log.push_back(line);
        if (opts.live_log) (*opts.live_log) << line << '\n' << std::flush;

        if (metric > result.best_metric) {
            result.best_metric = metric;
            result.best_epoch = epoch;
            result.best_model = state.model;
            if (!opts.checkpoint_path.empty())
                write_checkpoint(opts.checkpoint_path, state.model, state.adam,
                                 state.rng.save_state());
        }
    }

    result.state = std::move(state);
    return result;
}

double evaluate_dataset(const Model& model, const SequenceDataset& ds, index_t batch_size,
                        std::string* metric_name) {
    if (batch_size < 1) throw ArgumentError("batch_size must be positive");
    if (ds.records.empty()) throw ArgumentError("dataset is empty");
    if (ds.frame_size() != model.cell.input_size)
        throw ShapeError("dataset frame size " + std::to_string(ds.frame_size()) +
                         " does not match the cell input size " +
                         std::to_string(model.cell.input_size));
    if (ds.class_count() != model.clf.class_count())
        throw ShapeError("dataset has " + std::to_string(ds.class_count()) +
                         " classes, the classifier " + std::to_string(model.clf.class_count()));
    if (ds.mode == LabelMode::Multi && model.clf.mode == ClassifierMode::Softmax)
        throw ArgumentError("multi-label data needs a per-class logistic classifier");

    const index_t classes = ds.class_count();
    std::vector<PackedRecord> packed;
    packed.reserve(ds.records.size());
    for (const SequenceRecord& rec : ds.records)
        packed.push_back(pack_record(rec, ds.mode, classes));

    std::vector<index_t> idx(packed.size());
    std::iota(idx.begin(), idx.end(), index_t{0});
    if (metric_name) *metric_name = ds.mode == LabelMode::Single ? "accuracy" : "map";
    return evaluate_indices(model, packed, idx, ds.mode, classes, batch_size);
}

} // namespace ttrnn
