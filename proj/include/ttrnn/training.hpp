#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ttrnn/dataset.hpp"
#include "ttrnn/rnn_cell.hpp"

namespace ttrnn {

enum class ClassifierMode { Softmax, PerClassLogistic };

/// Linear head over the final hidden state: logits = h * weight + bias,
/// squashed per mode into a distribution (softmax) or independent
/// per-class probabilities (logistic).
struct Classifier {
    ClassifierMode mode = ClassifierMode::Softmax;
    DenseTensor weight; // (N, J)
    DenseTensor bias;   // (J)

    index_t hidden_size() const { return weight.shape.extent(0); }
    index_t class_count() const { return weight.shape.extent(1); }
};

Classifier make_classifier(index_t hidden, index_t classes, ClassifierMode mode, Rng& rng);

/// Probabilities for one hidden vector (length N) or a batch (B, N).
/// Throws NumericsError on non-finite input.
DenseTensor classify(const Classifier& clf, const DenseTensor& h);
DenseTensor classify_batch(const Classifier& clf, const DenseTensor& h);

/// Cross-entropy against a single class id (softmax mode) or summed binary
/// cross-entropy against a 0/1 target vector (logistic mode), plus the
/// ridge term lambda * ||clf.weight||_F^2. Probabilities are clamped at
/// 1e-12 before the log.
double loss(const DenseTensor& probs, index_t label, const Classifier& clf, double lambda);
double loss(const DenseTensor& probs, const std::vector<char>& targets, const Classifier& clf,
            double lambda);

struct Model {
    RNNCell cell;
    Classifier clf;
};

Model make_model(const CellConfig& cell_cfg, index_t classes, ClassifierMode mode,
                 std::uint64_t seed);

index_t model_param_count(const Model& m);

struct ModelGradients {
    CellGradients cell;
    DenseTensor clf_weight;
    DenseTensor clf_bias;
};

ModelGradients zero_model_gradients(const Model& m);

/// All trainable tensors in the fixed order that the optimizer state and
/// the checkpoint rely on: input map, U matrices, cell biases, classifier
/// weight, classifier bias.
struct ParamRef {
    std::string name;
    DenseTensor* tensor;
};
std::vector<ParamRef> param_blocks(Model& m);
std::vector<const DenseTensor*> gradient_blocks(const ModelGradients& g, const Model& m);

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double dropout_rate = 0.25;
    double ridge_lambda = 0.01;
    index_t batch_size = 16;
    index_t max_epochs = 30;
    std::uint64_t seed = 0;
};

void validate_config(const TrainConfig& cfg);

/// First/second moment buffers aligned with param_blocks order.
struct AdamState {
    index_t step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

AdamState init_adam(Model& model);

struct TrainState {
    Model model;
    AdamState adam;
    Rng rng;
};

/// Standard bias-corrected Adam over every parameter block. Throws
/// NumericsError naming the parameter path on a non-finite gradient.
void adam_update(TrainState& state, const ModelGradients& grads, const TrainConfig& cfg);

/// Smallest-index argmax, the tie-break rule used for accuracy.
index_t argmax_index(const DenseTensor& probs);

double accuracy(const std::vector<index_t>& predicted, const std::vector<index_t>& truth);

/// Mean over classes (with at least one positive) of average precision,
/// where AP averages precision at each positive hit down the ranking.
/// Ties rank the smaller sample index first. Throws UndefinedMetricError
/// when no class has a positive label.
double mean_average_precision(const DenseTensor& scores, const DenseTensor& labels);

/// A padded batch ready for the cell: x is (B, T_max, M) with per-sequence
/// lengths; labels per the dataset mode.
struct Batch {
    DenseTensor x;
    std::vector<index_t> lengths;
    std::vector<index_t> labels_single;
    DenseTensor labels_multi; // (B, J) 0/1
    bool multi = false;
};

struct BatchResult {
    double loss = 0.0;
    ModelGradients grads;
};

/// Forward + loss + full backward over one batch. The returned loss is the
/// per-sample mean plus the ridge term; gradients match it.
BatchResult compute_batch(const Model& model, const Batch& batch, double ridge_lambda,
                          double dropout_rate, Rng* rng);

struct FitOptions {
    std::string checkpoint_path;      // when set, rewritten at each new best
    std::ostream* live_log = nullptr; // when set, receives log lines as they form
};

struct FitResult {
    TrainState state; // state after the last epoch
    Model best_model;
    double best_metric = -1.0;
    index_t best_epoch = -1;
    std::string val_metric_name;
    std::vector<std::string> log; // "epoch\ttrain_loss\tmetric_name\tmetric_value"
    std::vector<double> clf_weight_norms; // Frobenius norm after each epoch
};

/// Deterministic mini-batch training: an 80/20 train/validation split by
/// seeded shuffle, per-epoch shuffling, Adam updates, dropout at train time
/// only, and best-validation-metric checkpointing. Throws DivergedError
/// when the loss stops being finite; a checkpoint written earlier is left
/// in place.
FitResult fit(Model model, const SequenceDataset& ds, const TrainConfig& cfg,
              const FitOptions& opts = {});

/// Dropout-free forward evaluation of every record: accuracy for
/// single-label data, MAP for multi-label. metric_name, when given,
/// receives which metric was computed.
double evaluate_dataset(const Model& model, const SequenceDataset& ds, index_t batch_size,
                        std::string* metric_name = nullptr);

} // namespace ttrnn
