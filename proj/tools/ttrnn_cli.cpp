#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttrnn/checkpoint.hpp"
#include "ttrnn/dataset.hpp"
#include "ttrnn/errors.hpp"
#include "ttrnn/run_config.hpp"
#include "ttrnn/training.hpp"

namespace fs = std::filesystem;
using namespace ttrnn;

namespace {

struct CellChoice {
    CellKind kind = CellKind::SRNN;
    bool tt = false;
    index_t gates = 1;
};

CellChoice parse_cell(const std::string& name) {
    if (name == "srnn") return {CellKind::SRNN, false, 1};
    if (name == "gru") return {CellKind::GRU, false, 3};
    if (name == "lstm") return {CellKind::LSTM, false, 4};
    if (name == "ttl" || name == "tt-srnn") return {CellKind::SRNN, true, 1};
    if (name == "tt-gru") return {CellKind::GRU, true, 3};
    if (name == "tt-lstm") return {CellKind::LSTM, true, 4};
    throw ConfigError("unknown cell '" + name +
                      "' (expected srnn, gru, lstm, ttl, tt-srnn, tt-gru, tt-lstm)");
}

index_t product(const std::vector<index_t>& v) {
    index_t p = 1;
    for (index_t x : v) p *= x;
    return p;
}

// ---------------------------------------------------------------- plan ----

struct PlanArgs {
    std::string input_factors;
    std::string hidden_factors;
    std::string ranks;
    std::string cell = "ttl";
};

void run_plan(const PlanArgs& args) {
    const CellChoice cell = parse_cell(args.cell);
    TTShape shape;
    shape.m = parse_factors(args.input_factors);
    shape.n = parse_factors(args.hidden_factors);
    shape.ranks = parse_factors(args.ranks);
    validate_shape(shape);

    const index_t c = cell.gates;
    const index_t m_total = shape.input_size();
    const index_t n_total = shape.output_size();
    const index_t dense_gate = dense_param_count(m_total, n_total, 1);
    const index_t dense_total = dense_param_count(m_total, n_total, c);
    const index_t vanilla_gate = tt_param_count(shape, 1);
    const index_t vanilla_total = c * vanilla_gate;
    const index_t fused_total = tt_param_count(shape, c);
    const Rational rate = compression_rate(shape, 1);
    const Rational rate_fused = compression_rate(shape, c);

    std::printf("cell\t%s\n", args.cell.c_str());
    std::printf("gates\t%lld\n", static_cast<long long>(c));
    std::printf("M\t%lld\n", static_cast<long long>(m_total));
    std::printf("N\t%lld\n", static_cast<long long>(n_total));
    std::printf("dense_per_gate\t%lld\n", static_cast<long long>(dense_gate));
    std::printf("dense_total\t%lld\n", static_cast<long long>(dense_total));
    std::printf("tt_vanilla\t%lld\n", static_cast<long long>(vanilla_total));
    std::printf("tt_fused\t%lld\n", static_cast<long long>(fused_total));
    std::printf("rate\t%lld/%lld\t%.4e\n", static_cast<long long>(vanilla_gate),
                static_cast<long long>(dense_gate), rate.value());
    std::printf("rate_fused\t%lld/%lld\t%.4e\n", static_cast<long long>(fused_total),
                static_cast<long long>(dense_total), rate_fused.value());
}

// ------------------------------------------------------------ gen-data ----

struct GenDataArgs {
    std::string out;
    index_t classes = 4;
    index_t per_class = 100;
    std::string frame_size = "16x16x3";
    index_t t_min = 12;
    index_t t_max = 20;
    index_t square = 4;
    double noise = 0.05;
    std::uint64_t seed = 0;
    bool force = false;
};

std::vector<index_t> parse_frame_size(const std::string& text) {
    std::vector<index_t> dims;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t x = text.find('x', start);
        const std::string part =
            x == std::string::npos ? text.substr(start) : text.substr(start, x - start);
        dims.push_back(parse_int(part));
        if (x == std::string::npos) break;
        start = x + 1;
    }
    if (dims.size() != 3)
        throw ConfigError("frame size must be HxWxC, e.g. 16x16x3; got '" + text + "'");
    return dims;
}

void run_gen_data(const GenDataArgs& args) {
    if (args.classes != 4)
        throw ConfigError("the synthetic motion task has exactly 4 classes (left/right/up/down)");
    const std::vector<index_t> dims = parse_frame_size(args.frame_size);

    const fs::path out(args.out);
    if (fs::exists(out) && !fs::is_directory(out))
        throw ConfigError("output path " + args.out + " exists and is not a directory");
    if (fs::exists(out) && !fs::is_empty(out) && !args.force)
        throw ConfigError("output directory " + args.out +
                          " is not empty; pass --force to overwrite");

    SyntheticSpec spec;
    spec.n_per_class = args.per_class;
    spec.t_min = args.t_min;
    spec.t_max = args.t_max;
    spec.height = dims[0];
    spec.width = dims[1];
    spec.channels = dims[2];
    spec.square = args.square;
    spec.noise_std = args.noise;
    spec.seed = args.seed;

    const SequenceDataset ds = generate_synthetic(spec);
    fs::create_directories(out);
    write_dataset(ds, args.out);

    std::uintmax_t bytes = 0;
    for (const auto& entry : fs::directory_iterator(out))
        if (entry.is_regular_file()) bytes += entry.file_size();

    std::printf("records\t%zu\n", ds.records.size());
    std::printf("bytes\t%ju\n", static_cast<std::uintmax_t>(bytes));
}

// --------------------------------------------------------------- train ----

struct TrainArgs {
    std::string config;
    std::string data;
    std::string out;
    std::string cell;
    std::string input_factors;
    std::string hidden_factors;
    std::string ranks;
    std::string lr;
    std::string dropout;
    std::string ridge;
    std::string batch_size;
    std::string max_epochs;
    std::string seed;
};

const std::set<std::string> kTrainKeys = {
    "data",       "out",           "cell",    "input_factors", "hidden_factors",
    "ranks",      "learning_rate", "beta1",   "beta2",         "epsilon",
    "dropout",    "ridge",         "batch_size", "max_epochs", "seed"};

void run_train(const TrainArgs& args) {
    RunConfig cfg;
    if (!args.config.empty()) cfg = RunConfig::from_file(args.config);
    const auto override_key = [&cfg](const std::string& key, const std::string& value) {
        if (!value.empty()) cfg.set(key, value);
    };
    override_key("data", args.data);
    override_key("out", args.out);
    override_key("cell", args.cell);
    override_key("input_factors", args.input_factors);
    override_key("hidden_factors", args.hidden_factors);
    override_key("ranks", args.ranks);
    override_key("learning_rate", args.lr);
    override_key("dropout", args.dropout);
    override_key("ridge", args.ridge);
    override_key("batch_size", args.batch_size);
    override_key("max_epochs", args.max_epochs);
    override_key("seed", args.seed);
    cfg.require_known(kTrainKeys);

    const std::string data_dir = cfg.get("data", "");
    if (data_dir.empty()) throw ConfigError("missing required config key 'data'");
    const std::string out_dir = cfg.get("out", "");
    if (out_dir.empty()) throw ConfigError("missing required config key 'out'");

    const SequenceDataset ds = read_dataset(data_dir);

    const CellChoice cell = parse_cell(cfg.get("cell", "tt-gru"));
    const std::vector<index_t> hidden_factors = cfg.get_factors("hidden_factors");
    if (hidden_factors.empty()) throw ConfigError("missing required config key 'hidden_factors'");
    const index_t hidden_size = product(hidden_factors);
    const std::vector<index_t> input_factors = cfg.get_factors("input_factors");

    CellConfig cell_cfg;
    cell_cfg.kind = cell.kind;
    cell_cfg.tt = cell.tt;
    cell_cfg.input_size = ds.frame_size();
    cell_cfg.hidden_size = hidden_size;
    if (cell.tt) {
        if (input_factors.empty())
            throw ConfigError("TT cells need the config key 'input_factors'");
        if (!cfg.has("ranks")) throw ConfigError("TT cells need the config key 'ranks'");
        if (product(input_factors) != ds.frame_size())
            throw ConfigError("input factor product " + std::to_string(product(input_factors)) +
                              " does not match the dataset frame size " +
                              std::to_string(ds.frame_size()));
        cell_cfg.tt_shape.m = input_factors;
        cell_cfg.tt_shape.n = hidden_factors;
        cell_cfg.tt_shape.ranks = cfg.get_factors("ranks");
        try {
            validate_shape(cell_cfg.tt_shape);
        } catch (const ShapeError& e) {
            throw ConfigError(std::string("invalid TT shape: ") + e.what());
        }
    } else if (!input_factors.empty() && product(input_factors) != ds.frame_size()) {
        throw ConfigError("input factor product " + std::to_string(product(input_factors)) +
                          " does not match the dataset frame size " +
                          std::to_string(ds.frame_size()));
    }

    TrainConfig tc;
    tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
    tc.beta1 = cfg.get_double("beta1", tc.beta1);
    tc.beta2 = cfg.get_double("beta2", tc.beta2);
    tc.epsilon = cfg.get_double("epsilon", tc.epsilon);
    tc.dropout_rate = cfg.get_double("dropout", tc.dropout_rate);
    tc.ridge_lambda = cfg.get_double("ridge", tc.ridge_lambda);
    tc.batch_size = cfg.get_int("batch_size", tc.batch_size);
    tc.max_epochs = cfg.get_int("max_epochs", tc.max_epochs);
    tc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
    validate_config(tc);

    const ClassifierMode clf_mode =
        ds.mode == LabelMode::Single ? ClassifierMode::Softmax : ClassifierMode::PerClassLogistic;
    Model model = make_model(cell_cfg, ds.class_count(), clf_mode, tc.seed);
    const index_t params = model_param_count(model);
    const index_t dense_params =
        dense_param_count(ds.frame_size(), hidden_size, cell.gates);

    fs::create_directories(out_dir);
    const std::string metrics_path = out_dir + "/metrics.tsv";
    const std::string checkpoint_path = out_dir + "/model.ttrn";
    std::ofstream metrics(metrics_path, std::ios::trunc);
    if (!metrics) throw ConfigError("cannot write " + metrics_path);

    metrics << "# cell\t" << cfg.get("cell", "tt-gru") << '\n';
    metrics << "# input_size\t" << ds.frame_size() << '\n';
    metrics << "# hidden_size\t" << hidden_size << '\n';
    metrics << "# classes\t" << ds.class_count() << '\n';
    metrics << "# parameters\t" << params << '\n';
    metrics << "# dense_input_map\t" << dense_params << '\n';
    metrics << "# seed\t" << tc.seed << '\n';
    metrics << std::flush;

    FitOptions opts;
    opts.checkpoint_path = checkpoint_path;
    opts.live_log = &metrics;
    const FitResult result = fit(std::move(model), ds, tc, opts);

    std::printf("parameters\t%lld\n", static_cast<long long>(params));
    std::printf("epochs\t%lld\n", static_cast<long long>(tc.max_epochs));
    std::printf("best_epoch\t%lld\n", static_cast<long long>(result.best_epoch));
    std::printf("%s\t%.4f\n", result.val_metric_name.c_str(), result.best_metric);
    std::printf("checkpoint\t%s\n", checkpoint_path.c_str());
    std::printf("metrics\t%s\n", metrics_path.c_str());
}

// ---------------------------------------------------------------- eval ----

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    index_t batch_size = 16;
};

void run_eval(const EvalArgs& args) {
    const Checkpoint ck = read_checkpoint(args.checkpoint);
    const SequenceDataset ds = read_dataset(args.data);
    std::string metric_name;
    const double value = evaluate_dataset(ck.model, ds, args.batch_size, &metric_name);
    std::printf("%s\t%.4f\n", metric_name.c_str(), value);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor-train recurrent networks: plan, generate data, train, evaluate"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    CLI::App* plan = app.add_subcommand(
        "plan", "Print parameter counts and compression rates for a factorization");
    plan->add_option("--input-factors", plan_args.input_factors, "Input factors m_1,...,m_d")
        ->required();
    plan->add_option("--hidden-factors", plan_args.hidden_factors, "Hidden factors n_1,...,n_d")
        ->required();
    plan->add_option("--ranks", plan_args.ranks, "TT ranks r_0,...,r_d (r_0 = r_d = 1)")
        ->required();
    plan->add_option("--cell", plan_args.cell, "ttl, tt-srnn, tt-gru or tt-lstm");
    plan->callback([&plan_args] { run_plan(plan_args); });

    GenDataArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic 4-class motion dataset");
    gen->add_option("--out", gen_args.out, "Output directory")->required();
    gen->add_option("--classes", gen_args.classes, "Number of classes (must be 4)");
    gen->add_option("--per-class", gen_args.per_class, "Sequences per class");
    gen->add_option("--frame-size", gen_args.frame_size, "Frame shape HxWxC");
    gen->add_option("--t-min", gen_args.t_min, "Minimum sequence length");
    gen->add_option("--t-max", gen_args.t_max, "Maximum sequence length");
    gen->add_option("--square", gen_args.square, "Moving square edge length in pixels");
    gen->add_option("--noise", gen_args.noise, "Gaussian pixel noise level");
    gen->add_option("--seed", gen_args.seed, "Generator seed");
    gen->add_flag("--force", gen_args.force, "Overwrite a non-empty output directory");
    gen->callback([&gen_args] { run_gen_data(gen_args); });

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a recurrent classifier on a dataset");
    train->add_option("--config", train_args.config, "key=value config file");
    train->add_option("--data", train_args.data, "Dataset directory");
    train->add_option("--out", train_args.out, "Output directory for checkpoint and metrics");
    train->add_option("--cell", train_args.cell, "srnn, gru, lstm, tt-srnn, tt-gru or tt-lstm");
    train->add_option("--input-factors", train_args.input_factors, "Input factors (TT cells)");
    train->add_option("--hidden-factors", train_args.hidden_factors, "Hidden factors");
    train->add_option("--ranks", train_args.ranks, "TT ranks (TT cells)");
    train->add_option("--lr", train_args.lr, "Learning rate");
    train->add_option("--dropout", train_args.dropout, "Dropout rate in [0,1)");
    train->add_option("--ridge", train_args.ridge, "Ridge penalty on the classifier weights");
    train->add_option("--batch-size", train_args.batch_size, "Mini-batch size");
    train->add_option("--max-epochs", train_args.max_epochs, "Number of epochs");
    train->add_option("--seed", train_args.seed, "Training seed");
    train->callback([&train_args] { run_train(train_args); });

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
    eval->add_option("--data", eval_args.data, "Dataset directory")->required();
    eval->add_option("--batch-size", eval_args.batch_size, "Evaluation batch size");
    eval->callback([&eval_args] { run_eval(eval_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const DivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const NumericsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
