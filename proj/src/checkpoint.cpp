#include "ttrnn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "ttrnn/bytes.hpp"

namespace ttrnn {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'R', 'N'};
constexpr std::uint16_t kVersion = 1;

void write_tensor_values(std::ostream& os, const DenseTensor& t) {
    for (double v : t.data) bytes::write_f64(os, v);
}

void read_tensor_values(std::istream& is, DenseTensor& t, const std::string& what) {
    for (index_t i = 0; i < t.size(); ++i) t[i] = bytes::read_f64(is, what);
}

void write_tt_layer(std::ostream& os, const TTLayer& layer) {
    const TTShape& s = layer.cores.shape;
    bytes::write_u32(os, static_cast<std::uint32_t>(s.d()));
    for (index_t e : s.m) bytes::write_u64(os, static_cast<std::uint64_t>(e));
    for (index_t e : s.n) bytes::write_u64(os, static_cast<std::uint64_t>(e));
    for (index_t e : s.ranks) bytes::write_u64(os, static_cast<std::uint64_t>(e));
    bytes::write_u16(os, layer.bias ? 1 : 0);
    for (const DenseTensor& core : layer.cores.cores) write_tensor_values(os, core);
    if (layer.bias) write_tensor_values(os, *layer.bias);
}

TTLayer read_tt_layer(std::istream& is) {
    const index_t d = static_cast<index_t>(bytes::read_u32(is, "TT layer rank count"));
    if (d < 1 || d > 256) throw FormatError("implausible TT dimension count in checkpoint");
    TTShape s;
    for (index_t k = 0; k < d; ++k)
        s.m.push_back(static_cast<index_t>(bytes::read_u64(is, "TT input factors")));
    for (index_t k = 0; k < d; ++k)
        s.n.push_back(static_cast<index_t>(bytes::read_u64(is, "TT output factors")));
    for (index_t k = 0; k <= d; ++k)
        s.ranks.push_back(static_cast<index_t>(bytes::read_u64(is, "TT ranks")));
    validate_shape(s);
    const bool has_bias = bytes::read_u16(is, "TT bias flag") != 0;

    TTLayer layer;
    layer.cores.shape = s;
    for (index_t k = 0; k < d; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        DenseTensor core(Shape({s.m[ku], s.n[ku], s.ranks[ku], s.ranks[ku + 1]}));
        read_tensor_values(is, core, "TT core values");
        layer.cores.cores.push_back(std::move(core));
    }
    if (has_bias) {
        DenseTensor bias(Shape({s.output_size()}));
        read_tensor_values(is, bias, "TT bias values");
        layer.bias = std::move(bias);
    }
    return layer;
}

void write_cell(std::ostream& os, const RNNCell& cell) {
    bytes::write_u16(os, static_cast<std::uint16_t>(cell.kind));
    bytes::write_u32(os, static_cast<std::uint32_t>(cell.gates()));
    bytes::write_u64(os, static_cast<std::uint64_t>(cell.input_size));
    bytes::write_u64(os, static_cast<std::uint64_t>(cell.hidden_size));
    if (const auto* dm = std::get_if<DenseMap>(&cell.input_map)) {
        bytes::write_u16(os, 0);
        write_tensor_values(os, dm->weight);
    } else {
        bytes::write_u16(os, 1);
        write_tt_layer(os, std::get<TTMap>(cell.input_map).layer);
    }
    for (const DenseTensor& u : cell.u) write_tensor_values(os, u);
    for (const DenseTensor& b : cell.biases) write_tensor_values(os, b);
}

RNNCell read_cell(std::istream& is) {
    const std::uint16_t kind_tag = bytes::read_u16(is, "cell kind");
    if (kind_tag > 2) throw FormatError("unknown cell kind tag in checkpoint");
    RNNCell cell;
    cell.kind = static_cast<CellKind>(kind_tag);
    const index_t c = static_cast<index_t>(bytes::read_u32(is, "gate count"));
    if (c != gate_count(cell.kind)) throw FormatError("gate count does not match the cell kind");
    cell.input_size = static_cast<index_t>(bytes::read_u64(is, "cell input size"));
    cell.hidden_size = static_cast<index_t>(bytes::read_u64(is, "cell hidden size"));
    if (cell.input_size < 1 || cell.hidden_size < 1)
        throw FormatError("non-positive cell sizes in checkpoint");

    const std::uint16_t map_tag = bytes::read_u16(is, "input map tag");
    if (map_tag == 0) {
        DenseMap dm;
        dm.weight = DenseTensor(Shape({cell.input_size, c * cell.hidden_size}));
        read_tensor_values(is, dm.weight, "dense input map");
        cell.input_map = std::move(dm);
    } else if (map_tag == 1) {
        TTMap map;
        map.layer = read_tt_layer(is);
        if (map.layer.cores.shape.input_size() != cell.input_size ||
            map.layer.cores.shape.output_size() != c * cell.hidden_size)
            throw FormatError("TT input map does not match the cell sizes");
        cell.input_map = std::move(map);
    } else {
        throw FormatError("unknown input map tag in checkpoint");
    }

    for (index_t g = 0; g < c; ++g) {
        DenseTensor u(Shape({cell.hidden_size, cell.hidden_size}));
        read_tensor_values(is, u, "recurrent matrix");
        cell.u.push_back(std::move(u));
    }
    for (index_t g = 0; g < biased_gate_count(cell.kind); ++g) {
        DenseTensor b(Shape({cell.hidden_size}));
        read_tensor_values(is, b, "gate bias");
        cell.biases.push_back(std::move(b));
    }
    return cell;
}

void write_classifier(std::ostream& os, const Classifier& clf) {
    bytes::write_u16(os, clf.mode == ClassifierMode::Softmax ? 0 : 1);
    bytes::write_u64(os, static_cast<std::uint64_t>(clf.hidden_size()));
    bytes::write_u64(os, static_cast<std::uint64_t>(clf.class_count()));
    write_tensor_values(os, clf.weight);
    write_tensor_values(os, clf.bias);
}

Classifier read_classifier(std::istream& is) {
    const std::uint16_t mode_tag = bytes::read_u16(is, "classifier mode");
    if (mode_tag > 1) throw FormatError("unknown classifier mode tag");
    const index_t n = static_cast<index_t>(bytes::read_u64(is, "classifier hidden size"));
    const index_t j = static_cast<index_t>(bytes::read_u64(is, "classifier class count"));
    if (n < 1 || j < 1) throw FormatError("non-positive classifier sizes");
    Classifier clf;
    clf.mode = mode_tag == 0 ? ClassifierMode::Softmax : ClassifierMode::PerClassLogistic;
    clf.weight = DenseTensor(Shape({n, j}));
    clf.bias = DenseTensor(Shape({j}));
    read_tensor_values(is, clf.weight, "classifier weight");
    read_tensor_values(is, clf.bias, "classifier bias");
    return clf;
}

void write_adam(std::ostream& os, const AdamState& adam) {
    bytes::write_u64(os, static_cast<std::uint64_t>(adam.step));
    bytes::write_u64(os, static_cast<std::uint64_t>(adam.m.size()));
    for (std::size_t k = 0; k < adam.m.size(); ++k) {
        bytes::write_u64(os, static_cast<std::uint64_t>(adam.m[k].size()));
        for (double v : adam.m[k]) bytes::write_f64(os, v);
        for (double v : adam.v[k]) bytes::write_f64(os, v);
    }
}

AdamState read_adam(std::istream& is, Model& model) {
    AdamState adam;
    adam.step = static_cast<index_t>(bytes::read_u64(is, "optimizer step"));
    const auto blocks = param_blocks(model);
    const std::uint64_t count = bytes::read_u64(is, "optimizer block count");
    if (count != blocks.size())
        throw FormatError("optimizer block count does not match the model");
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const std::uint64_t len = bytes::read_u64(is, "optimizer block length");
        if (len != static_cast<std::uint64_t>(blocks[k].tensor->size()))
            throw FormatError("optimizer block length mismatch in " + blocks[k].name);
        std::vector<double> m(len), v(len);
        for (double& x : m) x = bytes::read_f64(is, "optimizer first moment");
        for (double& x : v) x = bytes::read_f64(is, "optimizer second moment");
        adam.m.push_back(std::move(m));
        adam.v.push_back(std::move(v));
    }
    return adam;
}

} // namespace

void write_checkpoint(const std::string& path, const Model& model, const AdamState& adam,
                      const std::string& rng_state) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path + " for writing");
    bytes::write_bytes(os, reinterpret_cast<const unsigned char*>(kMagic), 4);
    bytes::write_u16(os, kVersion);
    write_cell(os, model.cell);
    write_classifier(os, model.clf);
    write_adam(os, adam);
    bytes::write_u64(os, rng_state.size());
    bytes::write_bytes(os, reinterpret_cast<const unsigned char*>(rng_state.data()),
                       rng_state.size());
    if (!os) throw FormatError("failed writing " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path);
    try {
        unsigned char magic[4];
        bytes::read_bytes(is, magic, 4, "checkpoint magic");
        if (std::memcmp(magic, kMagic, 4) != 0)
            throw FormatError(path + ": bad magic bytes");
        const std::uint16_t version = bytes::read_u16(is, "checkpoint version");
        if (version != kVersion)
            throw FormatError(path + ": unsupported version " + std::to_string(version));

        Checkpoint ckpt;
        ckpt.model.cell = read_cell(is);
        ckpt.model.clf = read_classifier(is);
        if (ckpt.model.clf.hidden_size() != ckpt.model.cell.hidden_size)
            throw FormatError("classifier hidden size does not match the cell");
        ckpt.adam = read_adam(is, ckpt.model);
        const std::uint64_t rng_len = bytes::read_u64(is, "RNG state length");
        if (rng_len > (1u << 20)) throw FormatError("implausible RNG state length");
        ckpt.rng_state.resize(rng_len);
        if (rng_len > 0)
            bytes::read_bytes(is, reinterpret_cast<unsigned char*>(ckpt.rng_state.data()), rng_len,
                              "RNG state");
        if (is.peek() != std::char_traits<char>::eof())
            throw FormatError(path + ": trailing bytes after checkpoint");
        return ckpt;
    } catch (const ShapeError& e) {
        throw FormatError(path + ": inconsistent shapes (" + e.what() + ")");
    }
}

} // namespace ttrnn
