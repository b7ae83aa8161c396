#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ttrnn/checkpoint.hpp"

using namespace ttrnn;
namespace fs = std::filesystem;

namespace {

Model tt_model(CellKind kind, std::uint64_t seed) {
    CellConfig cfg;
    cfg.kind = kind;
    cfg.tt = true;
    cfg.tt_shape.m = {2, 3};
    cfg.tt_shape.n = {2, 2};
    cfg.tt_shape.ranks = {1, 2, 1};
    return make_model(cfg, 3, ClassifierMode::Softmax, seed);
}

Model dense_model(std::uint64_t seed) {
    CellConfig cfg;
    cfg.kind = CellKind::SRNN;
    cfg.input_size = 5;
    cfg.hidden_size = 3;
    return make_model(cfg, 2, ClassifierMode::PerClassLogistic, seed);
}

bool tensors_equal(const DenseTensor& a, const DenseTensor& b) {
    return a.shape == b.shape &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

bool models_equal(Model a, Model b) {
    if (a.cell.kind != b.cell.kind || a.clf.mode != b.clf.mode) return false;
    if (a.cell.input_size != b.cell.input_size || a.cell.hidden_size != b.cell.hidden_size)
        return false;
    const auto pa = param_blocks(a);
    const auto pb = param_blocks(b);
    if (pa.size() != pb.size()) return false;
    for (std::size_t k = 0; k < pa.size(); ++k) {
        if (pa[k].name != pb[k].name) return false;
        if (!tensors_equal(*pa[k].tensor, *pb[k].tensor)) return false;
    }
    return true;
}

AdamState busy_adam(Model& model, std::uint64_t seed) {
    AdamState adam = init_adam(model);
    adam.step = 7;
    Rng rng(seed);
    for (auto& block : adam.m)
        for (double& v : block) v = rng.normal();
    for (auto& block : adam.v)
        for (double& v : block) v = rng.uniform();
    return adam;
}

std::vector<unsigned char> read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(bool(is));
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::vector<unsigned char>& bytes) {
    std::ofstream os(p, std::ios::binary);
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove(path);
    }
    ~TempFile() { fs::remove(path); }
};

void check_round_trip(Model model, const std::string& tag) {
    CAPTURE(tag);
    AdamState adam = busy_adam(model, 5);

    Rng rng(99);
    for (int i = 0; i < 10; ++i) rng.normal(); // mid-stream state
    const std::string rng_state = rng.save_state();

    TempFile file("ttrnn_ckpt_" + tag + ".ttrn");
    write_checkpoint(file.path.string(), model, adam, rng_state);
    const Checkpoint back = read_checkpoint(file.path.string());

    CHECK(models_equal(model, back.model));
    CHECK(back.adam.step == adam.step);
    REQUIRE(back.adam.m.size() == adam.m.size());
    for (std::size_t k = 0; k < adam.m.size(); ++k) {
        CHECK(back.adam.m[k] == adam.m[k]);
        CHECK(back.adam.v[k] == adam.v[k]);
    }
    CHECK(back.rng_state == rng_state);

    // The restored RNG continues the original stream.
    Rng restored;
    restored.load_state(back.rng_state);
    Rng original = rng;
    for (int i = 0; i < 5; ++i) CHECK(restored.next_u64() == original.next_u64());

    // Write-read-write reproduces the file byte for byte.
    TempFile file2("ttrnn_ckpt_" + tag + "_2.ttrn");
    write_checkpoint(file2.path.string(), back.model, back.adam, back.rng_state);
    CHECK(read_file(file.path) == read_file(file2.path));
}

} // namespace

TEST_CASE("checkpoint round trips are bitwise") {
    check_round_trip(tt_model(CellKind::GRU, 11), "ttgru");
    check_round_trip(tt_model(CellKind::LSTM, 12), "ttlstm");
    check_round_trip(dense_model(13), "dense");
}

TEST_CASE("checkpoint header") {
    Model model = dense_model(3);
    const AdamState adam = init_adam(model);
    TempFile file("ttrnn_ckpt_header.ttrn");
    write_checkpoint(file.path.string(), model, adam, Rng(1).save_state());
    const auto bytes = read_file(file.path);
    REQUIRE(bytes.size() > 6);
    CHECK(std::memcmp(bytes.data(), "TTRN", 4) == 0);
    CHECK((bytes[4] | (bytes[5] << 8)) == 1);
}

TEST_CASE("corrupt checkpoints are rejected") {
    Model model = tt_model(CellKind::GRU, 4);
    const AdamState adam = init_adam(model);
    TempFile file("ttrnn_ckpt_corrupt.ttrn");
    const std::string path = file.path.string();
    write_checkpoint(path, model, adam, Rng(2).save_state());
    const std::vector<unsigned char> good = read_file(file.path);

    const auto expect_reject = [&](std::vector<unsigned char> bytes, const std::string& needle) {
        CAPTURE(needle);
        write_file(file.path, bytes);
        try {
            read_checkpoint(path);
            FAIL_CHECK("expected a FormatError mentioning '" << needle << "'");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    {
        auto bytes = good;
        bytes[0] = 'X';
        expect_reject(bytes, "bad magic");
    }
    {
        auto bytes = good;
        bytes[4] = 9;
        expect_reject(bytes, "unsupported version");
    }
    {
        auto bytes = good;
        bytes[6] = 9; // cell kind tag
        expect_reject(bytes, "unknown cell kind");
    }
    {
        auto bytes = good;
        bytes.resize(bytes.size() - 3);
        expect_reject(bytes, "");
    }
    {
        auto bytes = good;
        bytes.insert(bytes.end(), {1, 2, 3});
        expect_reject(bytes, "trailing bytes");
    }

    CHECK_THROWS_AS(read_checkpoint("/tmp/ttrnn_no_such_checkpoint.ttrn"), FormatError);

    // The undamaged file still loads.
    write_file(file.path, good);
    CHECK(models_equal(model, read_checkpoint(path).model));
}
