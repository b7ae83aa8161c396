#include "ttrnn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttrnn/bytes.hpp"
#include "ttrnn/rng.hpp"

namespace fs = std::filesystem;

namespace ttrnn {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'S', 'Q'};
constexpr std::uint16_t kVersion = 1;

double snap_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::string record_filename(std::size_t idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "seq_%05zu.ttsq", idx);
    return buf;
}

} // namespace

SequenceDataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.height < 8 || spec.width < 8)
        throw ArgumentError("synthetic frames must be at least 8x8");
    if (spec.square < 1 || spec.square > spec.height || spec.square > spec.width)
        throw ArgumentError("square size " + std::to_string(spec.square) +
                            " does not fit a " + std::to_string(spec.height) + "x" +
                            std::to_string(spec.width) + " frame");
    if (spec.t_min < 4 || spec.t_max > 64 || spec.t_min > spec.t_max)
        throw ArgumentError("sequence length range must lie within [4, 64]");
    if (spec.channels < 1) throw ArgumentError("channel count must be positive");
    if (spec.n_per_class < 1) throw ArgumentError("need at least one sequence per class");
    if (spec.noise_std < 0.0) throw ArgumentError("noise level must be non-negative");

    // Per-class motion in (row, col) pixels per step.
    const index_t kSpeed = 2;
    const index_t dir[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};

    SequenceDataset ds;
    ds.mode = LabelMode::Single;
    ds.class_names = {"left", "right", "up", "down"};
    ds.height = spec.height;
    ds.width = spec.width;
    ds.channels = spec.channels;

    Rng rng(spec.seed);
    for (index_t cls = 0; cls < 4; ++cls) {
        for (index_t i = 0; i < spec.n_per_class; ++i) {
            const index_t t_len = rng.uniform_int(spec.t_min, spec.t_max);
            const index_t r0 = rng.uniform_int(0, spec.height - 1);
            const index_t c0 = rng.uniform_int(0, spec.width - 1);

            SequenceRecord rec;
            rec.label = cls;
            rec.frames = DenseTensor(Shape({t_len, spec.height, spec.width, spec.channels}));
            double* px = rec.frames.data.data();
            for (index_t t = 0; t < t_len; ++t) {
                const index_t rt = ((r0 + t * kSpeed * dir[cls][0]) % spec.height + spec.height) %
                                   spec.height;
                const index_t ct = ((c0 + t * kSpeed * dir[cls][1]) % spec.width + spec.width) %
                                   spec.width;
                for (index_t r = 0; r < spec.height; ++r) {
                    for (index_t c = 0; c < spec.width; ++c) {
                        const index_t dr = ((r - rt) % spec.height + spec.height) % spec.height;
                        const index_t dc = ((c - ct) % spec.width + spec.width) % spec.width;
                        const bool lit = dr < spec.square && dc < spec.square;
                        for (index_t ch = 0; ch < spec.channels; ++ch) {
                            double v = lit ? 1.0 : 0.0;
                            if (spec.noise_std > 0.0)
                                v += spec.noise_std * rng.normal();
                            *px++ = snap_f32(std::clamp(v, 0.0, 1.0));
                        }
                    }
                }
            }
            ds.records.push_back(std::move(rec));
        }
    }
    return ds;
}

namespace {

void write_record(const SequenceRecord& rec, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    bytes::write_bytes(os, reinterpret_cast<const unsigned char*>(kMagic), 4);
    bytes::write_u16(os, kVersion);
    for (std::size_t k = 0; k < 4; ++k)
        bytes::write_u32(os, static_cast<std::uint32_t>(rec.frames.shape.extent(k)));
    for (double v : rec.frames.data) bytes::write_f32(os, static_cast<float>(v));
    if (!os) throw FormatError("failed writing " + path.string());
}

DenseTensor read_record_frames(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    const std::string name = path.filename().string();
    unsigned char magic[4];
    bytes::read_bytes(is, magic, 4, name + " magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(name + ": bad magic bytes");
    const std::uint16_t version = bytes::read_u16(is, name + " version");
    if (version != kVersion)
        throw FormatError(name + ": unsupported version " + std::to_string(version));
    index_t ext[4];
    for (auto& e : ext) {
        e = static_cast<index_t>(bytes::read_u32(is, name + " header"));
        if (e < 1) throw FormatError(name + ": non-positive extent in header");
    }
    DenseTensor frames(Shape({ext[0], ext[1], ext[2], ext[3]}));
    for (index_t i = 0; i < frames.size(); ++i) {
        const double v = static_cast<double>(bytes::read_f32(is, name + " payload"));
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw FormatError(name + ": pixel value outside [0, 1]");
        frames[i] = v;
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw FormatError(name + ": trailing bytes after payload");
    return frames;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

index_t parse_class_id(const std::string& text, index_t class_count, const std::string& where) {
    std::size_t pos = 0;
    long long v = -1;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw FormatError(where + ": bad label '" + text + "'");
    }
    if (pos != text.size() || v < 0 || v >= class_count)
        throw FormatError(where + ": label '" + text + "' out of range");
    return static_cast<index_t>(v);
}

} // namespace

void write_dataset(const SequenceDataset& ds, const std::string& directory) {
    if (ds.records.empty()) throw ArgumentError("refusing to write an empty dataset");
    const fs::path dir(directory);
    fs::create_directories(dir);

    std::ofstream manifest(dir / "manifest.tsv");
    if (!manifest) throw FormatError("cannot open " + (dir / "manifest.tsv").string());
    manifest << (ds.mode == LabelMode::Single ? "single" : "multi");
    for (const std::string& name : ds.class_names) manifest << '\t' << name;
    manifest << '\n';

    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const SequenceRecord& rec = ds.records[i];
        const std::string fname = record_filename(i);
        write_record(rec, dir / fname);
        manifest << fname << '\t';
        if (ds.mode == LabelMode::Single) {
            manifest << rec.label;
        } else {
            for (std::size_t k = 0; k < rec.labels.size(); ++k)
                manifest << (k ? "," : "") << rec.labels[k];
        }
        manifest << '\n';
    }
    if (!manifest) throw FormatError("failed writing manifest.tsv");
}

SequenceDataset read_dataset(const std::string& directory) {
    const fs::path dir(directory);
    std::ifstream manifest(dir / "manifest.tsv");
    if (!manifest) throw FormatError("missing manifest.tsv in " + directory);

    std::string line;
    if (!std::getline(manifest, line))
        throw FormatError("manifest.tsv is empty");
    std::vector<std::string> header = split_tabs(line);
    SequenceDataset ds;
    if (header[0] == "single")
        ds.mode = LabelMode::Single;
    else if (header[0] == "multi")
        ds.mode = LabelMode::Multi;
    else
        throw FormatError("manifest.tsv: unknown label mode '" + header[0] + "'");
    ds.class_names.assign(header.begin() + 1, header.end());
    if (ds.class_names.empty()) throw FormatError("manifest.tsv: no class names in header");

    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_tabs(line);
        if (fields.size() != 2)
            throw FormatError("manifest.tsv: expected 'file<TAB>label', got '" + line + "'");
        const fs::path file = dir / fields[0];
        if (!fs::exists(file))
            throw FormatError("manifest.tsv references missing file " + fields[0]);

        SequenceRecord rec;
        rec.frames = read_record_frames(file);
        if (ds.mode == LabelMode::Single) {
            rec.label = parse_class_id(fields[1], ds.class_count(), fields[0]);
        } else if (!fields[1].empty()) {
            std::stringstream ss(fields[1]);
            std::string part;
            while (std::getline(ss, part, ','))
                rec.labels.push_back(parse_class_id(part, ds.class_count(), fields[0]));
            std::sort(rec.labels.begin(), rec.labels.end());
        }

        if (ds.records.empty()) {
            ds.height = rec.frames.shape.extent(1);
            ds.width = rec.frames.shape.extent(2);
            ds.channels = rec.frames.shape.extent(3);
        } else if (rec.frames.shape.extent(1) != ds.height ||
                   rec.frames.shape.extent(2) != ds.width ||
                   rec.frames.shape.extent(3) != ds.channels) {
            throw FormatError(fields[0] + ": frame size differs from the rest of the dataset");
        }
        ds.records.push_back(std::move(rec));
    }
    if (ds.records.empty()) throw FormatError("manifest.tsv lists no records");
    return ds;
}

DenseTensor normalize_frames(const std::vector<std::uint8_t>& raw, const Shape& shape) {
    if (static_cast<index_t>(raw.size()) != shape.size())
        throw ShapeError("raw byte count does not match the shape");
    DenseTensor out(shape);
    for (std::size_t i = 0; i < raw.size(); ++i)
        out.data[i] = snap_f32(static_cast<double>(raw[i]) / 255.0);
    return out;
}

std::vector<DenseTensor> flatten_frames(const SequenceRecord& rec) {
    const index_t t_len = rec.frames.shape.extent(0);
    const index_t fsize = rec.frames.size() / t_len;
    std::vector<DenseTensor> out;
    out.reserve(static_cast<std::size_t>(t_len));
    for (index_t t = 0; t < t_len; ++t) {
        DenseTensor v(Shape({fsize}));
        std::copy_n(rec.frames.data.data() + static_cast<std::size_t>(t * fsize), fsize,
                    v.data.data());
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace ttrnn
