#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttrnn/tensor.hpp"

namespace ttrnn {

enum class LabelMode { Single, Multi };

/// One labeled sequence. frames is (T, H, W, C) with values in [0, 1];
/// label holds the class id in single-label mode, labels the sorted class
/// ids in multi-label mode.
struct SequenceRecord {
    DenseTensor frames;
    index_t label = -1;
    std::vector<index_t> labels;
};

struct SequenceDataset {
    LabelMode mode = LabelMode::Single;
    std::vector<std::string> class_names;
    std::vector<SequenceRecord> records;
    index_t height = 0;
    index_t width = 0;
    index_t channels = 0;

    index_t frame_size() const { return height * width * channels; }
    index_t class_count() const { return static_cast<index_t>(class_names.size()); }
};

struct SyntheticSpec {
    index_t n_per_class = 100;
    index_t t_min = 12;
    index_t t_max = 20;
    index_t height = 16;
    index_t width = 16;
    index_t channels = 3;
    index_t square = 4;
    double noise_std = 0.05;
    std::uint64_t seed = 0;
};

/// 4-class motion task: a bright square drifts {left, right, up, down} by 2
/// pixels per step with toroidal wrap-around, over dark frames with additive
/// Gaussian noise clipped to [0, 1]. Start positions are uniform, so no
/// single frame reveals the class; only the inter-frame motion does.
/// Sequence lengths are drawn uniformly from [t_min, t_max]. All pixel
/// values are snapped to the float32 grid, making container round trips
/// bit-exact. Deterministic given the seed.
SequenceDataset generate_synthetic(const SyntheticSpec& spec);

/// One file per sequence ("seq_00000.ttsq", ...): magic "TTSQ", version u16,
/// then u32 T, H, W, C, then T*H*W*C float32 values, everything
/// little-endian, frames row-major. "manifest.tsv" lists the label mode and
/// class names on a header line, then one "<filename>\t<label spec>" line
/// per record (a class id, or comma-separated ids in multi-label mode).
void write_dataset(const SequenceDataset& ds, const std::string& directory);
SequenceDataset read_dataset(const std::string& directory);

/// v -> v / 255, snapped to the float32 grid.
DenseTensor normalize_frames(const std::vector<std::uint8_t>& raw, const Shape& shape);

/// Per-frame row-major flattening of (T, H, W, C) into T vectors of length
/// H*W*C, matching reshape order so TT input factorizations apply directly.
std::vector<DenseTensor> flatten_frames(const SequenceRecord& rec);

} // namespace ttrnn
