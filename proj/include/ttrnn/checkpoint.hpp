#pragma once

#include <string>

#include "ttrnn/training.hpp"

namespace ttrnn {

struct Checkpoint {
    Model model;
    AdamState adam;
    std::string rng_state;
};

/// Binary model snapshot: magic "TTRN", version u16, then the cell segment
/// (kind tag, gate count, N, M, input-map tag and payload, U matrices and
/// biases in gate order), the classifier segment, and the optimizer segment
/// (step, first/second moments per parameter block, RNG state text). All
/// integers and floats little-endian; the round trip is bitwise exact.
void write_checkpoint(const std::string& path, const Model& model, const AdamState& adam,
                      const std::string& rng_state);

Checkpoint read_checkpoint(const std::string& path);

} // namespace ttrnn
