#include "ttrnn/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ttrnn/errors.hpp"

namespace ttrnn {

double Rng::normal() {
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) {
        throw ArgumentError("uniform_int: empty range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) {
        return static_cast<std::int64_t>(engine_()); // full 64-bit range
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t u;
    do {
        u = engine_();
    } while (u >= limit);
    return lo + static_cast<std::int64_t>(u % range);
}

std::string Rng::save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::load_state(const std::string& text) {
    std::istringstream is(text);
    is >> engine_;
    if (is.fail()) {
        throw FormatError("invalid RNG state text");
    }
}

} // namespace ttrnn
