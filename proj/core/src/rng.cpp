#include "cascadenet/rng.hpp"

namespace cascadenet {

namespace {
std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return std::seed_seq{lo(seed), hi(seed), lo(stream), hi(stream), 0x63617363u};
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    auto seq = make_seed_seq(seed, stream);
    engine_.seed(seq);
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % n;
    }
}

}  // namespace cascadenet
