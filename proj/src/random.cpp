#include "qkdsim/random.hpp"

#include <limits>
#include <stdexcept>

namespace qkdsim {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer. Statistically solid as a hash of a Weyl sequence.
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id), base_(mix(seed ^ mix(stream_id + kGolden))) {}

std::uint64_t RandomStream::next_u64() {
    ++counter_;
    return mix(base_ + counter_ * kGolden);
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RandomStream::uniform_int(int bound) {
    if (bound < 1) {
        throw std::invalid_argument("RandomStream::uniform_int: bound must be >= 1");
    }
    const auto span = static_cast<std::uint64_t>(bound);
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % span;
    std::uint64_t v = next_u64();
    while (v >= limit) {
        v = next_u64();
    }
    return static_cast<int>(v % span);
}

} // namespace qkdsim
