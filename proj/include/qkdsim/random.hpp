#pragma once

#include <cstdint>

namespace qkdsim {

/// Splittable counter-based pseudo-random stream.
///
/// A draw is a pure function of (seed, stream_id, counter), so two streams
/// built from the same pair replay the same sequence, and streams with
/// distinct ids are statistically independent. One stream per party per
/// trial; never shared across trials.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 bits of precision.
    double uniform();

    /// Uniform integer in [0, bound). Requires bound >= 1.
    /// Rejection-sampled, so results are exactly uniform.
    int uniform_int(int bound);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

} // namespace qkdsim
