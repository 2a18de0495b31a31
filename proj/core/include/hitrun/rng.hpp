#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hitrun {

/// Seedable random stream with platform-independent output.
///
/// The engine is `std::mt19937_64`, whose output sequence is fixed by the
/// standard. Floating-point draws are produced here rather than through
/// `<random>` distributions, whose algorithms are implementation-defined, so
/// that a (seed, stream) pair yields bit-identical samples on every platform.
///
/// Independent streams are derived from `(master seed, index, label)` by
/// hashing; see `derive`.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0);

    /// Stream for replica `index` of the component named `label`.
    static Rng derive(std::uint64_t master, std::uint64_t index, std::string_view label = {});

    /// Child stream; consumes one draw from this stream to form the base seed.
    Rng split(std::uint64_t index, std::string_view label = {});

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal();

    bool coin() { return (engine_() >> 63) != 0; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

  private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

/// SplitMix64 finalizer; the mixing step used to derive stream seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace hitrun
