#pragma once

#include <cstdint>
#include <random>

namespace qkemp {

/// Seeded source of uniform variates on [0, 1). The 53-bit conversion is
/// spelled out rather than left to std::uniform_real_distribution so that a
/// seed reproduces the same stream with any standard library.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    double next() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace qkemp
