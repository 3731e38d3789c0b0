#pragma once

#include <cstdint>
#include <random>

#include "phasepack/common.hpp"

namespace phasepack {

// Seedable generator threaded through every stochastic routine. Copying a
// RandomSource forks the stream; use derive() for independent substreams.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    Index uniform_index(Index count);

    // Complex normal with unit variance: real and imaginary parts N(0, 1/2).
    Complex complex_normal();

    RealVector normal_vector(Index n);
    ComplexVector complex_normal_vector(Index n);

    // New generator keyed on this seed and a tag; does not advance this stream.
    RandomSource derive(std::uint64_t tag) const;

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_double(double v);

} // namespace phasepack
