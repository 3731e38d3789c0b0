#include "phasepack/random.hpp"

#include <bit>
#include <cmath>

namespace phasepack {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

std::uint64_t hash_double(double v) {
    if (v == 0.0) v = 0.0; // fold -0
    return splitmix64(std::bit_cast<std::uint64_t>(v));
}

Index RandomSource::uniform_index(Index count) {
    std::uniform_int_distribution<Index> dist(0, count - 1);
    return dist(engine_);
}

Complex RandomSource::complex_normal() {
    const double s = std::sqrt(0.5);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

RealVector RandomSource::normal_vector(Index n) {
    RealVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
}

ComplexVector RandomSource::complex_normal_vector(Index n) {
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = complex_normal();
    return v;
}

RandomSource RandomSource::derive(std::uint64_t tag) const { return RandomSource(mix_seed(seed_, tag)); }

} // namespace phasepack
