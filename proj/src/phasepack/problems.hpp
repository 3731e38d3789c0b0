#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "phasepack/common.hpp"
#include "phasepack/operators.hpp"
#include "phasepack/random.hpp"

namespace phasepack {

using RealMatrix = Eigen::MatrixXd;

/// Measurement operator, magnitudes b0 and (for synthetic data) the signal
/// that produced them.
struct PhaseProblem {
    OperatorPtr op;
    RealVector b0;
    std::optional<ComplexVector> xt;

    Index m() const { return op->rows(); }
    Index n() const { return op->cols(); }
};

/// Validates the PhaseProblem invariants (sizes, b0 >= 0, finite).
void validate(const PhaseProblem& problem);

struct NoiseSpec {
    std::optional<double> snr_db; // nullopt: noiseless

    static NoiseSpec noiseless() { return {}; }
    static NoiseSpec decibels(double snr) { return {snr}; }
    bool is_noiseless() const { return !snr_db.has_value(); }
};

struct OctanaryMaskSet {
    std::vector<ComplexVector> masks;
    std::uint64_t seed = 0;
};

/// Entries d1*d2 with d1 uniform on {1,-1,i,-i}; d2 = sqrt(2)/2 w.p. 4/5, sqrt(3) w.p. 1/5.
OctanaryMaskSet make_octanary_masks(Index count, Index length, std::uint64_t seed);

/// Gaussian A (unit-variance entries) and Gaussian xt; b0 = |A xt|.
PhaseProblem build_gaussian_problem(Index n, Index m, bool is_complex, RandomSource& rng);

/// xt = row-major vectorized image; A = octanary coded-diffraction operator.
PhaseProblem build_image_problem(const RealMatrix& image, Index num_masks, RandomSource& rng);

/// Draws w with 20 log10(||b|| / ||w||) = snr_db exactly.
RealVector draw_noise(const RealVector& b, double snr_db, RandomSource& rng);

/// max(b + w, 0) with w from draw_noise; identity for the noiseless spec.
RealVector add_noise(const RealVector& b, const NoiseSpec& spec, RandomSource& rng);

/// sqrt(mean(b_i^2)).
double estimate_signal_norm(const RealVector& b);

// Measurement bundle: one JSON header line
//   {"m":M,"n":N,"numberFormat":"c128le","order":"row-major"}\n
// followed by m*n complex128 little-endian (re, im) row-major entries and m
// float64 little-endian magnitudes. Nothing may follow the payload.
void save_measurement_bundle(const PhaseProblem& problem, const std::filesystem::path& path);
PhaseProblem load_measurement_bundle(const std::filesystem::path& path);

// Grayscale images as 8-bit portable graymaps (P5 binary, P2 ascii on read).
RealMatrix load_pgm(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const RealMatrix& image);

RealMatrix checkerboard_image(Index height, Index width, Index cell);

} // namespace phasepack
