#include "phasepack/problems.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

namespace phasepack {

void validate(const PhaseProblem& problem) {
    if (!problem.op) fail(ErrorCode::InvalidArgument, "problem: missing operator");
    if (problem.b0.size() != problem.m()) {
        fail(ErrorCode::DimensionMismatch, "problem: b0 has length " + std::to_string(problem.b0.size()) +
                                               ", operator has m = " + std::to_string(problem.m()));
    }
    for (Index i = 0; i < problem.b0.size(); ++i) {
        if (!std::isfinite(problem.b0[i]) || problem.b0[i] < 0.0) {
            fail(ErrorCode::InvalidArgument, "problem: b0 entries must be finite and nonnegative");
        }
    }
    if (problem.xt) {
        require_length(*problem.xt, problem.n(), "problem: xt");
        require_finite(*problem.xt, "problem: xt");
    }
}

OctanaryMaskSet make_octanary_masks(Index count, Index length, std::uint64_t seed) {
    if (count < 1 || length < 1) fail(ErrorCode::InvalidArgument, "octanary masks: count and length must be positive");
    static const std::array<Complex, 4> units = {Complex{1, 0}, Complex{-1, 0}, Complex{0, 1}, Complex{0, -1}};
    const double small = std::sqrt(2.0) / 2.0;
    const double large = std::sqrt(3.0);
    RandomSource rng(seed);
    OctanaryMaskSet set;
    set.seed = seed;
    set.masks.reserve(static_cast<std::size_t>(count));
    for (Index l = 0; l < count; ++l) {
        ComplexVector d(length);
        for (Index j = 0; j < length; ++j) {
            const Complex d1 = units[static_cast<std::size_t>(rng.uniform_index(4))];
            const double d2 = rng.uniform() < 0.8 ? small : large;
            d[j] = d1 * d2;
        }
        set.masks.push_back(std::move(d));
    }
    return set;
}

PhaseProblem build_gaussian_problem(Index n, Index m, bool is_complex, RandomSource& rng) {
    if (n < 1 || m < 1) {
        fail(ErrorCode::InvalidArgument, "gaussian problem: invalid dimensions n = " + std::to_string(n) +
                                             ", m = " + std::to_string(m));
    }
    ComplexMatrix a(m, n);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) a(i, j) = is_complex ? rng.complex_normal() : Complex{rng.normal(), 0.0};
    }
    ComplexVector xt(n);
    for (Index j = 0; j < n; ++j) xt[j] = is_complex ? rng.complex_normal() : Complex{rng.normal(), 0.0};

    PhaseProblem problem;
    auto op = std::make_shared<DenseOperator>(std::move(a));
    problem.b0 = op->forward(xt).cwiseAbs();
    problem.op = std::move(op);
    problem.xt = std::move(xt);
    return problem;
}

PhaseProblem build_image_problem(const RealMatrix& image, Index num_masks, RandomSource& rng) {
    if (image.size() == 0) fail(ErrorCode::InvalidArgument, "image problem: empty image");
    if (num_masks < 1) fail(ErrorCode::InvalidArgument, "image problem: numMasks must be >= 1");
    const Index h = image.rows();
    const Index w = image.cols();
    ComplexVector xt(h * w);
    for (Index r = 0; r < h; ++r) {
        for (Index c = 0; c < w; ++c) xt[r * w + c] = image(r, c);
    }
    auto masks = make_octanary_masks(num_masks, h * w, rng.engine()());
    auto op = std::make_shared<MaskedFourierOperator>(h, w, std::move(masks.masks));
    PhaseProblem problem;
    problem.b0 = op->forward(xt).cwiseAbs();
    problem.op = std::move(op);
    problem.xt = std::move(xt);
    return problem;
}

RealVector draw_noise(const RealVector& b, double snr_db, RandomSource& rng) {
    if (!std::isfinite(snr_db)) fail(ErrorCode::InvalidArgument, "noise: snr must be finite");
    const double bnorm = b.norm();
    if (bnorm == 0.0) fail(ErrorCode::DegenerateInput, "noise: ||b|| = 0, snr is undefined");
    RealVector w = rng.normal_vector(b.size());
    while (w.norm() == 0.0) w = rng.normal_vector(b.size());
    const double target = bnorm * std::pow(10.0, -snr_db / 20.0);
    return w * (target / w.norm());
}

RealVector add_noise(const RealVector& b, const NoiseSpec& spec, RandomSource& rng) {
    for (Index i = 0; i < b.size(); ++i) {
        if (!(b[i] >= 0.0)) fail(ErrorCode::InvalidArgument, "noise: b must be nonnegative");
    }
    if (spec.is_noiseless()) return b;
    return (b + draw_noise(b, *spec.snr_db, rng)).cwiseMax(0.0);
}

double estimate_signal_norm(const RealVector& b) {
    if (b.size() == 0) fail(ErrorCode::InvalidArgument, "estimate_signal_norm: empty measurement vector");
    return std::sqrt(b.squaredNorm() / static_cast<double>(b.size()));
}

// ---------------------------------------------------------------------------
// measurement bundles

namespace {

constexpr const char* kNumberFormat = "c128le";
constexpr const char* kOrder = "row-major";
constexpr std::size_t kMaxHeader = 4096;

void put_f64(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xffu));
}

double get_f64(const char* p) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k])) << (8 * k);
    return std::bit_cast<double>(bits);
}

Index header_dimension(const nlohmann::json& header, const char* key) {
    if (!header.contains(key)) fail(ErrorCode::Parse, std::string("bundle header: missing key '") + key + "'");
    const auto& v = header.at(key);
    if (!v.is_number_integer()) fail(ErrorCode::Parse, std::string("bundle header: '") + key + "' must be an integer");
    const auto value = v.get<long long>();
    if (value < 1) {
        fail(ErrorCode::InvalidArgument, std::string("bundle header: invalid dimension ") + key + " = " +
                                             std::to_string(value));
    }
    return static_cast<Index>(value);
}

} // namespace

void save_measurement_bundle(const PhaseProblem& problem, const std::filesystem::path& path) {
    validate(problem);
    const auto* dense = dynamic_cast<const DenseOperator*>(problem.op.get());
    const ComplexMatrix matrix = dense ? dense->matrix() : materialize(*problem.op);

    nlohmann::ordered_json header;
    header["m"] = problem.m();
    header["n"] = problem.n();
    header["numberFormat"] = kNumberFormat;
    header["order"] = kOrder;

    std::string bytes = header.dump();
    bytes.push_back('\n');
    bytes.reserve(bytes.size() + static_cast<std::size_t>(matrix.size()) * 16 + static_cast<std::size_t>(problem.m()) * 8);
    for (Index i = 0; i < matrix.rows(); ++i) {
        for (Index j = 0; j < matrix.cols(); ++j) {
            put_f64(bytes, matrix(i, j).real());
            put_f64(bytes, matrix(i, j).imag());
        }
    }
    for (Index i = 0; i < problem.b0.size(); ++i) put_f64(bytes, problem.b0[i]);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open bundle for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "failed writing bundle: " + path.string());
}

PhaseProblem load_measurement_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open bundle: " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const auto newline = bytes.find('\n');
    if (newline == std::string::npos || newline > kMaxHeader) {
        fail(ErrorCode::Parse, "bundle header: no terminating newline within the first " +
                                   std::to_string(kMaxHeader) + " bytes (byte offset " +
                                   std::to_string(std::min(bytes.size(), kMaxHeader)) + ")");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.substr(0, newline));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::Parse, "bundle header: malformed at byte offset " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!header.is_object()) fail(ErrorCode::Parse, "bundle header: expected an object at byte offset 0");
    const Index m = header_dimension(header, "m");
    const Index n = header_dimension(header, "n");
    if (header.value("numberFormat", std::string()) != kNumberFormat) {
        fail(ErrorCode::Parse, "bundle header: numberFormat must be \"c128le\"");
    }
    if (header.value("order", std::string()) != kOrder) {
        fail(ErrorCode::Parse, "bundle header: order must be \"row-major\"");
    }

    const std::size_t expected = static_cast<std::size_t>(m) * static_cast<std::size_t>(n) * 16 +
                                 static_cast<std::size_t>(m) * 8;
    const std::size_t payload = bytes.size() - newline - 1;
    if (payload != expected) {
        fail(ErrorCode::Integrity, "bundle payload: expected " + std::to_string(expected) + " bytes after header, found " +
                                       std::to_string(payload));
    }

    const char* p = bytes.data() + newline + 1;
    ComplexMatrix matrix(m, n);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            matrix(i, j) = Complex{get_f64(p), get_f64(p + 8)};
            p += 16;
        }
    }
    RealVector b(m);
    for (Index i = 0; i < m; ++i, p += 8) b[i] = get_f64(p);

    PhaseProblem problem;
    problem.op = std::make_shared<DenseOperator>(std::move(matrix));
    problem.b0 = std::move(b);
    validate(problem);
    return problem;
}

// ---------------------------------------------------------------------------
// graymaps

namespace {

std::string next_token(std::istream& in) {
    std::string token;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            token.push_back(c);
            break;
        }
    }
    while (in.get(c) && !std::isspace(static_cast<unsigned char>(c))) token.push_back(c);
    return token;
}

} // namespace

RealMatrix load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open image: " + path.string());
    const std::string magic = next_token(in);
    if (magic != "P5" && magic != "P2") fail(ErrorCode::Parse, "image: not a PGM file: " + path.string());
    Index w = 0, h = 0;
    int maxval = 0;
    try {
        w = std::stol(next_token(in));
        h = std::stol(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        fail(ErrorCode::Parse, "image: malformed PGM header: " + path.string());
    }
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255) fail(ErrorCode::Parse, "image: unsupported PGM header: " + path.string());
    RealMatrix image(h, w);
    for (Index r = 0; r < h; ++r) {
        for (Index c = 0; c < w; ++c) {
            int v = 0;
            if (magic == "P5") {
                char byte = 0;
                if (!in.get(byte)) fail(ErrorCode::Integrity, "image: truncated PGM payload: " + path.string());
                v = static_cast<unsigned char>(byte);
            } else {
                const auto token = next_token(in);
                if (token.empty()) fail(ErrorCode::Integrity, "image: truncated PGM payload: " + path.string());
                v = std::stoi(token);
            }
            image(r, c) = static_cast<double>(v) / maxval;
        }
    }
    return image;
}

void save_pgm(const std::filesystem::path& path, const RealMatrix& image) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open image for writing: " + path.string());
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    for (Index r = 0; r < image.rows(); ++r) {
        for (Index c = 0; c < image.cols(); ++c) {
            const double v = std::clamp(image(r, c), 0.0, 1.0);
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
    if (!out) fail(ErrorCode::Io, "failed writing image: " + path.string());
}

RealMatrix checkerboard_image(Index height, Index width, Index cell) {
    RealMatrix image(height, width);
    for (Index r = 0; r < height; ++r) {
        for (Index c = 0; c < width; ++c) image(r, c) = ((r / cell + c / cell) % 2 == 0) ? 1.0 : 0.0;
    }
    return image;
}

} // namespace phasepack
