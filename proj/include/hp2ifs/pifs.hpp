#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hp2ifs/binary_io.hpp"
#include "hp2ifs/image.hpp"
#include "hp2ifs/isometry.hpp"

namespace hp2ifs {

/// Parameters of the partitioned IFS encoder.
struct EncoderConfig {
    int range_size = 8;      ///< N: side of the non-overlapping range tiles.
    int domain_stride = 8;   ///< spacing of the 2N x 2N domain origins.
    double s_max = 0.99;     ///< contrast bound, |s| <= s_max < 1 keeps the map contractive.
    int s_bits = 5;
    int o_bits = 7;
    int decode_iterations = 10;

    /// Defaults with range size n and domain stride n.
    static EncoderConfig with_range_size(int n) {
        EncoderConfig cfg;
        cfg.range_size = n;
        cfg.domain_stride = n;
        return cfg;
    }

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;

    bool operator==(const EncoderConfig&) const = default;
};

/// Offsets are quantized over [-kOffsetLimit, kOffsetLimit].
inline constexpr double kOffsetLimit = 255.0;

/// Two candidate distortions closer than this are treated as equal and the
/// earlier candidate in (domain, isometry) order is kept.
inline constexpr double kDistortionTieTolerance = 1e-6;

/// Uniform quantizer with 2^bits levels over [-limit, limit): level L
/// reconstructs to -limit + L * limit / 2^(bits-1). Zero is level 2^(bits-1).
/// Inputs outside the representable range are clamped.
int quantize_level(double value, double limit, int bits);
double dequantize_level(int level, double limit, int bits);

inline int quantize_s(double s, const EncoderConfig& cfg) { return quantize_level(s, cfg.s_max, cfg.s_bits); }
inline double dequantize_s(int level, const EncoderConfig& cfg) { return dequantize_level(level, cfg.s_max, cfg.s_bits); }
inline int quantize_o(double o, const EncoderConfig& cfg) { return quantize_level(o, kOffsetLimit, cfg.o_bits); }
inline double dequantize_o(int level, const EncoderConfig& cfg) { return dequantize_level(level, kOffsetLimit, cfg.o_bits); }

struct ContrastOffset {
    double s = 0.0;
    double o = 0.0;
};

/// Least-squares s, o minimizing ||R - (s D + o)||^2, with s clamped to
/// [-s_max, s_max] and o refit for the clamped s. A flat domain gives s = 0.
template <typename DerivedR, typename DerivedD>
ContrastOffset fit_contrast_offset(const Eigen::MatrixBase<DerivedR>& range,
                                   const Eigen::MatrixBase<DerivedD>& domain, double s_max) {
    if (range.rows() != domain.rows() || range.cols() != domain.cols())
        throw InvalidArgument("fit_contrast_offset: block size mismatch");
    const auto r = range.template cast<double>().array();
    const auto d = domain.template cast<double>().array();
    const double mr = r.mean();
    const double md = d.mean();
    const double var = (d - md).square().sum();
    double s = 0.0;
    if (var > 0.0) s = std::clamp(((d - md) * (r - mr)).sum() / var, -s_max, s_max);
    return {s, mr - s * md};
}

/// Squared L2 distance between R and s D + o.
template <typename DerivedR, typename DerivedD>
double block_distortion(const Eigen::MatrixBase<DerivedR>& range, const Eigen::MatrixBase<DerivedD>& domain,
                        double s, double o) {
    if (range.rows() != domain.rows() || range.cols() != domain.cols())
        throw InvalidArgument("block_distortion: block size mismatch");
    return (range.template cast<double>().array() - (s * domain.template cast<double>().array() + o))
        .square()
        .sum();
}

/// Transform for one range tile: domain choice, isometry and quantized luminance map.
struct FractalCodeEntry {
    std::uint32_t domain_index = 0;
    Isometry isometry = Isometry::Identity;
    std::uint8_t s_q = 0;
    std::uint8_t o_q = 0;

    bool operator==(const FractalCodeEntry&) const = default;
};

/// Row-major grid of per-range transforms for one image.
struct FractalCode {
    EncoderConfig config;
    Index image_w = 0;
    Index image_h = 0;
    Index grid_w = 0;
    Index grid_h = 0;
    std::vector<FractalCodeEntry> entries;

    Index domain_cols() const { return domain_positions(image_w, config.range_size, config.domain_stride); }
    Index domain_rows() const { return domain_positions(image_h, config.range_size, config.domain_stride); }
    Index domain_count() const { return domain_cols() * domain_rows(); }

    bool operator==(const FractalCode&) const = default;
};

struct EncodeResult {
    FractalCode code;
    /// Scored distortion of every stored entry, computed with the dequantized s, o.
    std::vector<double> distortions;

    double mean_distortion() const;
};

/// Exhaustive search over every (domain, isometry) pair for each range tile.
/// Each candidate uses the least-squares contrast quantized to its level and
/// the offset refit for that dequantized contrast, then quantized. The pair
/// with the lowest dequantized distortion wins; near-ties within
/// kDistortionTieTolerance keep the lowest (domain_index, isometry id).
/// `threads` = 0 uses every hardware thread. Output does not depend on it.
EncodeResult encode_detailed(const GrayImage& img, const EncoderConfig& cfg, unsigned threads = 0);

inline FractalCode encode(const GrayImage& img, const EncoderConfig& cfg, unsigned threads = 0) {
    return encode_detailed(img, cfg, threads).code;
}

/// One application of the stored mapping to `previous`. Every range tile is
/// rebuilt from the previous iterate, so tiles never read partially updated data.
GrayImage decode_step(const FractalCode& code, const GrayImage& previous);

/// Iterates decode_step starting from `initial`.
GrayImage decode(const FractalCode& code, const GrayImage& initial, int iterations);

/// Iterates from a flat mid-gray (128) image.
GrayImage decode(const FractalCode& code, int iterations);

/// Stable 64-bit hash of the encoder fields that affect the code (N, stride,
/// s_max, s_bits, o_bits).
std::uint64_t config_fingerprint(const EncoderConfig& cfg);

/// Binary config record shared by code and gallery files:
/// N u32, stride u32, s_max*10000 u32, s_bits u8, o_bits u8.
void write_config(io::Writer& w, const EncoderConfig& cfg);
EncoderConfig read_config(io::Reader& r);

/// "HPIF" file image of a code. Little-endian, fixed-width entry records.
std::string serialize_code(const FractalCode& code);
FractalCode deserialize_code(std::string_view bytes);

void save_code(const std::filesystem::path& path, const FractalCode& code);
FractalCode load_code(const std::filesystem::path& path);

}  // namespace hp2ifs
