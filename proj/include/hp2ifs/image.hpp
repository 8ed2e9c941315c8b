#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hp2ifs/error.hpp"

namespace hp2ifs {

using Index = Eigen::Index;

/// Dense row-major raster. rows() is the image height, cols() the width.
template <typename Scalar>
using Raster = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit single-channel image, intensities in [0, 255].
using GrayImage = Raster<std::uint8_t>;

/// Square tile cut from a source image at (row, col).
template <typename Scalar>
struct Block {
    Index row = 0;
    Index col = 0;
    Raster<Scalar> data;

    Index size() const { return data.rows(); }
};

/// Rounds half away from zero and clamps to [0, 255].
inline std::uint8_t to_intensity(double v) {
    const double r = std::round(v);
    if (r <= 0.0) return 0;
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

/// Throws InvalidArgument unless both dimensions are positive.
void require_valid(const GrayImage& img);

/// Bilinear resampling with corner-aligned sample positions:
/// src = dst * (src_len - 1) / (dst_len - 1).
GrayImage resize_bilinear(const GrayImage& img, Index width, Index height);

/// Canonical 256x256 working resolution. A 256x256 input is returned unchanged.
GrayImage resize_to_256(const GrayImage& img);

/// Averages each 2x2 quad, rounding half away from zero.
template <typename Derived>
Raster<std::uint8_t> downsample_2x(const Eigen::MatrixBase<Derived>& src) {
    const Index n = src.rows();
    if (n != src.cols() || n % 2 != 0 || n == 0)
        throw InvalidArgument("downsample_2x: block side must be even and square");
    const Index h = n / 2;
    Raster<std::uint8_t> out(h, h);
    for (Index r = 0; r < h; ++r) {
        for (Index c = 0; c < h; ++c) {
            const int sum = int(src(2 * r, 2 * c)) + int(src(2 * r, 2 * c + 1)) +
                            int(src(2 * r + 1, 2 * c)) + int(src(2 * r + 1, 2 * c + 1));
            out(r, c) = to_intensity(sum / 4.0);
        }
    }
    return out;
}

template <typename Scalar>
Block<std::uint8_t> downsample_2x(const Block<Scalar>& b) {
    return {b.row, b.col, downsample_2x(b.data)};
}

/// Non-overlapping n x n tiling in row-major order.
std::vector<Block<std::uint8_t>> extract_range_blocks(const GrayImage& img, Index n);

/// Number of domain origins along an axis of length `len`.
inline Index domain_positions(Index len, Index n, Index stride) { return (len - 2 * n) / stride + 1; }

/// All 2n x 2n blocks at origins (i*stride, j*stride) that fit, row-major.
std::vector<Block<std::uint8_t>> extract_domain_blocks(const GrayImage& img, Index n, Index stride);

/// Sum of squared intensity differences.
double squared_error(const GrayImage& a, const GrayImage& b);

/// Peak signal-to-noise ratio in dB for 8-bit images; +inf for identical images.
double psnr(const GrayImage& a, const GrayImage& b);

}  // namespace hp2ifs
