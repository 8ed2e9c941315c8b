#include "hp2ifs/image.hpp"

#include <cmath>
#include <limits>

namespace hp2ifs {

void require_valid(const GrayImage& img) {
    if (img.rows() <= 0 || img.cols() <= 0) throw InvalidArgument("image must have positive width and height");
}

namespace {

// Source coordinate of destination sample i for corner-aligned resampling.
double source_coord(Index i, Index src_len, Index dst_len) {
    if (dst_len <= 1) return 0.0;
    return static_cast<double>(i) * static_cast<double>(src_len - 1) / static_cast<double>(dst_len - 1);
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& img, Index width, Index height) {
    require_valid(img);
    if (width <= 0 || height <= 0) throw InvalidArgument("resize target must be positive");
    if (width == img.cols() && height == img.rows()) return img;

    GrayImage out(height, width);
    for (Index y = 0; y < height; ++y) {
        const double sy = source_coord(y, img.rows(), height);
        const Index y0 = std::min<Index>(static_cast<Index>(sy), img.rows() - 1);
        const Index y1 = std::min<Index>(y0 + 1, img.rows() - 1);
        const double fy = sy - static_cast<double>(y0);
        for (Index x = 0; x < width; ++x) {
            const double sx = source_coord(x, img.cols(), width);
            const Index x0 = std::min<Index>(static_cast<Index>(sx), img.cols() - 1);
            const Index x1 = std::min<Index>(x0 + 1, img.cols() - 1);
            const double fx = sx - static_cast<double>(x0);
            const double top = (1.0 - fx) * img(y0, x0) + fx * img(y0, x1);
            const double bottom = (1.0 - fx) * img(y1, x0) + fx * img(y1, x1);
            out(y, x) = to_intensity((1.0 - fy) * top + fy * bottom);
        }
    }
    return out;
}

GrayImage resize_to_256(const GrayImage& img) { return resize_bilinear(img, 256, 256); }

std::vector<Block<std::uint8_t>> extract_range_blocks(const GrayImage& img, Index n) {
    require_valid(img);
    if (n <= 0 || img.rows() % n != 0 || img.cols() % n != 0)
        throw InvalidArgument("image dimensions must be divisible by the range size");
    std::vector<Block<std::uint8_t>> blocks;
    blocks.reserve(static_cast<std::size_t>((img.rows() / n) * (img.cols() / n)));
    for (Index r = 0; r < img.rows(); r += n)
        for (Index c = 0; c < img.cols(); c += n) blocks.push_back({r, c, img.block(r, c, n, n)});
    return blocks;
}

std::vector<Block<std::uint8_t>> extract_domain_blocks(const GrayImage& img, Index n, Index stride) {
    require_valid(img);
    if (n <= 0 || stride < 1) throw InvalidArgument("domain size and stride must be positive");
    if (2 * n > std::min(img.rows(), img.cols())) throw InvalidArgument("domain block larger than image");
    const Index rows = domain_positions(img.rows(), n, stride);
    const Index cols = domain_positions(img.cols(), n, stride);
    std::vector<Block<std::uint8_t>> blocks;
    blocks.reserve(static_cast<std::size_t>(rows * cols));
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            blocks.push_back({i * stride, j * stride, img.block(i * stride, j * stride, 2 * n, 2 * n)});
    return blocks;
}

double squared_error(const GrayImage& a, const GrayImage& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("image size mismatch");
    return (a.cast<double>() - b.cast<double>()).squaredNorm();
}

double psnr(const GrayImage& a, const GrayImage& b) {
    const double mse = squared_error(a, b) / static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace hp2ifs
