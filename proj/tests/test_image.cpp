#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hp2ifs/image.hpp"
#include "hp2ifs/isometry.hpp"
#include "hp2ifs/pgm.hpp"
#include "support/brute_force_encoder.hpp"

using namespace hp2ifs;

namespace {

Raster<std::uint8_t> mat2(int a, int b, int c, int d) {
    Raster<std::uint8_t> m(2, 2);
    m << a, b, c, d;
    return m;
}

// Independent bilinear reference: explicit weights on the four neighbours.
double reference_bilinear(const GrayImage& src, long dst_w, long dst_h, long x, long y) {
    const double sx = dst_w > 1 ? x * double(src.cols() - 1) / double(dst_w - 1) : 0.0;
    const double sy = dst_h > 1 ? y * double(src.rows() - 1) / double(dst_h - 1) : 0.0;
    const long x0 = long(std::floor(sx)), y0 = long(std::floor(sy));
    const long x1 = std::min<long>(x0 + 1, src.cols() - 1), y1 = std::min<long>(y0 + 1, src.rows() - 1);
    const double ax = sx - x0, ay = sy - y0;
    return src(y0, x0) * (1 - ax) * (1 - ay) + src(y0, x1) * ax * (1 - ay) + src(y1, x0) * (1 - ax) * ay +
           src(y1, x1) * ax * ay;
}

}  // namespace

TEST(Resize, IdentityAt256) {
    const auto img = support::random_image(256, 256, 3);
    EXPECT_EQ(resize_to_256(img), img);
}

TEST(Resize, ConstantStaysConstant) {
    const GrayImage img = GrayImage::Constant(512, 512, 77);
    const auto out = resize_to_256(img);
    ASSERT_EQ(out.rows(), 256);
    ASSERT_EQ(out.cols(), 256);
    EXPECT_TRUE((out.array() == 77).all());
}

TEST(Resize, GradientMatchesReferenceAndKeepsCorners) {
    GrayImage img(128, 64);  // 64 wide, 128 tall
    for (Index r = 0; r < img.rows(); ++r)
        for (Index c = 0; c < img.cols(); ++c) img(r, c) = static_cast<std::uint8_t>((3 * c + r) % 256);
    const auto out = resize_to_256(img);
    EXPECT_EQ(out(0, 0), img(0, 0));
    EXPECT_EQ(out(0, 255), img(0, 63));
    EXPECT_EQ(out(255, 0), img(127, 0));
    EXPECT_EQ(out(255, 255), img(127, 63));
    for (long y = 0; y < 256; ++y)
        for (long x = 0; x < 256; ++x)
            ASSERT_EQ(out(y, x), to_intensity(reference_bilinear(img, 256, 256, x, y))) << y << "," << x;
}

TEST(Resize, OutputStaysWithinInputRange) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const long w = 1 + rng() % 90, h = 1 + rng() % 90;
        const auto img = support::random_image(h, w, trial);
        const auto out = resize_to_256(img);
        EXPECT_GE(out.minCoeff(), img.minCoeff());
        EXPECT_LE(out.maxCoeff(), img.maxCoeff());
    }
}

TEST(Downsample, Examples) {
    EXPECT_EQ(downsample_2x(mat2(1, 2, 3, 4))(0, 0), 3);
    const Raster<std::uint8_t> nine = Raster<std::uint8_t>::Constant(4, 4, 9);
    EXPECT_EQ(downsample_2x(nine), Raster<std::uint8_t>::Constant(2, 2, 9));
    Raster<std::uint8_t> checker(16, 16);
    for (Index r = 0; r < 16; ++r)
        for (Index c = 0; c < 16; ++c) checker(r, c) = (r + c) % 2 ? 255 : 0;
    EXPECT_EQ(downsample_2x(checker), Raster<std::uint8_t>::Constant(8, 8, 128));
}

TEST(Downsample, OddSizeRejected) {
    const Raster<std::uint8_t> odd = Raster<std::uint8_t>::Zero(3, 3);
    EXPECT_THROW(downsample_2x(odd), InvalidArgument);
}

TEST(Downsample, ConstantBlocksStayConstant) {
    for (int v = 0; v < 256; v += 17)
        for (int n : {2, 4, 8, 16})
            EXPECT_EQ(downsample_2x(Raster<std::uint8_t>::Constant(n, n, v)),
                      Raster<std::uint8_t>::Constant(n / 2, n / 2, v));
}

TEST(Isometry, Rot90IsClockwise) {
    EXPECT_EQ(apply_isometry(mat2(1, 2, 3, 4), Isometry::Rot90), mat2(3, 1, 4, 2));
    EXPECT_EQ(apply_isometry(mat2(1, 2, 3, 4), Isometry::Identity), mat2(1, 2, 3, 4));
    EXPECT_EQ(apply_isometry(mat2(1, 2, 3, 4), Isometry::FlipH), mat2(2, 1, 4, 3));
    EXPECT_EQ(apply_isometry(mat2(1, 2, 3, 4), Isometry::FlipV), mat2(3, 4, 1, 2));
    EXPECT_EQ(apply_isometry(mat2(1, 2, 3, 4), Isometry::FlipMainDiag), mat2(1, 3, 2, 4));
    EXPECT_EQ(apply_isometry(mat2(1, 2, 3, 4), Isometry::FlipAntiDiag), mat2(4, 2, 3, 1));
}

TEST(Isometry, MatchesExplicitCoordinateMaps) {
    const auto img = support::random_image(6, 6, 5);
    support::Pixels px(6, std::vector<double>(6));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) px[i][j] = img(i, j);
    for (Isometry t : kAllIsometries) {
        const auto out = apply_isometry(img, t);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) ASSERT_EQ(out(i, j), support::iso_pixel(px, int(t), i, j)) << to_string(t);
    }
}

TEST(Isometry, GroupLawsExhaustive) {
    const auto b = support::random_image(8, 8, 9);
    for (Isometry x : kAllIsometries) {
        EXPECT_EQ(compose(x, inverse(x)), Isometry::Identity);
        EXPECT_EQ(apply_isometry(apply_isometry(b, x), inverse(x)), b);
        for (Isometry y : kAllIsometries)
            EXPECT_EQ(apply_isometry(apply_isometry(b, x), y), apply_isometry(b, compose(x, y)))
                << to_string(x) << " then " << to_string(y);
    }
    EXPECT_EQ(compose(Isometry::Rot90, Isometry::Rot90), Isometry::Rot180);
    auto r = b;
    for (int i = 0; i < 4; ++i) r = apply_isometry(r, Isometry::Rot90);
    EXPECT_EQ(r, b);
}

TEST(Isometry, PreservesIntensityMultiset) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto b = support::random_image(4 + 2 * (seed % 4), 4 + 2 * (seed % 4), seed);
        std::vector<std::uint8_t> ref(b.data(), b.data() + b.size());
        std::sort(ref.begin(), ref.end());
        for (Isometry t : kAllIsometries) {
            const auto out = apply_isometry(b, t);
            std::vector<std::uint8_t> got(out.data(), out.data() + out.size());
            std::sort(got.begin(), got.end());
            ASSERT_EQ(got, ref);
        }
    }
}

TEST(Isometry, NonSquareRejected) {
    const Raster<std::uint8_t> m = Raster<std::uint8_t>::Zero(2, 3);
    EXPECT_THROW(apply_isometry(m, Isometry::Rot90), InvalidArgument);
}

TEST(RangeBlocks, CountsAndOrder) {
    EXPECT_EQ(extract_range_blocks(GrayImage::Zero(256, 256), 8).size(), 1024u);
    const auto whole = support::random_image(8, 8, 1);
    const auto one = extract_range_blocks(whole, 8);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].data, whole);
    const auto four = extract_range_blocks(GrayImage::Zero(16, 16), 8);
    ASSERT_EQ(four.size(), 4u);
    EXPECT_EQ(four[0].row, 0);
    EXPECT_EQ(four[0].col, 0);
    EXPECT_EQ(four[1].row, 0);
    EXPECT_EQ(four[1].col, 8);
    EXPECT_EQ(four[3].row, 8);
    EXPECT_EQ(four[3].col, 8);
}

TEST(RangeBlocks, ReassembleToInput) {
    const auto img = support::random_image(24, 40, 4);
    GrayImage rebuilt = GrayImage::Zero(24, 40);
    for (const auto& b : extract_range_blocks(img, 8)) rebuilt.block(b.row, b.col, 8, 8) = b.data;
    EXPECT_EQ(rebuilt, img);
}

TEST(RangeBlocks, IndivisibleRejected) {
    EXPECT_THROW(extract_range_blocks(GrayImage::Zero(20, 16), 8), InvalidArgument);
}

TEST(DomainBlocks, Counts) {
    EXPECT_EQ(extract_domain_blocks(GrayImage::Zero(256, 256), 8, 8).size(), 961u);
    EXPECT_EQ(extract_domain_blocks(GrayImage::Zero(16, 16), 8, 8).size(), 1u);
    EXPECT_EQ(extract_domain_blocks(GrayImage::Zero(256, 256), 8, 16).size(), 256u);
    const auto blocks = extract_domain_blocks(GrayImage::Zero(40, 24), 4, 4);
    EXPECT_EQ(blocks.size(), std::size_t((40 - 8) / 4 + 1) * ((24 - 8) / 4 + 1));
    EXPECT_EQ(blocks[1].row, 0);
    EXPECT_EQ(blocks[1].col, 4);
}

TEST(DomainBlocks, TooLargeRejected) {
    EXPECT_THROW(extract_domain_blocks(GrayImage::Zero(8, 8), 8, 8), InvalidArgument);
    EXPECT_THROW(extract_domain_blocks(GrayImage::Zero(16, 16), 4, 0), InvalidArgument);
}

TEST(Pgm, RoundTripIsByteExact) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto img = support::random_image(1 + seed * 7, 3 + seed * 5, seed);
        const auto bytes = encode_pgm(img);
        const auto back = decode_pgm(bytes);
        EXPECT_EQ(back, img);
        EXPECT_EQ(encode_pgm(back), bytes);
    }
}

TEST(Pgm, CommentsAndErrors) {
    std::string text = "P5\n# made by hand\n2 1\n# another\n255\n";
    text += std::string("\x05\xfa", 2);
    const auto img = decode_pgm(text);
    ASSERT_EQ(img.cols(), 2);
    EXPECT_EQ(img(0, 1), 0xfa);
    EXPECT_THROW(decode_pgm("P2\n1 1\n255\n0"), FormatError);
    EXPECT_THROW(decode_pgm("P5\n2 2\n255\nab"), FormatError);
    EXPECT_THROW(decode_pgm("P5\n1 1\n65535\n\0\0"), FormatError);
    EXPECT_THROW(read_pgm("/nonexistent/file.pgm"), IoError);
}

TEST(Metrics, Psnr) {
    const GrayImage a = GrayImage::Constant(4, 4, 10);
    GrayImage b = a;
    EXPECT_TRUE(std::isinf(psnr(a, b)));
    b(0, 0) = 14;  // MSE = 1
    EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(65025.0), 1e-9);
}
