#pragma once

// Reference encoder for tests. Deliberately shares no code with src/pifs.cpp:
// contraction, isometries, the least-squares fit, the quantizer and the
// distortion are all written out as plain loops over pixels.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hp2ifs/pifs.hpp"

namespace hp2ifs::support {

using Pixels = std::vector<std::vector<double>>;

inline Pixels contract(const GrayImage& img, long row, long col, long n) {
    Pixels out(n, std::vector<double>(n));
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            const double sum = img(row + 2 * i, col + 2 * j) + img(row + 2 * i, col + 2 * j + 1) +
                               img(row + 2 * i + 1, col + 2 * j) + img(row + 2 * i + 1, col + 2 * j + 1);
            // Round half away from zero on a non-negative value.
            out[i][j] = std::floor(sum / 4.0 + 0.5);
        }
    return out;
}

// Source pixel of output (i, j) under isometry id t, Rot90 clockwise.
inline double iso_pixel(const Pixels& b, int t, long i, long j) {
    const long m = static_cast<long>(b.size()) - 1;
    switch (t) {
        case 0: return b[i][j];
        case 1: return b[m - j][i];
        case 2: return b[m - i][m - j];
        case 3: return b[j][m - i];
        case 4: return b[i][m - j];
        case 5: return b[m - i][j];
        case 6: return b[j][i];
        default: return b[m - j][m - i];
    }
}

inline int ref_quantize(double v, double limit, int bits) {
    const int levels = 1 << bits;
    const double step = 2.0 * limit / levels;
    long q = std::lround((v + limit) / step);
    if (q < 0) q = 0;
    if (q > levels - 1) q = levels - 1;
    return static_cast<int>(q);
}

inline double ref_dequantize(int level, double limit, int bits) {
    return -limit + level * (2.0 * limit / (1 << bits));
}

inline FractalCode brute_force_encode(const GrayImage& img, const EncoderConfig& cfg,
                                      std::vector<double>* distortions = nullptr) {
    const long n = cfg.range_size;
    const long stride = cfg.domain_stride;
    const long h = img.rows();
    const long w = img.cols();
    FractalCode code;
    code.config = cfg;
    code.image_w = w;
    code.image_h = h;
    code.grid_w = w / n;
    code.grid_h = h / n;
    const long drows = (h - 2 * n) / stride + 1;
    const long dcols = (w - 2 * n) / stride + 1;
    std::vector<Pixels> pool;
    for (long i = 0; i < drows; ++i)
        for (long j = 0; j < dcols; ++j) pool.push_back(contract(img, i * stride, j * stride, n));

    for (long rr = 0; rr < h; rr += n) {
        for (long rc = 0; rc < w; rc += n) {
            double best = std::numeric_limits<double>::infinity();
            FractalCodeEntry best_entry;
            for (std::size_t d = 0; d < pool.size(); ++d) {
                for (int t = 0; t < 8; ++t) {
                    double mr = 0, md = 0;
                    for (long i = 0; i < n; ++i)
                        for (long j = 0; j < n; ++j) {
                            mr += img(rr + i, rc + j);
                            md += iso_pixel(pool[d], t, i, j);
                        }
                    mr /= n * n;
                    md /= n * n;
                    double cov = 0, var = 0;
                    for (long i = 0; i < n; ++i)
                        for (long j = 0; j < n; ++j) {
                            const double dv = iso_pixel(pool[d], t, i, j) - md;
                            cov += dv * (img(rr + i, rc + j) - mr);
                            var += dv * dv;
                        }
                    double s = var > 0 ? cov / var : 0.0;
                    s = std::min(cfg.s_max, std::max(-cfg.s_max, s));
                    const int sq = ref_quantize(s, cfg.s_max, cfg.s_bits);
                    const double sd = ref_dequantize(sq, cfg.s_max, cfg.s_bits);
                    const int oq = ref_quantize(mr - sd * md, 255.0, cfg.o_bits);
                    const double od = ref_dequantize(oq, 255.0, cfg.o_bits);
                    double err = 0;
                    for (long i = 0; i < n; ++i)
                        for (long j = 0; j < n; ++j) {
                            const double e = img(rr + i, rc + j) - (sd * iso_pixel(pool[d], t, i, j) + od);
                            err += e * e;
                        }
                    if (err < best - kDistortionTieTolerance) {
                        best = err;
                        best_entry = {static_cast<std::uint32_t>(d), static_cast<Isometry>(t),
                                      static_cast<std::uint8_t>(sq), static_cast<std::uint8_t>(oq)};
                    }
                }
            }
            code.entries.push_back(best_entry);
            if (distortions) distortions->push_back(best);
        }
    }
    return code;
}

inline GrayImage random_image(long rows, long cols, std::uint64_t seed) {
    std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + 1;
    GrayImage img(rows, cols);
    for (long i = 0; i < img.size(); ++i) {
        // splitmix64
        x += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        img.data()[i] = static_cast<std::uint8_t>((z ^ (z >> 31)) & 0xFF);
    }
    return img;
}

}  // namespace hp2ifs::support
