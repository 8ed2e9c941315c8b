#include "hp2ifs/pifs.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "hp2ifs/parallel.hpp"

namespace hp2ifs {

void EncoderConfig::validate() const {
    if (range_size < 2 || range_size % 2 != 0) throw InvalidArgument("range size must be even and >= 2");
    if (domain_stride < 1) throw InvalidArgument("domain stride must be >= 1");
    if (!(s_max > 0.0 && s_max <= 1.0)) throw InvalidArgument("s_max must lie in (0, 1]");
    const double scaled = s_max * 10000.0;
    if (std::abs(scaled - std::round(scaled)) > 1e-6)
        throw InvalidArgument("s_max must have at most four decimal places");
    if (s_bits < 1 || s_bits > 8) throw InvalidArgument("s_bits must lie in [1, 8]");
    if (o_bits < 1 || o_bits > 8) throw InvalidArgument("o_bits must lie in [1, 8]");
    if (decode_iterations < 0) throw InvalidArgument("decode iterations must be >= 0");
}

int quantize_level(double value, double limit, int bits) {
    const int levels = 1 << bits;
    const double step = limit / static_cast<double>(levels / 2);
    if (std::isnan(value)) value = 0.0;
    const double x = std::round((value + limit) / step);
    if (x <= 0.0) return 0;
    if (x >= levels - 1) return levels - 1;
    return static_cast<int>(x);
}

double dequantize_level(int level, double limit, int bits) {
    const int levels = 1 << bits;
    return -limit + static_cast<double>(level) * (limit / static_cast<double>(levels / 2));
}

double EncodeResult::mean_distortion() const {
    if (distortions.empty()) return 0.0;
    return std::accumulate(distortions.begin(), distortions.end(), 0.0) / static_cast<double>(distortions.size());
}

namespace {

// Contracted domain pool as columns of a dense matrix plus per-column sums.
struct DomainPool {
    Eigen::MatrixXd blocks;             // (N*N) x P, row-major flattening of each block
    std::vector<std::int64_t> sum;      // sum of d
    std::vector<double> centered_sq;    // sum of (d - mean)^2
};

DomainPool build_pool(const GrayImage& img, const EncoderConfig& cfg) {
    const Index n = cfg.range_size;
    const auto domains = extract_domain_blocks(img, n, cfg.domain_stride);
    DomainPool pool;
    pool.blocks.resize(n * n, static_cast<Index>(domains.size()));
    pool.sum.resize(domains.size());
    pool.centered_sq.resize(domains.size());
    for (std::size_t p = 0; p < domains.size(); ++p) {
        const auto contracted = downsample_2x(domains[p].data);
        std::int64_t s = 0;
        std::int64_t sq = 0;
        for (Index k = 0; k < contracted.size(); ++k) {
            const std::int64_t v = contracted.data()[k];
            pool.blocks(k, static_cast<Index>(p)) = static_cast<double>(v);
            s += v;
            sq += v * v;
        }
        pool.sum[p] = s;
        pool.centered_sq[p] = static_cast<double>(n * n * sq - s * s) / static_cast<double>(n * n);
    }
    return pool;
}

constexpr Index kRangesPerChunk = 32;

}  // namespace

EncodeResult encode_detailed(const GrayImage& img, const EncoderConfig& cfg, unsigned threads) {
    cfg.validate();
    require_valid(img);
    const Index n = cfg.range_size;
    if (img.rows() % n != 0 || img.cols() % n != 0)
        throw InvalidArgument("image dimensions must be divisible by the range size");
    if (2 * n > std::min(img.rows(), img.cols())) throw InvalidArgument("domain pool is empty");

    const DomainPool pool = build_pool(img, cfg);
    const auto ranges = extract_range_blocks(img, n);
    const Index pool_size = pool.blocks.cols();
    const Index pixels = n * n;
    const double npx = static_cast<double>(pixels);

    EncodeResult result;
    FractalCode& code = result.code;
    code.config = cfg;
    code.image_w = img.cols();
    code.image_h = img.rows();
    code.grid_w = img.cols() / n;
    code.grid_h = img.rows() / n;
    code.entries.resize(ranges.size());
    result.distortions.resize(ranges.size());

    const Index range_count = static_cast<Index>(ranges.size());
    const Index chunks = (range_count + kRangesPerChunk - 1) / kRangesPerChunk;

    parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t chunk) {
        const Index first = static_cast<Index>(chunk) * kRangesPerChunk;
        const Index count = std::min(kRangesPerChunk, range_count - first);

        // Column 8k+t holds range k under inverse(t), so that
        // <domain, inverse(t)(range)> = <t(domain), range>.
        Eigen::MatrixXd variants(pixels, count * kIsometryCount);
        for (Index k = 0; k < count; ++k) {
            const auto& range = ranges[static_cast<std::size_t>(first + k)].data;
            for (int t = 0; t < kIsometryCount; ++t) {
                const auto v = apply_isometry(range, inverse(kAllIsometries[t]));
                variants.col(k * kIsometryCount + t) =
                    Eigen::Map<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>(v.data(), pixels)
                        .cast<double>();
            }
        }
        // Integer-valued operands keep every dot product exact.
        const Eigen::MatrixXd dots = pool.blocks.transpose() * variants;

        for (Index k = 0; k < count; ++k) {
            const auto& range = ranges[static_cast<std::size_t>(first + k)].data;
            std::int64_t sr = 0;
            std::int64_t srr = 0;
            for (Index i = 0; i < range.size(); ++i) {
                const std::int64_t v = range.data()[i];
                sr += v;
                srr += v * v;
            }
            const double syy = static_cast<double>(pixels * srr - sr * sr) / npx;
            const double mean_r = static_cast<double>(sr) / npx;

            double best = std::numeric_limits<double>::infinity();
            FractalCodeEntry best_entry;
            for (Index p = 0; p < pool_size; ++p) {
                const std::int64_t sd = pool.sum[static_cast<std::size_t>(p)];
                const double sxx = pool.centered_sq[static_cast<std::size_t>(p)];
                const double mean_d = static_cast<double>(sd) / npx;
                for (int t = 0; t < kIsometryCount; ++t) {
                    const auto srd = static_cast<std::int64_t>(std::llround(dots(p, k * kIsometryCount + t)));
                    const double sxy = static_cast<double>(pixels * srd - sr * sd) / npx;
                    const double s = sxx > 0.0 ? std::clamp(sxy / sxx, -cfg.s_max, cfg.s_max) : 0.0;
                    const int sq = quantize_s(s, cfg);
                    const double s_deq = dequantize_s(sq, cfg);
                    const int oq = quantize_o(mean_r - s_deq * mean_d, cfg);
                    const double o_deq = dequantize_o(oq, cfg);
                    const double bias = mean_r - s_deq * mean_d - o_deq;
                    const double err = syy - 2.0 * s_deq * sxy + s_deq * s_deq * sxx + npx * bias * bias;
                    if (err < best - kDistortionTieTolerance) {
                        best = err;
                        best_entry = {static_cast<std::uint32_t>(p), kAllIsometries[t],
                                      static_cast<std::uint8_t>(sq), static_cast<std::uint8_t>(oq)};
                    }
                }
            }
            code.entries[static_cast<std::size_t>(first + k)] = best_entry;
            result.distortions[static_cast<std::size_t>(first + k)] = std::max(0.0, best);
        }
    });
    return result;
}

namespace {

void check_code(const FractalCode& code) {
    code.config.validate();
    const Index n = code.config.range_size;
    if (code.image_w <= 0 || code.image_h <= 0 || code.image_w % n != 0 || code.image_h % n != 0)
        throw FormatError("code image size is not a multiple of the range size");
    if (code.grid_w != code.image_w / n || code.grid_h != code.image_h / n)
        throw FormatError("code grid does not match image size");
    if (2 * n > std::min(code.image_w, code.image_h)) throw FormatError("code has an empty domain pool");
    if (code.entries.size() != static_cast<std::size_t>(code.grid_w * code.grid_h))
        throw FormatError("code entry count does not match grid");
    const auto pool = static_cast<std::uint64_t>(code.domain_count());
    for (const auto& e : code.entries) {
        if (e.domain_index >= pool) throw FormatError("domain index out of range");
        if (static_cast<int>(e.isometry) >= kIsometryCount) throw FormatError("isometry id out of range");
        if (e.s_q >= (1u << code.config.s_bits) || e.o_q >= (1u << code.config.o_bits))
            throw FormatError("quantization level out of range");
    }
}

}  // namespace

GrayImage decode_step(const FractalCode& code, const GrayImage& previous) {
    check_code(code);
    if (previous.cols() != code.image_w || previous.rows() != code.image_h)
        throw InvalidArgument("decode: initial image size does not match code");
    const Index n = code.config.range_size;
    const Index stride = code.config.domain_stride;
    const Index dcols = code.domain_cols();
    GrayImage next(code.image_h, code.image_w);
    for (Index k = 0; k < static_cast<Index>(code.entries.size()); ++k) {
        const auto& e = code.entries[static_cast<std::size_t>(k)];
        const Index dr = (static_cast<Index>(e.domain_index) / dcols) * stride;
        const Index dc = (static_cast<Index>(e.domain_index) % dcols) * stride;
        const auto mapped = apply_isometry(downsample_2x(previous.block(dr, dc, 2 * n, 2 * n)), e.isometry);
        const double s = dequantize_s(e.s_q, code.config);
        const double o = dequantize_o(e.o_q, code.config);
        next.block((k / code.grid_w) * n, (k % code.grid_w) * n, n, n) =
            mapped.unaryExpr([s, o](std::uint8_t v) { return to_intensity(s * v + o); });
    }
    return next;
}

GrayImage decode(const FractalCode& code, const GrayImage& initial, int iterations) {
    if (iterations < 0) throw InvalidArgument("iterations must be >= 0");
    check_code(code);
    if (initial.cols() != code.image_w || initial.rows() != code.image_h)
        throw InvalidArgument("decode: initial image size does not match code");
    GrayImage current = initial;
    for (int i = 0; i < iterations; ++i) current = decode_step(code, current);
    return current;
}

GrayImage decode(const FractalCode& code, int iterations) {
    check_code(code);
    return decode(code, GrayImage::Constant(code.image_h, code.image_w, 128), iterations);
}

void write_config(io::Writer& w, const EncoderConfig& cfg) {
    cfg.validate();
    w.u32(static_cast<std::uint32_t>(cfg.range_size));
    w.u32(static_cast<std::uint32_t>(cfg.domain_stride));
    w.u32(static_cast<std::uint32_t>(std::lround(cfg.s_max * 10000.0)));
    w.u8(static_cast<std::uint8_t>(cfg.s_bits));
    w.u8(static_cast<std::uint8_t>(cfg.o_bits));
}

EncoderConfig read_config(io::Reader& r) {
    EncoderConfig cfg;
    const auto n = r.u32();
    const auto stride = r.u32();
    const auto s_fixed = r.u32();
    if (n > 1u << 20 || stride > 1u << 20 || s_fixed > 10000) throw FormatError("config field out of range");
    cfg.range_size = static_cast<int>(n);
    cfg.domain_stride = static_cast<int>(stride);
    cfg.s_max = static_cast<double>(s_fixed) / 10000.0;
    cfg.s_bits = r.u8();
    cfg.o_bits = r.u8();
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid encoder config: ") + e.what());
    }
    return cfg;
}

std::uint64_t config_fingerprint(const EncoderConfig& cfg) {
    io::Writer w;
    write_config(w, cfg);
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : w.data()) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {
constexpr std::string_view kCodeMagic = "HPIF";
constexpr std::uint8_t kCodeVersion = 1;
}  // namespace

std::string serialize_code(const FractalCode& code) {
    check_code(code);
    io::Writer w;
    w.bytes(kCodeMagic);
    w.u8(kCodeVersion);
    write_config(w, code.config);
    w.u32(static_cast<std::uint32_t>(code.image_w));
    w.u32(static_cast<std::uint32_t>(code.image_h));
    w.u32(static_cast<std::uint32_t>(code.grid_w));
    w.u32(static_cast<std::uint32_t>(code.grid_h));
    for (const auto& e : code.entries) {
        w.u32(e.domain_index);
        w.u8(static_cast<std::uint8_t>(e.isometry));
        w.u8(e.s_q);
        w.u8(e.o_q);
    }
    return w.take();
}

FractalCode deserialize_code(std::string_view bytes) {
    io::Reader r(bytes);
    if (r.bytes(4) != kCodeMagic) throw FormatError("not a fractal code file (bad magic)");
    if (r.u8() != kCodeVersion) throw FormatError("unsupported fractal code version");
    FractalCode code;
    code.config = read_config(r);
    code.image_w = r.u32();
    code.image_h = r.u32();
    code.grid_w = r.u32();
    code.grid_h = r.u32();
    const auto count = static_cast<std::uint64_t>(code.grid_w) * static_cast<std::uint64_t>(code.grid_h);
    if (count * 7 != r.remaining()) throw FormatError("fractal code entry table has the wrong length");
    code.entries.resize(count);
    for (auto& e : code.entries) {
        e.domain_index = r.u32();
        const auto iso = r.u8();
        if (!isometry_from_id(iso, e.isometry)) throw FormatError("isometry id out of range");
        e.s_q = r.u8();
        e.o_q = r.u8();
    }
    check_code(code);
    return code;
}

void save_code(const std::filesystem::path& path, const FractalCode& code) {
    io::write_file(path, serialize_code(code));
}

FractalCode load_code(const std::filesystem::path& path) { return deserialize_code(io::read_file(path)); }

}  // namespace hp2ifs
