#include "hp2ifs/gallery.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>

#include "hp2ifs/parallel.hpp"
#include "hp2ifs/pgm.hpp"
#include "hp2ifs/rng.hpp"

namespace hp2ifs {

void require_valid(const PoseLabel& pose) {
    for (double a : {pose.pitch, pose.yaw, pose.roll})
        if (!std::isfinite(a) || a < -180.0 || a > 180.0)
            throw InvalidArgument("pose angles must be finite and within [-180, 180]");
}

std::filesystem::path Manifest::resolve(const ManifestRow& row) const {
    const std::filesystem::path p(row.path);
    if (p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_angle(std::string_view field, std::size_t line, const char* name) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw FormatError("manifest line " + std::to_string(line) + ": bad " + name + " value '" +
                          std::string(field) + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

Manifest parse_manifest(std::string_view text, std::filesystem::path base_dir) {
    Manifest m;
    m.base_dir = std::move(base_dir);
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool has_subject = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            const bool ok = (fields.size() == 4 || fields.size() == 5) && fields[0] == "path" &&
                            fields[1] == "pitch" && fields[2] == "yaw" && fields[3] == "roll" &&
                            (fields.size() == 4 || fields[4] == "subject");
            if (!ok) throw FormatError("manifest line 1: expected header 'path,pitch,yaw,roll,subject'");
            header_seen = true;
            has_subject = fields.size() == 5;
            continue;
        }
        const std::size_t expected = has_subject ? 5 : 4;
        if (fields.size() != expected)
            throw FormatError("manifest line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                              " fields, found " + std::to_string(fields.size()));
        ManifestRow row;
        row.line = line_no;
        row.path = std::string(fields[0]);
        if (row.path.empty()) throw FormatError("manifest line " + std::to_string(line_no) + ": empty path");
        row.pose = {parse_angle(fields[1], line_no, "pitch"), parse_angle(fields[2], line_no, "yaw"),
                    parse_angle(fields[3], line_no, "roll")};
        try {
            require_valid(row.pose);
        } catch (const InvalidArgument& e) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        if (has_subject) row.subject = std::string(fields[4]);
        if (!seen.insert(row.path).second)
            throw FormatError("manifest line " + std::to_string(line_no) + ": duplicate path '" + row.path + "'");
        m.rows.push_back(std::move(row));
    }
    if (!header_seen) throw FormatError("manifest is empty (missing header)");
    return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
    try {
        return parse_manifest(io::read_file(path), path.parent_path());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string format_manifest(const Manifest& m) {
    std::string out = "path,pitch,yaw,roll,subject\n";
    for (const auto& r : m.rows)
        out += r.path + "," + format_double(r.pose.pitch) + "," + format_double(r.pose.yaw) + "," +
               format_double(r.pose.roll) + "," + r.subject + "\n";
    return out;
}

std::vector<std::string> subjects(const Manifest& m) {
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    for (const auto& r : m.rows)
        if (!r.subject.empty() && seen.insert(r.subject).second) out.push_back(r.subject);
    return out;
}

ManifestSplit split_leave_one_subject_out(const Manifest& m, std::string_view subject) {
    ManifestSplit out;
    out.model.base_dir = m.base_dir;
    out.test.base_dir = m.base_dir;
    for (const auto& r : m.rows) (r.subject == subject ? out.test : out.model).rows.push_back(r);
    if (out.test.rows.empty()) throw InvalidArgument("subject '" + std::string(subject) + "' has no manifest rows");
    return out;
}

std::vector<std::size_t> random_model_indices(std::size_t n, double model_fraction, std::uint64_t seed) {
    if (!(model_fraction > 0.0 && model_fraction < 1.0))
        throw InvalidArgument("model fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    portable_shuffle(order, seed);
    // Guard against 0.8 * 10 landing a hair above 8.
    const auto model_count =
        std::min(n, static_cast<std::size_t>(std::ceil(model_fraction * static_cast<double>(n) - 1e-9)));
    order.resize(model_count);
    std::sort(order.begin(), order.end());
    return order;
}

ManifestSplit split_random(const Manifest& m, double model_fraction, std::uint64_t seed) {
    const auto model = random_model_indices(m.rows.size(), model_fraction, seed);
    ManifestSplit out;
    out.model.base_dir = m.base_dir;
    out.test.base_dir = m.base_dir;
    std::size_t next = 0;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        if (next < model.size() && model[next] == i) {
            out.model.rows.push_back(m.rows[i]);
            ++next;
        } else {
            out.test.rows.push_back(m.rows[i]);
        }
    }
    return out;
}

CodeVector describe(const GrayImage& img, const EncoderConfig& cfg, unsigned threads) {
    return vectorize(encode(resize_to_256(img), cfg, threads));
}

Gallery build_gallery(const std::vector<LabeledImage>& images, const EncoderConfig& cfg, unsigned threads) {
    cfg.validate();
    Gallery g;
    g.config = cfg;
    g.entries.resize(images.size());
    std::vector<std::exception_ptr> errors(images.size());
    parallel_for(images.size(), threads, [&](std::size_t i) {
        try {
            const auto& item = images[i];
            require_valid(item.label);
            g.entries[i] = {describe(item.image, cfg, 1), item.label, item.source_id, item.subject_id};
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    // Report the first failing image regardless of the thread schedule.
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw InvalidArgument("image " + std::to_string(i) + " (" + images[i].source_id + "): " + e.what());
        }
    }
    return g;
}

Gallery build_gallery(const Manifest& manifest, const EncoderConfig& cfg, unsigned threads) {
    cfg.validate();
    std::vector<LabeledImage> images;
    images.reserve(manifest.rows.size());
    for (const auto& row : manifest.rows) {
        try {
            images.push_back({read_pgm(manifest.resolve(row)), row.pose, row.path, row.subject});
        } catch (const std::exception& e) {
            throw IoError("manifest line " + std::to_string(row.line) + " (" + row.path + "): " + e.what());
        }
    }
    return build_gallery(images, cfg, threads);
}

QueryResult query_vector(const Gallery& g, const CodeVector& v, HammingMode mode, unsigned threads) {
    if (g.entries.empty()) throw EmptyModel("gallery has no entries");
    std::vector<std::size_t> dist(g.entries.size());
    parallel_for(g.entries.size(), threads, [&](std::size_t i) { dist[i] = hamming(v, g.entries[i].vector, mode); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i)
        if (dist[i] < dist[best]) best = i;
    const auto& e = g.entries[best];
    return {e.label, dist[best], e.source_id, best};
}

QueryResult query(const Gallery& g, const GrayImage& img, HammingMode mode, unsigned threads) {
    if (g.entries.empty()) throw EmptyModel("gallery has no entries");
    return query_vector(g, describe(img, g.config, threads), mode, threads);
}

namespace {
constexpr std::string_view kGalleryMagic = "HPGL";
constexpr std::uint8_t kGalleryVersion = 1;
}  // namespace

std::string serialize_gallery(const Gallery& g) {
    const auto fp = config_fingerprint(g.config);
    const std::size_t len = g.entries.empty() ? 0 : g.entries.front().vector.size();
    io::Writer w;
    w.bytes(kGalleryMagic);
    w.u8(kGalleryVersion);
    write_config(w, g.config);
    w.u32(static_cast<std::uint32_t>(g.entries.size()));
    w.u32(static_cast<std::uint32_t>(len));
    for (const auto& e : g.entries) {
        if (e.vector.config_fingerprint != fp || e.vector.size() != len)
            throw InvalidArgument("gallery entry '" + e.source_id + "' does not match the gallery config");
        w.f64(e.label.pitch);
        w.f64(e.label.yaw);
        w.f64(e.label.roll);
        w.str(e.source_id);
        w.str(e.subject_id);
        for (auto s : e.vector.symbols) w.u32(s);
    }
    return w.take();
}

Gallery deserialize_gallery(std::string_view bytes) {
    io::Reader r(bytes);
    if (r.bytes(4) != kGalleryMagic) throw FormatError("not a gallery file (bad magic)");
    if (r.u8() != kGalleryVersion) throw FormatError("unsupported gallery version");
    Gallery g;
    g.config = read_config(r);
    const auto fp = config_fingerprint(g.config);
    const auto count = r.u32();
    const auto len = r.u32();
    if (len % kSymbolsPerBlock != 0) throw FormatError("gallery vector length is not a multiple of 4");
    // Cheapest possible entry: three angles, two empty strings, the symbols.
    if (static_cast<std::uint64_t>(count) * (32 + 4ull * len) > r.remaining())
        throw FormatError("gallery entry table is truncated");
    g.entries.resize(count);
    for (auto& e : g.entries) {
        e.label = {r.f64(), r.f64(), r.f64()};
        e.source_id = r.str();
        e.subject_id = r.str();
        e.vector.config_fingerprint = fp;
        e.vector.symbols.resize(len);
        for (auto& s : e.vector.symbols) s = r.u32();
    }
    if (!r.at_end()) throw FormatError("trailing bytes after gallery entries");
    return g;
}

void save_gallery(const std::filesystem::path& path, const Gallery& g) { io::write_file(path, serialize_gallery(g)); }

Gallery load_gallery(const std::filesystem::path& path) { return deserialize_gallery(io::read_file(path)); }

}  // namespace hp2ifs
