#include "hp2ifs/pgm.hpp"

#include <cctype>
#include <charconv>
#include <cstring>

#include "hp2ifs/binary_io.hpp"

namespace hp2ifs {

std::string encode_pgm(const GrayImage& img) {
    require_valid(img);
    std::string out = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
    const auto header = out.size();
    out.resize(header + static_cast<std::size_t>(img.size()));
    std::memcpy(out.data() + header, img.data(), static_cast<std::size_t>(img.size()));
    return out;
}

namespace {

class HeaderParser {
public:
    explicit HeaderParser(std::string_view s) : s_(s) {}

    void skip_space_and_comments() {
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    long number(const char* what) {
        skip_space_and_comments();
        long v = 0;
        const auto* begin = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
        if (ec != std::errc() || ptr == begin) throw FormatError(std::string("PGM: bad ") + what);
        pos_ += static_cast<std::size_t>(ptr - begin);
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void single_space() {
        if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_])))
            throw FormatError("PGM: missing separator before raster");
        ++pos_;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes.substr(0, 2) != "P5") throw FormatError("PGM: expected P5 magic");
    HeaderParser p(bytes);
    p.advance(2);
    const long width = p.number("width");
    const long height = p.number("height");
    const long maxval = p.number("maxval");
    if (width <= 0 || height <= 0) throw FormatError("PGM: non-positive dimensions");
    if (maxval != 255) throw FormatError("PGM: only maxval 255 is supported");
    p.single_space();
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - p.pos() < count) throw FormatError("PGM: truncated raster");
    GrayImage img(height, width);
    std::memcpy(img.data(), bytes.data() + p.pos(), count);
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    const auto data = io::read_file(path);
    try {
        return decode_pgm(data);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) { io::write_file(path, encode_pgm(img)); }

}  // namespace hp2ifs
