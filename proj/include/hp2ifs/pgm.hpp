#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hp2ifs/image.hpp"

namespace hp2ifs {

/// Binary PGM (P5, maxval 255). Header written as "P5\n<w> <h>\n255\n".
std::string encode_pgm(const GrayImage& img);

/// Parses a P5 raster with maxval 255. Header comments are skipped.
GrayImage decode_pgm(std::string_view bytes);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace hp2ifs
