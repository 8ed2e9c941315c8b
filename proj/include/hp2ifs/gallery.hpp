#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hp2ifs/codevec.hpp"
#include "hp2ifs/pifs.hpp"

namespace hp2ifs {

/// Head orientation in degrees.
struct PoseLabel {
    double pitch = 0.0;
    double yaw = 0.0;
    double roll = 0.0;

    bool operator==(const PoseLabel&) const = default;
};

/// Throws InvalidArgument unless every angle is finite and within [-180, 180].
void require_valid(const PoseLabel& pose);

struct ManifestRow {
    std::string path;        ///< as written in the CSV; also used as source id
    PoseLabel pose;
    std::string subject;     ///< empty when absent
    std::size_t line = 0;    ///< 1-based line in the CSV file, 0 for in-memory rows

    bool operator==(const ManifestRow&) const = default;
};

/// Annotated image list. Relative paths resolve against `base_dir`.
struct Manifest {
    std::filesystem::path base_dir;
    std::vector<ManifestRow> rows;

    std::filesystem::path resolve(const ManifestRow& row) const;
};

/// Parses `path,pitch,yaw,roll,subject` CSV text. Throws FormatError naming the line.
Manifest parse_manifest(std::string_view text, std::filesystem::path base_dir = {});
Manifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const Manifest& m);

/// Subjects in order of first appearance; rows without a subject are skipped.
std::vector<std::string> subjects(const Manifest& m);

struct ManifestSplit {
    Manifest model;
    Manifest test;
};

/// Test rows are the rows of `subject`; the model is everything else.
ManifestSplit split_leave_one_subject_out(const Manifest& m, std::string_view subject);

/// Seeded Fisher-Yates shuffle (mt19937_64); the first ceil(fraction * n)
/// shuffled rows become the model. Both halves keep the manifest's row order.
ManifestSplit split_random(const Manifest& m, double model_fraction, std::uint64_t seed);

/// Row indices selected for the model by split_random, ascending.
std::vector<std::size_t> random_model_indices(std::size_t n, double model_fraction, std::uint64_t seed);

struct GalleryEntry {
    CodeVector vector;
    PoseLabel label;
    std::string source_id;
    std::string subject_id;

    bool operator==(const GalleryEntry&) const = default;
};

struct Gallery {
    EncoderConfig config;
    std::vector<GalleryEntry> entries;

    bool operator==(const Gallery&) const = default;
};

/// Working-resolution code vector of an arbitrary input image
/// (resize_to_256, encode, vectorize).
CodeVector describe(const GrayImage& img, const EncoderConfig& cfg, unsigned threads = 0);

/// In-memory labeled image, the unit of gallery construction.
struct LabeledImage {
    GrayImage image;
    PoseLabel label;
    std::string source_id;
    std::string subject_id;
};

/// One entry per image, in order. Images are encoded in parallel.
Gallery build_gallery(const std::vector<LabeledImage>& images, const EncoderConfig& cfg, unsigned threads = 0);

/// Loads every manifest image and builds the gallery. Any unreadable image
/// aborts the whole build with an error naming the row.
Gallery build_gallery(const Manifest& manifest, const EncoderConfig& cfg, unsigned threads = 0);

struct QueryResult {
    PoseLabel pose;
    std::size_t distance = 0;
    std::string source_id;
    std::size_t entry_index = 0;
};

/// Nearest entry by Hamming distance; ties keep the lowest entry index.
/// Throws EmptyModel for an empty gallery.
QueryResult query_vector(const Gallery& g, const CodeVector& v, HammingMode mode = HammingMode::Symbol,
                         unsigned threads = 1);

QueryResult query(const Gallery& g, const GrayImage& img, HammingMode mode = HammingMode::Symbol,
                  unsigned threads = 0);

/// "HPGL" file image: magic, version, config, entry count, symbols per vector,
/// then per entry pitch/yaw/roll as f64, source and subject as length-prefixed
/// UTF-8, and the symbols as u32. All little-endian.
std::string serialize_gallery(const Gallery& g);
Gallery deserialize_gallery(std::string_view bytes);

void save_gallery(const std::filesystem::path& path, const Gallery& g);
Gallery load_gallery(const std::filesystem::path& path);

}  // namespace hp2ifs
