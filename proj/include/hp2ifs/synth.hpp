#pragma once

#include <cstdint>
#include <vector>

#include "hp2ifs/gallery.hpp"

namespace hp2ifs::synth {

/// Pinhole rendering of a textured square plate rotated about its center.
/// Pixels that miss the plate are black, like a masked face crop.
struct RenderOptions {
    Index size = 256;              ///< output is size x size
    double focal = 200.0;          ///< focal length in pixels
    double distance = 2.2;         ///< camera to plate center, in plate half-widths
    int supersample = 2;           ///< samples per pixel along each axis
    std::uint64_t texture_seed = 1;
};

/// Deterministic grayscale texture in [40, 230] with asymmetric landmarks.
GrayImage make_texture(Index size, std::uint64_t seed);

/// Rotation order: roll (z) * pitch (x) * yaw (y), angles in degrees.
GrayImage render_plate(const GrayImage& texture, const PoseLabel& pose, const RenderOptions& opts = {});

/// Every pose on a regular grid, pitch-major then yaw then roll.
std::vector<PoseLabel> pose_grid(double pitch_limit, double yaw_limit, double roll_limit, double step);

/// `count` distinct poses drawn from `grid` with a seeded shuffle, in grid order.
std::vector<PoseLabel> sample_poses(const std::vector<PoseLabel>& grid, std::size_t count, std::uint64_t seed);

/// Renders each pose; source ids are "pose_<index>".
std::vector<LabeledImage> render_dataset(const std::vector<PoseLabel>& poses, const RenderOptions& opts = {},
                                         unsigned threads = 0);

}  // namespace hp2ifs::synth
