#include "hp2ifs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Geometry>

#include "hp2ifs/parallel.hpp"
#include "hp2ifs/rng.hpp"

namespace hp2ifs::synth {

namespace {

double deg(double a) { return a * std::numbers::pi / 180.0; }

double bilinear(const Eigen::MatrixXd& m, double r, double c) {
    const Index r0 = std::clamp<Index>(static_cast<Index>(std::floor(r)), 0, m.rows() - 1);
    const Index c0 = std::clamp<Index>(static_cast<Index>(std::floor(c)), 0, m.cols() - 1);
    const Index r1 = std::min<Index>(r0 + 1, m.rows() - 1);
    const Index c1 = std::min<Index>(c0 + 1, m.cols() - 1);
    const double fr = std::clamp(r - static_cast<double>(r0), 0.0, 1.0);
    const double fc = std::clamp(c - static_cast<double>(c0), 0.0, 1.0);
    return (1 - fr) * ((1 - fc) * m(r0, c0) + fc * m(r0, c1)) + fr * ((1 - fc) * m(r1, c0) + fc * m(r1, c1));
}

}  // namespace

GrayImage make_texture(Index size, std::uint64_t seed) {
    if (size < 2) throw InvalidArgument("texture size must be >= 2");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(size, size);
    double amplitude = 1.0;
    for (Index lattice : {4, 8, 16, 32}) {
        Eigen::MatrixXd grid(lattice + 1, lattice + 1);
        for (Index i = 0; i < grid.size(); ++i)
            grid.data()[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double scale = static_cast<double>(lattice) / static_cast<double>(size - 1);
        for (Index r = 0; r < size; ++r)
            for (Index c = 0; c < size; ++c) acc(r, c) += amplitude * bilinear(grid, r * scale, c * scale);
        amplitude *= 0.55;
    }
    const double lo = acc.minCoeff();
    const double hi = acc.maxCoeff();
    acc = (acc.array() - lo) / std::max(hi - lo, 1e-12) * 140.0 + 60.0;

    // Landmarks that break every symmetry of the square.
    const double s = static_cast<double>(size);
    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            const double y = r / s;
            const double x = c / s;
            if (std::hypot(x - 0.28, y - 0.30) < 0.11) acc(r, c) = 225.0;
            if (std::hypot(x - 0.70, y - 0.28) < 0.06) acc(r, c) = 45.0;
            if (y > 0.68 && y < 0.76 && x > 0.30 && x < 0.82) acc(r, c) = 50.0;
            if (x > 0.08 && x < 0.16 && y > 0.55 && y < 0.92 - 0.5 * (x - 0.08)) acc(r, c) = 215.0;
        }
    }
    GrayImage out(size, size);
    for (Index i = 0; i < out.size(); ++i) out.data()[i] = to_intensity(acc.data()[i]);
    return out;
}

GrayImage render_plate(const GrayImage& texture, const PoseLabel& pose, const RenderOptions& opts) {
    require_valid(texture);
    if (opts.size <= 0 || opts.supersample < 1 || !(opts.focal > 0.0) || !(opts.distance > 1.0))
        throw InvalidArgument("invalid render options");
    const Eigen::Matrix3d rot = (Eigen::AngleAxisd(deg(pose.roll), Eigen::Vector3d::UnitZ()) *
                                 Eigen::AngleAxisd(deg(pose.pitch), Eigen::Vector3d::UnitX()) *
                                 Eigen::AngleAxisd(deg(pose.yaw), Eigen::Vector3d::UnitY()))
                                    .toRotationMatrix();
    const Eigen::Vector3d center(0.0, 0.0, opts.distance);
    const Eigen::Vector3d normal = rot.col(2);
    const double plane_offset = normal.dot(center);
    const Eigen::MatrixXd tex = texture.cast<double>();
    const double half = static_cast<double>(opts.size) / 2.0;
    const int ss = opts.supersample;

    GrayImage out(opts.size, opts.size);
    for (Index y = 0; y < opts.size; ++y) {
        for (Index x = 0; x < opts.size; ++x) {
            double sum = 0.0;
            for (int sy = 0; sy < ss; ++sy) {
                for (int sx = 0; sx < ss; ++sx) {
                    const double px = static_cast<double>(x) + (sx + 0.5) / ss - half;
                    const double py = static_cast<double>(y) + (sy + 0.5) / ss - half;
                    const Eigen::Vector3d ray(px / opts.focal, py / opts.focal, 1.0);
                    const double denom = normal.dot(ray);
                    if (std::abs(denom) < 1e-12) continue;
                    const double t = plane_offset / denom;
                    if (t <= 0.0) continue;
                    const Eigen::Vector3d local = rot.transpose() * (t * ray - center);
                    if (std::abs(local.x()) > 1.0 || std::abs(local.y()) > 1.0) continue;
                    sum += bilinear(tex, (local.y() + 1.0) / 2.0 * static_cast<double>(tex.rows() - 1),
                                    (local.x() + 1.0) / 2.0 * static_cast<double>(tex.cols() - 1));
                }
            }
            out(y, x) = to_intensity(sum / (ss * ss));
        }
    }
    return out;
}

std::vector<PoseLabel> pose_grid(double pitch_limit, double yaw_limit, double roll_limit, double step) {
    if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
    auto axis = [step](double limit) {
        std::vector<double> v;
        const auto k = static_cast<long>(std::floor(limit / step + 1e-9));
        for (long i = -k; i <= k; ++i) v.push_back(static_cast<double>(i) * step);
        return v;
    };
    std::vector<PoseLabel> out;
    for (double p : axis(pitch_limit))
        for (double y : axis(yaw_limit))
            for (double r : axis(roll_limit)) out.push_back({p, y, r});
    return out;
}

std::vector<PoseLabel> sample_poses(const std::vector<PoseLabel>& grid, std::size_t count, std::uint64_t seed) {
    if (count > grid.size()) throw InvalidArgument("cannot sample more poses than the grid holds");
    std::vector<std::size_t> idx(grid.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    portable_shuffle(idx, seed);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    std::vector<PoseLabel> out;
    out.reserve(count);
    for (auto i : idx) out.push_back(grid[i]);
    return out;
}

std::vector<LabeledImage> render_dataset(const std::vector<PoseLabel>& poses, const RenderOptions& opts,
                                         unsigned threads) {
    const auto texture = make_texture(256, opts.texture_seed);
    std::vector<LabeledImage> out(poses.size());
    parallel_for(poses.size(), threads, [&](std::size_t i) {
        out[i] = {render_plate(texture, poses[i], opts), poses[i], "pose_" + std::to_string(i), {}};
    });
    return out;
}

}  // namespace hp2ifs::synth
