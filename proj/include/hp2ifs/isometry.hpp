#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "hp2ifs/image.hpp"

namespace hp2ifs {

/// The eight symmetries of the square. The numeric value is the id stored in
/// fractal codes. Rot90 is clockwise: pixel (r, c) moves to (c, N-1-r).
/// FlipH mirrors about the vertical axis, FlipV about the horizontal axis.
enum class Isometry : std::uint8_t {
    Identity = 0,
    Rot90 = 1,
    Rot180 = 2,
    Rot270 = 3,
    FlipH = 4,
    FlipV = 5,
    FlipMainDiag = 6,
    FlipAntiDiag = 7,
};

inline constexpr int kIsometryCount = 8;

inline constexpr std::array<Isometry, kIsometryCount> kAllIsometries = {
    Isometry::Identity, Isometry::Rot90,  Isometry::Rot180,       Isometry::Rot270,
    Isometry::FlipH,    Isometry::FlipV,  Isometry::FlipMainDiag, Isometry::FlipAntiDiag,
};

/// Linear part [a b; c d] acting on block-centered coordinates (2r-N+1, 2c-N+1).
using IsometryMatrix = std::array<int, 4>;

constexpr IsometryMatrix linear_part(Isometry t) {
    switch (t) {
        case Isometry::Identity: return {1, 0, 0, 1};
        case Isometry::Rot90: return {0, 1, -1, 0};
        case Isometry::Rot180: return {-1, 0, 0, -1};
        case Isometry::Rot270: return {0, -1, 1, 0};
        case Isometry::FlipH: return {1, 0, 0, -1};
        case Isometry::FlipV: return {-1, 0, 0, 1};
        case Isometry::FlipMainDiag: return {0, 1, 1, 0};
        case Isometry::FlipAntiDiag: return {0, -1, -1, 0};
    }
    return {1, 0, 0, 1};
}

/// The isometry equal to applying `first` and then `second`.
Isometry compose(Isometry first, Isometry second);

Isometry inverse(Isometry t);

std::string_view to_string(Isometry t);

/// Returns true and sets `out` when `id` names one of the eight variants.
bool isometry_from_id(int id, Isometry& out);

/// Permutes a square block according to `t`.
template <typename Derived>
Raster<typename Derived::Scalar> apply_isometry(const Eigen::MatrixBase<Derived>& b, Isometry t) {
    using Out = Raster<typename Derived::Scalar>;
    if (b.rows() != b.cols()) throw InvalidArgument("apply_isometry: block must be square");
    switch (t) {
        case Isometry::Identity: return Out(b);
        case Isometry::Rot90: return Out(b.transpose().rowwise().reverse());
        case Isometry::Rot180: return Out(b.reverse());
        case Isometry::Rot270: return Out(b.transpose().colwise().reverse());
        case Isometry::FlipH: return Out(b.rowwise().reverse());
        case Isometry::FlipV: return Out(b.colwise().reverse());
        case Isometry::FlipMainDiag: return Out(b.transpose());
        case Isometry::FlipAntiDiag: return Out(b.transpose().reverse());
    }
    return Out(b);
}

template <typename Scalar>
Block<Scalar> apply_isometry(const Block<Scalar>& b, Isometry t) {
    return {b.row, b.col, apply_isometry(b.data, t)};
}

}  // namespace hp2ifs
