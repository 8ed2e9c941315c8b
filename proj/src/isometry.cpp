#include "hp2ifs/isometry.hpp"

namespace hp2ifs {

namespace {

constexpr IsometryMatrix multiply(const IsometryMatrix& a, const IsometryMatrix& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Isometry from_matrix(const IsometryMatrix& m) {
    for (Isometry t : kAllIsometries)
        if (linear_part(t) == m) return t;
    throw InvalidArgument("matrix is not a square symmetry");
}

}  // namespace

Isometry compose(Isometry first, Isometry second) {
    return from_matrix(multiply(linear_part(second), linear_part(first)));
}

Isometry inverse(Isometry t) {
    // Orthogonal, so the inverse is the transpose.
    const auto m = linear_part(t);
    return from_matrix({m[0], m[2], m[1], m[3]});
}

std::string_view to_string(Isometry t) {
    switch (t) {
        case Isometry::Identity: return "Identity";
        case Isometry::Rot90: return "Rot90";
        case Isometry::Rot180: return "Rot180";
        case Isometry::Rot270: return "Rot270";
        case Isometry::FlipH: return "FlipH";
        case Isometry::FlipV: return "FlipV";
        case Isometry::FlipMainDiag: return "FlipMainDiag";
        case Isometry::FlipAntiDiag: return "FlipAntiDiag";
    }
    return "?";
}

bool isometry_from_id(int id, Isometry& out) {
    if (id < 0 || id >= kIsometryCount) return false;
    out = static_cast<Isometry>(id);
    return true;
}

}  // namespace hp2ifs
