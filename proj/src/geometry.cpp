#include "circumfeas/geometry.hpp"

#include "circumfeas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace circumfeas {

void require_finite(const Point &p, const char *what) {
    if (!p.allFinite())
        throw InvalidArgument(std::string(what) + ": non-finite coordinate");
}

void require_same_dim(const Point &a, const Point &b, const char *what) {
    if (a.size() != b.size())
        throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                              std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
}

AffineManifold::AffineManifold(Point anchor, const std::vector<Point> &directions)
    : anchor_(std::move(anchor)) {
    require_finite(anchor_, "AffineManifold anchor");
    if (directions.size() > static_cast<std::size_t>(anchor_.size()))
        throw InvalidArgument("AffineManifold: more directions than ambient dimension");
    for (const auto &d : directions) {
        require_same_dim(anchor_, d, "AffineManifold direction");
        require_finite(d, "AffineManifold direction");
        const double scale = d.norm();
        if (scale == 0.0)
            continue;
        Point v = d / scale;
        // two passes of MGS keep the basis orthonormal to ~1e-16
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &b : basis_)
                v -= b.dot(v) * b;
        const double nv = v.norm();
        if (nv <= 1e-10)
            continue;
        basis_.push_back(v / nv);
    }
}

AffineManifold AffineManifold::hyperplane(const Point &normal, double offset) {
    require_finite(normal, "hyperplane normal");
    const double nn = normal.squaredNorm();
    if (nn == 0.0)
        throw InvalidArgument("hyperplane: zero normal");
    const int n = static_cast<int>(normal.size());
    Point anchor = normal * (offset / nn);
    std::vector<Point> dirs;
    dirs.reserve(n);
    for (int i = 0; i < n; ++i) {
        Point e = Point::Zero(n);
        e[i] = 1.0;
        dirs.push_back(e - normal * (normal[i] / nn));
    }
    return AffineManifold(std::move(anchor), dirs);
}

AffineManifold AffineManifold::coordinate(Point anchor, const std::vector<int> &axes) {
    const auto n = static_cast<int>(anchor.size());
    std::vector<Point> dirs;
    for (int axis : axes) {
        if (axis < 0 || axis >= n)
            throw InvalidArgument("coordinate manifold: axis out of range");
        Point e = Point::Zero(n);
        e[axis] = 1.0;
        dirs.push_back(std::move(e));
    }
    return AffineManifold(std::move(anchor), dirs);
}

Point AffineManifold::parallel_part(const Point &v) const {
    Point out = Point::Zero(v.size());
    for (const auto &b : basis_)
        out += b.dot(v) * b;
    return out;
}

Point AffineManifold::normal_part(const Point &v) const {
    // Sum the parallel part first so that coordinates orthogonal to every
    // basis vector come back exactly.
    return v - parallel_part(v);
}

Point affine_project(const AffineManifold &m, const Point &p) {
    if (p.size() != m.dim_ambient())
        throw InvalidArgument("affine_project: dimension mismatch");
    return m.anchor() + m.parallel_part(p - m.anchor());
}

namespace {

struct EdgeAngle {
    double sin2;
    double cos;
    double one_minus_cos;
};

// Angle between two non-zero vectors from the half-angle construction:
// with A = |a^ - b^| and B = |a^ + b^|, tan(theta / 2) = A / B.
EdgeAngle edge_angle(const Point &a, double la, const Point &b, double lb) {
    const Point ua = a / la;
    const Point ub = b / lb;
    const double A2 = (ua - ub).squaredNorm();
    const double B2 = (ua + ub).squaredNorm();
    const double den = A2 + B2;
    const double s = 2.0 * std::sqrt(A2) * std::sqrt(B2) / den;
    return {s * s, (B2 - A2) / den, 2.0 * A2 / den};
}

} // namespace

Point circumcenter_offset(const Point &a, const Point &b,
                          const CircumcenterTolerances &tol) {
    require_same_dim(a, b, "circumcenter");
    require_finite(a, "circumcenter");
    require_finite(b, "circumcenter");
    const double la = a.norm();
    const double lb = b.norm();
    const bool x_is_y = la <= tol.coincide;
    const bool x_is_z = lb <= tol.coincide;
    if (x_is_y && x_is_z)
        return Point::Zero(a.size());
    if (x_is_y)
        return 0.5 * b;
    if (x_is_z || (a - b).norm() <= tol.coincide)
        return 0.5 * a;

    const EdgeAngle ang = edge_angle(a, la, b, lb);
    if (!(ang.sin2 > tol.singular))
        throw DegenerateCircumcenter("circumcenter: three distinct collinear points");

    // La - Lb cos(theta), written to avoid cancellation when cos > 0.
    auto lead = [&](double l1, double l2) {
        return ang.cos <= 0.0 ? l1 - l2 * ang.cos : (l1 - l2) + l2 * ang.one_minus_cos;
    };
    const double alpha = lead(la, lb) / (2.0 * la * ang.sin2);
    const double beta = lead(lb, la) / (2.0 * lb * ang.sin2);
    Point c = alpha * a + beta * b;
    if (!c.allFinite())
        throw DegenerateCircumcenter("circumcenter: non-finite solution");
    return c;
}

Point circumcenter3(const Point &x, const Point &y, const Point &z) {
    require_same_dim(x, y, "circumcenter3");
    require_same_dim(x, z, "circumcenter3");
    require_finite(x, "circumcenter3");
    require_finite(y, "circumcenter3");
    require_finite(z, "circumcenter3");
    const double scale = std::max({x.norm(), y.norm(), z.norm()});
    CircumcenterTolerances tol;
    tol.coincide = 1e-14 * (1.0 + scale);
    tol.singular = 1e-12;
    // y == z with x distinct is handled inside; x == z with y distinct too.
    return x + circumcenter_offset(y - x, z - x, tol);
}

double triangle_flatness(const Point &x, const Point &y, const Point &z) {
    require_same_dim(x, y, "triangle_flatness");
    require_same_dim(x, z, "triangle_flatness");
    const Point a = y - x;
    const Point b = z - x;
    const double la = a.norm();
    const double lb = b.norm();
    if (la == 0.0 || lb == 0.0)
        return 0.0;
    return edge_angle(a, la, b, lb).sin2;
}

bool collinear(const Point &x, const Point &y, const Point &z, double tol) {
    return triangle_flatness(x, y, z) <= tol;
}

} // namespace circumfeas
