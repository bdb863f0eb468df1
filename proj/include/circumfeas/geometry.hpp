#pragma once

#include <Eigen/Core>

#include <vector>

namespace circumfeas {

/// Dense point in R^n. Coordinates must be finite wherever the library
/// accepts a point from the outside (see require_finite).
using Point = Eigen::VectorXd;

/// Throws InvalidArgument if any coordinate is NaN or infinite.
void require_finite(const Point &p, const char *what);

/// Throws InvalidArgument unless a.size() == b.size().
void require_same_dim(const Point &a, const Point &b, const char *what);

/// Affine manifold {anchor + sum_i c_i b_i} with an orthonormal direction
/// basis. The basis is orthonormalized once at construction (modified
/// Gram-Schmidt, two passes); directions that are numerically dependent
/// on the previous ones are dropped.
class AffineManifold {
  public:
    AffineManifold(Point anchor, const std::vector<Point> &directions);

    /// Hyperplane {p : <normal, p> = offset}.
    static AffineManifold hyperplane(const Point &normal, double offset);

    /// Coordinate subspace spanned by e_i for i in `axes`, through `anchor`.
    static AffineManifold coordinate(Point anchor, const std::vector<int> &axes);

    int dim_ambient() const { return static_cast<int>(anchor_.size()); }
    int dim() const { return static_cast<int>(basis_.size()); }
    const Point &anchor() const { return anchor_; }
    const std::vector<Point> &basis() const { return basis_; }

    /// Component of a direction vector lying in the parallel subspace.
    Point parallel_part(const Point &v) const;
    /// v - parallel_part(v): the component orthogonal to the manifold.
    Point normal_part(const Point &v) const;

  private:
    Point anchor_;
    std::vector<Point> basis_;
};

/// Orthogonal projection: anchor + sum_i <p - anchor, b_i> b_i.
Point affine_project(const AffineManifold &m, const Point &p);

/// Coincidence and singularity thresholds for circumcenter computations.
/// `coincide` is an absolute distance, `singular` bounds the squared sine
/// of the angle between the two edges leaving the first point (equivalently
/// Gram determinant / (|y-x|^2 |z-x|^2)).
struct CircumcenterTolerances {
    double coincide = 0.0;
    double singular = 1e-12;
};

/// Offset c - x of the circumcenter of (x, x + a, x + b), given the edge
/// vectors a and b. Handles the one- and two-point cardinality cases
/// (returns 0, or half of the non-zero edge, or half of a when a == b).
/// Throws DegenerateCircumcenter for three distinct collinear points.
///
/// The Gram system is solved in terms of the edge lengths and the angle
/// between the edges; the sine and cosine come from the half-angle
/// construction on the normalized edges, which stays accurate for very
/// thin triangles where |a|^2 |b|^2 - <a,b>^2 cancels.
Point circumcenter_offset(const Point &a, const Point &b,
                          const CircumcenterTolerances &tol);

/// Point in aff{x, y, z} equidistant from all three. Coincidence threshold
/// is 1e-14 (1 + max norm), singularity threshold 1e-12.
Point circumcenter3(const Point &x, const Point &y, const Point &z);

/// Squared sine of the angle at x in the triangle (x, y, z); 0 when an edge
/// leaving x has zero length.
double triangle_flatness(const Point &x, const Point &y, const Point &z);

/// True iff the triangle (x, y, z) is flat relative to its side lengths:
/// triangle_flatness(x, y, z) <= tol, or two of the points coincide.
bool collinear(const Point &x, const Point &y, const Point &z, double tol);

} // namespace circumfeas
