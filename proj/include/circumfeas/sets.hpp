#pragma once

#include "circumfeas/geometry.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace circumfeas {

enum class SetKind {
    halfspace,
    ball,
    box,
    affine,
    epigraph_radial,
    epigraph_smooth,
    product,
    diagonal,
};

const char *to_string(SetKind kind);

/// Closed convex set with an exact (or iteratively exact) orthogonal
/// projection. Oracles are immutable after construction and every query is
/// const; function oracles handed to the epigraph kinds must themselves be
/// safe to call concurrently for that guarantee to extend to them.
class SetOracle {
  public:
    virtual ~SetOracle() = default;

    virtual SetKind kind() const = 0;
    virtual int dim() const = 0;

    /// Nearest point of the set. Points already in the set come back
    /// unchanged.
    Point project(const Point &p) const;

    /// p - project(p), computed directly where the kind allows it. The
    /// direct form keeps full relative accuracy when the displacement is
    /// far below the rounding error of the coordinates of p, which is what
    /// the circumcenter step needs near tangential intersections.
    Point displacement(const Point &p) const;

    /// ||p - project(p)|| <= tol, with closed-form membership where cheaper.
    bool contains(const Point &p, double tol) const;

    double distance(const Point &p) const { return displacement(p).norm(); }

    /// Affine kinds (affine manifolds, the diagonal subspace) expose the
    /// orthogonal projection onto their direction space.
    virtual bool is_affine() const { return false; }
    Point project_direction(const Point &v) const;

    virtual std::string describe() const;

  protected:
    virtual Point project_impl(const Point &p) const = 0;
    virtual Point displacement_impl(const Point &p) const { return p - project_impl(p); }
    virtual bool contains_impl(const Point &p, double tol) const;
    virtual Point project_direction_impl(const Point &v) const;

  private:
    void check_dim(const Point &p, const char *what) const;
};

using SetPtr = std::shared_ptr<const SetOracle>;

/// {p : <normal, p> <= offset}; the normal is stored with unit length.
class Halfspace final : public SetOracle {
  public:
    Halfspace(const Point &normal, double offset);
    SetKind kind() const override { return SetKind::halfspace; }
    int dim() const override { return static_cast<int>(normal_.size()); }
    const Point &normal() const { return normal_; }
    double offset() const { return offset_; }
    std::string describe() const override;

  protected:
    Point project_impl(const Point &p) const override;
    Point displacement_impl(const Point &p) const override;
    bool contains_impl(const Point &p, double tol) const override;

  private:
    Point normal_;
    double offset_;
};

class Ball final : public SetOracle {
  public:
    Ball(Point center, double radius);
    SetKind kind() const override { return SetKind::ball; }
    int dim() const override { return static_cast<int>(center_.size()); }
    const Point &center() const { return center_; }
    double radius() const { return radius_; }
    std::string describe() const override;

  protected:
    Point project_impl(const Point &p) const override;
    Point displacement_impl(const Point &p) const override;
    bool contains_impl(const Point &p, double tol) const override;

  private:
    // ||p - c||^2 - r^2 without the cancellation of the direct form when p
    // is near the origin and the origin is near the sphere.
    double excess_sq(const Point &p, const Point &d) const;

    Point center_;
    double radius_;
    double center_power_; // ||c||^2 - r^2
};

class Box final : public SetOracle {
  public:
    Box(Point lower, Point upper);
    SetKind kind() const override { return SetKind::box; }
    int dim() const override { return static_cast<int>(lower_.size()); }
    std::string describe() const override;

  protected:
    Point project_impl(const Point &p) const override;
    bool contains_impl(const Point &p, double tol) const override;

  private:
    Point lower_;
    Point upper_;
};

class AffineSet final : public SetOracle {
  public:
    explicit AffineSet(AffineManifold m) : manifold_(std::move(m)) {}
    SetKind kind() const override { return SetKind::affine; }
    int dim() const override { return manifold_.dim_ambient(); }
    bool is_affine() const override { return true; }
    const AffineManifold &manifold() const { return manifold_; }
    std::string describe() const override;

  protected:
    Point project_impl(const Point &p) const override;
    Point displacement_impl(const Point &p) const override;
    Point project_direction_impl(const Point &v) const override;

  private:
    AffineManifold manifold_;
};

/// Scalar profile phi of a radial function f(x) = phi(||x||). phi is +inf
/// for |t| >= domain_radius. The optional `ratio` oracle evaluates
/// phi(t) / (t phi'(t)) in closed form for profiles where phi underflows
/// near 0.
struct RadialFunction {
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    double domain_radius = std::numeric_limits<double>::infinity();
    std::function<double(double)> ratio;
    std::string name;

    /// phi(t) = |t|^alpha, alpha > 1.
    static RadialFunction power(double alpha);
    /// phi(t) = 1 - sqrt(1 - t^2) on [-1, 1]: the lower unit hemisphere.
    static RadialFunction ballcap();
    /// phi(t) = exp(-1 / t^2) on (-3^-1/2, 3^-1/2).
    static RadialFunction flat();
    /// phi(t) = |t|^alpha - c.
    static RadialFunction shifted_power(double alpha, double c);
    /// phi(t) = cosh(t) - c.
    static RadialFunction shifted_cosh(double c);

    /// Parses `power(a)`, `ballcap`, `flat`, `shifted_power(a,c)`,
    /// `shifted_cosh(c)`.
    static RadialFunction parse(const std::string &spec);

    /// Midpoint convexity on `samples` random triples inside the domain.
    bool spot_check_convex(int samples, unsigned long long seed) const;
};

/// {(x, s) in R^{n+1} : phi(||x||) <= s}.
class EpigraphRadial final : public SetOracle {
  public:
    EpigraphRadial(RadialFunction radial, int n);
    SetKind kind() const override { return SetKind::epigraph_radial; }
    int dim() const override { return n_ + 1; }
    int base_dim() const { return n_; }
    const RadialFunction &radial() const { return radial_; }
    std::string describe() const override;

    /// Root r in [0, ||x||] of r + (phi(r) - s) phi'(r) = ||x||; nullopt when
    /// (x, s) is already in the set.
    std::optional<double> foot_radius(const Point &p) const;

  protected:
    Point project_impl(const Point &p) const override;
    Point displacement_impl(const Point &p) const override;
    bool contains_impl(const Point &p, double tol) const override;

  private:
    RadialFunction radial_;
    int n_;
};

/// f and its gradient on R^n.
struct SmoothFunction {
    std::function<double(const Point &)> f;
    std::function<Point(const Point &)> grad;
    std::string name;

    /// f(x) = sum_i w_i x_i^2.
    static SmoothFunction diagonal_quadratic(std::vector<double> weights);
    /// f(x) = phi(||x||).
    static SmoothFunction radial(const RadialFunction &r);
    /// Parses `quadratic(w1,w2,...)`.
    static SmoothFunction parse(const std::string &spec);

    /// Gradient inequality f(y) >= f(x) + <grad f(x), y - x> on sampled pairs
    /// from the cube [-scale, scale]^n.
    bool spot_check_convex(int n, int samples, double scale,
                           unsigned long long seed) const;
};

/// {(x, s) in R^{n+1} : f(x) <= s}, projected with damped Newton on
/// F(u) = u + (f(u) - s) grad f(u) - x using a central-difference Jacobian.
class EpigraphSmooth final : public SetOracle {
  public:
    EpigraphSmooth(SmoothFunction fn, int n);
    SetKind kind() const override { return SetKind::epigraph_smooth; }
    int dim() const override { return n_ + 1; }
    int base_dim() const { return n_; }
    const SmoothFunction &function() const { return fn_; }
    std::string describe() const override;

    /// Base point u of the projection (x, s) -> (u, f(u)); nullopt when the
    /// point is already in the set.
    std::optional<Point> foot(const Point &p) const;

  protected:
    Point project_impl(const Point &p) const override;
    Point displacement_impl(const Point &p) const override;
    bool contains_impl(const Point &p, double tol) const override;

  private:
    SmoothFunction fn_;
    int n_;
};

/// K_1 x ... x K_m over R^{nm}; projections act blockwise.
class ProductSet final : public SetOracle {
  public:
    explicit ProductSet(std::vector<SetPtr> factors);
    SetKind kind() const override { return SetKind::product; }
    int dim() const override { return block_dim_ * static_cast<int>(factors_.size()); }
    int block_dim() const { return block_dim_; }
    int blocks() const { return static_cast<int>(factors_.size()); }
    const std::vector<SetPtr> &factors() const { return factors_; }
    std::string describe() const override;

  protected:
    Point project_impl(const Point &p) const override;
    Point displacement_impl(const Point &p) const override;
    bool contains_impl(const Point &p, double tol) const override;

  private:
    std::vector<SetPtr> factors_;
    int block_dim_;
};

/// {(x, ..., x) : x in R^n} inside R^{nm}; the projection is the blockwise
/// average replicated m times.
class DiagonalSubspace final : public SetOracle {
  public:
    DiagonalSubspace(int n, int m);
    SetKind kind() const override { return SetKind::diagonal; }
    int dim() const override { return n_ * m_; }
    int block_dim() const { return n_; }
    int blocks() const { return m_; }
    bool is_affine() const override { return true; }
    std::string describe() const override;

  protected:
    Point project_impl(const Point &p) const override;
    Point project_direction_impl(const Point &v) const override;

  private:
    int n_;
    int m_;
};

/// Pierra lift of m >= 2 sets over R^n to the pair (K_1 x ... x K_m, diag).
std::pair<std::shared_ptr<const ProductSet>, std::shared_ptr<const DiagonalSubspace>>
product_lift(const std::vector<SetPtr> &sets);

/// (x, ..., x) with m copies.
Point replicate(const Point &x, int m);

} // namespace circumfeas
