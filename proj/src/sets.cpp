#include "circumfeas/sets.hpp"

#include "circumfeas/errors.hpp"
#include "circumfeas/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

namespace circumfeas {

const char *to_string(SetKind kind) {
    switch (kind) {
    case SetKind::halfspace: return "halfspace";
    case SetKind::ball: return "ball";
    case SetKind::box: return "box";
    case SetKind::affine: return "affine";
    case SetKind::epigraph_radial: return "epigraph_radial";
    case SetKind::epigraph_smooth: return "epigraph_smooth";
    case SetKind::product: return "product";
    case SetKind::diagonal: return "diagonal";
    }
    return "unknown";
}

// ---------------------------------------------------------------- SetOracle

void SetOracle::check_dim(const Point &p, const char *what) const {
    if (p.size() != dim())
        throw InvalidArgument(std::string(what) + " on " + to_string(kind()) +
                              ": dimension mismatch (" + std::to_string(p.size()) +
                              " vs " + std::to_string(dim()) + ")");
}

Point SetOracle::project(const Point &p) const {
    check_dim(p, "project");
    return project_impl(p);
}

Point SetOracle::displacement(const Point &p) const {
    check_dim(p, "displacement");
    return displacement_impl(p);
}

bool SetOracle::contains(const Point &p, double tol) const {
    check_dim(p, "contains");
    return contains_impl(p, tol);
}

Point SetOracle::project_direction(const Point &v) const {
    check_dim(v, "project_direction");
    return project_direction_impl(v);
}

bool SetOracle::contains_impl(const Point &p, double tol) const {
    return displacement_impl(p).norm() <= tol;
}

Point SetOracle::project_direction_impl(const Point &) const {
    throw InvalidProblem(std::string(to_string(kind())) + " is not an affine set");
}

std::string SetOracle::describe() const { return to_string(kind()); }

// ---------------------------------------------------------------- Halfspace

Halfspace::Halfspace(const Point &normal, double offset) {
    require_finite(normal, "Halfspace normal");
    const double nn = normal.norm();
    if (nn == 0.0)
        throw InvalidArgument("Halfspace: zero normal");
    if (!std::isfinite(offset))
        throw InvalidArgument("Halfspace: non-finite offset");
    normal_ = normal / nn;
    offset_ = offset / nn;
}

Point Halfspace::displacement_impl(const Point &p) const {
    const double excess = normal_.dot(p) - offset_;
    if (excess <= 0.0)
        return Point::Zero(p.size());
    return excess * normal_;
}

Point Halfspace::project_impl(const Point &p) const { return p - displacement_impl(p); }

bool Halfspace::contains_impl(const Point &p, double tol) const {
    return normal_.dot(p) - offset_ <= tol;
}

std::string Halfspace::describe() const {
    std::ostringstream os;
    os << "halfspace(offset=" << offset_ << ")";
    return os.str();
}

// ---------------------------------------------------------------- Ball

Ball::Ball(Point center, double radius) : center_(std::move(center)), radius_(radius) {
    require_finite(center_, "Ball center");
    if (!(radius_ > 0.0) || !std::isfinite(radius_))
        throw InvalidArgument("Ball: radius must be positive and finite");
    center_power_ = (center_.norm() - radius_) * (center_.norm() + radius_);
}

double Ball::excess_sq(const Point &p, const Point &d) const {
    const double pn = p.norm();
    const double dn = d.norm();
    if (pn < dn)
        return p.squaredNorm() - 2.0 * p.dot(center_) + center_power_;
    return (dn - radius_) * (dn + radius_);
}

Point Ball::displacement_impl(const Point &p) const {
    const Point d = p - center_;
    const double ex2 = excess_sq(p, d);
    if (ex2 <= 0.0)
        return Point::Zero(p.size());
    const double dn = d.norm();
    const double excess = ex2 / (dn + radius_);
    return d * (excess / dn);
}

Point Ball::project_impl(const Point &p) const {
    const Point d = p - center_;
    if (excess_sq(p, d) <= 0.0)
        return p;
    return center_ + d * (radius_ / d.norm());
}

bool Ball::contains_impl(const Point &p, double tol) const {
    const Point d = p - center_;
    const double ex2 = excess_sq(p, d);
    if (ex2 <= 0.0)
        return true;
    return ex2 / (d.norm() + radius_) <= tol;
}

std::string Ball::describe() const {
    std::ostringstream os;
    os << "ball(radius=" << radius_ << ")";
    return os.str();
}

// ---------------------------------------------------------------- Box

Box::Box(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_dim(lower_, upper_, "Box bounds");
    if ((lower_.array() > upper_.array()).any())
        throw InvalidArgument("Box: lower bound above upper bound");
    if (lower_.array().isNaN().any() || upper_.array().isNaN().any())
        throw InvalidArgument("Box: NaN bound");
}

Point Box::project_impl(const Point &p) const {
    return p.cwiseMax(lower_).cwiseMin(upper_);
}

bool Box::contains_impl(const Point &p, double tol) const {
    return (p - project_impl(p)).norm() <= tol;
}

std::string Box::describe() const { return "box"; }

// ---------------------------------------------------------------- AffineSet

Point AffineSet::project_impl(const Point &p) const { return affine_project(manifold_, p); }

Point AffineSet::displacement_impl(const Point &p) const {
    return manifold_.normal_part(p - manifold_.anchor());
}

Point AffineSet::project_direction_impl(const Point &v) const {
    return manifold_.parallel_part(v);
}

std::string AffineSet::describe() const {
    return "affine(dim=" + std::to_string(manifold_.dim()) + ")";
}

// ---------------------------------------------------------------- RadialFunction

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ParsedSpec {
    std::string name;
    std::vector<double> args;
};

ParsedSpec parse_spec(const std::string &text) {
    ParsedSpec out;
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s.push_back(ch);
    const auto open = s.find('(');
    if (open == std::string::npos) {
        out.name = s;
        return out;
    }
    if (s.back() != ')')
        throw InvalidArgument("malformed function spec '" + text + "'");
    out.name = s.substr(0, open);
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.args.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception &) {
            throw InvalidArgument("bad numeric argument '" + tok + "' in '" + text + "'");
        }
    }
    return out;
}

void expect_args(const ParsedSpec &p, std::size_t count, const std::string &text) {
    if (p.args.size() != count)
        throw InvalidArgument("'" + text + "' expects " + std::to_string(count) + " argument(s)");
}

} // namespace

RadialFunction RadialFunction::power(double alpha) {
    if (!(alpha > 1.0))
        throw InvalidArgument("power profile needs alpha > 1");
    RadialFunction r;
    r.phi = [alpha](double t) { return std::pow(std::abs(t), alpha); };
    r.dphi = [alpha](double t) {
        const double a = std::abs(t);
        const double v = alpha * std::pow(a, alpha - 1.0);
        return t < 0.0 ? -v : v;
    };
    r.ratio = [alpha](double) { return 1.0 / alpha; };
    std::ostringstream os;
    os << "power(" << alpha << ")";
    r.name = os.str();
    return r;
}

RadialFunction RadialFunction::ballcap() {
    RadialFunction r;
    r.domain_radius = 1.0;
    // 1 - sqrt(1 - t^2) written as t^2 / (1 + sqrt(1 - t^2))
    r.phi = [](double t) {
        const double a = std::abs(t);
        if (a > 1.0)
            return kInf;
        const double root = std::sqrt((1.0 - a) * (1.0 + a));
        return a * a / (1.0 + root);
    };
    r.dphi = [](double t) {
        const double a = std::abs(t);
        if (a >= 1.0)
            return t < 0.0 ? -kInf : kInf;
        return t / std::sqrt((1.0 - a) * (1.0 + a));
    };
    r.ratio = [](double t) {
        const double a = std::abs(t);
        const double root = std::sqrt((1.0 - a) * (1.0 + a));
        return root / (1.0 + root);
    };
    r.name = "ballcap";
    return r;
}

RadialFunction RadialFunction::flat() {
    RadialFunction r;
    r.domain_radius = 1.0 / std::sqrt(3.0);
    const double dom = r.domain_radius;
    r.phi = [dom](double t) {
        const double a = std::abs(t);
        if (a >= dom)
            return kInf;
        if (a == 0.0)
            return 0.0;
        return std::exp(-1.0 / (a * a));
    };
    r.dphi = [dom](double t) {
        const double a = std::abs(t);
        if (a >= dom)
            return t < 0.0 ? -kInf : kInf;
        if (a == 0.0)
            return 0.0;
        return 2.0 / (t * t * t) * std::exp(-1.0 / (a * a));
    };
    r.ratio = [](double t) { return 0.5 * t * t; };
    r.name = "flat";
    return r;
}

RadialFunction RadialFunction::shifted_power(double alpha, double c) {
    RadialFunction r = power(alpha);
    auto base = r.phi;
    r.phi = [base, c](double t) { return base(t) - c; };
    r.ratio = nullptr;
    std::ostringstream os;
    os << "shifted_power(" << alpha << "," << c << ")";
    r.name = os.str();
    return r;
}

RadialFunction RadialFunction::shifted_cosh(double c) {
    RadialFunction r;
    r.phi = [c](double t) { return std::cosh(t) - c; };
    r.dphi = [](double t) { return std::sinh(t); };
    std::ostringstream os;
    os << "shifted_cosh(" << c << ")";
    r.name = os.str();
    return r;
}

RadialFunction RadialFunction::parse(const std::string &spec) {
    const ParsedSpec p = parse_spec(spec);
    if (p.name == "power") {
        expect_args(p, 1, spec);
        return power(p.args[0]);
    }
    if (p.name == "ballcap") {
        expect_args(p, 0, spec);
        return ballcap();
    }
    if (p.name == "flat") {
        expect_args(p, 0, spec);
        return flat();
    }
    if (p.name == "shifted_power") {
        expect_args(p, 2, spec);
        return shifted_power(p.args[0], p.args[1]);
    }
    if (p.name == "shifted_cosh") {
        expect_args(p, 1, spec);
        return shifted_cosh(p.args[0]);
    }
    throw InvalidArgument("unknown radial profile '" + spec + "'");
}

bool RadialFunction::spot_check_convex(int samples, unsigned long long seed) const {
    std::mt19937_64 rng(seed);
    const double hi = std::isfinite(domain_radius) ? domain_radius * (1.0 - 1e-9) : 10.0;
    std::uniform_real_distribution<double> draw(-hi, hi);
    for (int i = 0; i < samples; ++i) {
        const double a = draw(rng);
        const double b = draw(rng);
        const double fa = phi(a);
        const double fb = phi(b);
        const double fm = phi(0.5 * (a + b));
        if (fm > 0.5 * (fa + fb) + 1e-12 * (1.0 + std::abs(fa) + std::abs(fb)))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------- EpigraphRadial

EpigraphRadial::EpigraphRadial(RadialFunction radial, int n) : radial_(std::move(radial)), n_(n) {
    if (n_ < 1)
        throw InvalidArgument("EpigraphRadial: n must be positive");
    if (!radial_.phi || !radial_.dphi)
        throw InvalidArgument("EpigraphRadial: phi and dphi are required");
    if (!(radial_.domain_radius > 0.0))
        throw InvalidArgument("EpigraphRadial: domain radius must be positive");
}

std::optional<double> EpigraphRadial::foot_radius(const Point &p) const {
    const Point x = p.head(n_);
    const double s = p[n_];
    const double nx = x.norm();
    const auto &phi = radial_.phi;
    const auto &dphi = radial_.dphi;
    if (phi(nx) <= s)
        return std::nullopt;
    if (nx == 0.0)
        return 0.0;

    // Stationarity of ||(x, s) - (r x^, phi(r))||^2 along the ray; the
    // r - ||x|| difference is exact (Sterbenz) near the root.
    auto g = [&](double r) { return (r - nx) + (phi(r) - s) * dphi(r); };

    double lo = 0.0;
    double glo = g(lo);
    if (glo >= 0.0)
        return 0.0; // apex
    double hi = std::min(nx, radial_.domain_radius);
    double ghi = g(hi);
    for (int k = 0; k < 64 && !(ghi > 0.0); ++k) {
        if (hi >= radial_.domain_radius)
            break;
        lo = hi;
        glo = ghi;
        hi = std::min(2.0 * hi, radial_.domain_radius);
        ghi = g(hi);
    }
    if (!(ghi > 0.0))
        throw ProjectionFailure("epigraph projection (" + radial_.name +
                                "): no sign change in bracket; is phi convex?");

    // Illinois regula falsi with bisection fallback, run to ulp width.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double resid_tol = 1e-13 * (1.0 + nx);
    int side = 0;
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        if (hi - lo <= 4.0 * eps * hi)
            break;
        double cand = std::isfinite(ghi) ? (lo * ghi - hi * glo) / (ghi - glo) : 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi) || it % 4 == 3)
            cand = 0.5 * (lo + hi);
        const double gc = g(cand);
        r = cand;
        if (gc == 0.0) {
            lo = hi = cand;
            break;
        }
        if (gc < 0.0) {
            lo = cand;
            glo = gc;
            if (side == -1)
                ghi *= 0.5;
            side = -1;
        } else {
            hi = cand;
            ghi = gc;
            if (side == 1)
                glo *= 0.5;
            side = 1;
        }
    }
    if (lo == hi)
        return lo;
    const double glo_true = g(lo);
    const double ghi_true = g(hi);
    r = std::abs(glo_true) <= std::abs(ghi_true) ? lo : hi;
    const bool narrow = hi - lo <= 4.0 * eps * hi;
    if (!narrow && std::min(std::abs(glo_true), std::abs(ghi_true)) > resid_tol)
        throw ProjectionFailure("epigraph projection (" + radial_.name + "): root not converged");
    return r;
}

Point EpigraphRadial::project_impl(const Point &p) const {
    const auto r = foot_radius(p);
    if (!r)
        return p;
    Point out(p.size());
    const double nx = p.head(n_).norm();
    if (*r == 0.0 || nx == 0.0)
        out.head(n_).setZero();
    else
        out.head(n_) = p.head(n_) * (*r / nx);
    out[n_] = radial_.phi(*r);
    return out;
}

Point EpigraphRadial::displacement_impl(const Point &p) const {
    const auto r = foot_radius(p);
    if (!r)
        return Point::Zero(p.size());
    const double s = p[n_];
    const double nx = p.head(n_).norm();
    const double phir = radial_.phi(*r);
    Point d(p.size());
    if (*r == 0.0 || nx == 0.0) {
        d.head(n_) = p.head(n_);
    } else {
        const double radial_gap = (phir - s) * radial_.dphi(*r);
        d.head(n_) = p.head(n_) * (radial_gap / nx);
    }
    d[n_] = s - phir;
    return d;
}

bool EpigraphRadial::contains_impl(const Point &p, double tol) const {
    if (radial_.phi(p.head(n_).norm()) <= p[n_])
        return true;
    return displacement_impl(p).norm() <= tol;
}

std::string EpigraphRadial::describe() const {
    return "epi(" + radial_.name + ", n=" + std::to_string(n_) + ")";
}

// ---------------------------------------------------------------- SmoothFunction

SmoothFunction SmoothFunction::diagonal_quadratic(std::vector<double> weights) {
    if (weights.empty())
        throw InvalidArgument("quadratic: no weights");
    for (double w : weights)
        if (!(w > 0.0))
            throw InvalidArgument("quadratic: weights must be positive");
    Point w = Eigen::Map<const Point>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    SmoothFunction fn;
    fn.f = [w](const Point &x) { return x.dot(w.cwiseProduct(x)); };
    fn.grad = [w](const Point &x) -> Point { return 2.0 * w.cwiseProduct(x); };
    std::ostringstream os;
    os << "quadratic(";
    for (std::size_t i = 0; i < weights.size(); ++i)
        os << (i ? "," : "") << weights[i];
    os << ")";
    fn.name = os.str();
    return fn;
}

SmoothFunction SmoothFunction::radial(const RadialFunction &r) {
    SmoothFunction fn;
    auto phi = r.phi;
    auto dphi = r.dphi;
    fn.f = [phi](const Point &x) { return phi(x.norm()); };
    fn.grad = [dphi](const Point &x) -> Point {
        const double nx = x.norm();
        if (nx == 0.0)
            return Point::Zero(x.size());
        return x * (dphi(nx) / nx);
    };
    fn.name = "radial(" + r.name + ")";
    return fn;
}

SmoothFunction SmoothFunction::parse(const std::string &spec) {
    const ParsedSpec p = parse_spec(spec);
    if (p.name == "quadratic")
        return diagonal_quadratic(p.args);
    throw InvalidArgument("unknown smooth function '" + spec + "'");
}

bool SmoothFunction::spot_check_convex(int n, int samples, double scale,
                                       unsigned long long seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> draw(-scale, scale);
    for (int i = 0; i < samples; ++i) {
        Point x(n), y(n);
        for (int j = 0; j < n; ++j) {
            x[j] = draw(rng);
            y[j] = draw(rng);
        }
        const double fx = f(x);
        const double lin = fx + grad(x).dot(y - x);
        if (f(y) < lin - 1e-10 * (1.0 + std::abs(fx) + std::abs(lin)))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------- EpigraphSmooth

EpigraphSmooth::EpigraphSmooth(SmoothFunction fn, int n) : fn_(std::move(fn)), n_(n) {
    if (n_ < 1)
        throw InvalidArgument("EpigraphSmooth: n must be positive");
    if (!fn_.f || !fn_.grad)
        throw InvalidArgument("EpigraphSmooth: f and grad are required");
}

std::optional<Point> EpigraphSmooth::foot(const Point &p) const {
    const Point x = p.head(n_);
    const double s = p[n_];
    if (fn_.f(x) <= s)
        return std::nullopt;

    auto residual = [&](const Point &u) -> Point {
        return (u - x) + (fn_.f(u) - s) * fn_.grad(u);
    };
    const double tol = 1e-10 * (1.0 + x.norm());
    constexpr int max_iter = 200;
    constexpr int polish_steps = 3;

    Point u = x;
    Point F = residual(u);
    double merit = F.squaredNorm();
    int polished = 0;
    for (int it = 0; it < max_iter; ++it) {
        const bool converged = std::sqrt(merit) <= tol;
        if (converged && (polished >= polish_steps || merit == 0.0))
            return u;

        const double h = 1e-6 * (1.0 + u.norm());
        Eigen::MatrixXd J(n_, n_);
        for (int j = 0; j < n_; ++j) {
            Point up = u, um = u;
            up[j] += h;
            um[j] -= h;
            J.col(j) = (residual(up) - residual(um)) / (2.0 * h);
        }
        const Point step = J.partialPivLu().solve(-F);
        if (!step.allFinite())
            break;

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Point trial = u + t * step;
            const Point Ft = residual(trial);
            const double mt = Ft.squaredNorm();
            if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * t) * merit) {
                u = trial;
                F = Ft;
                merit = mt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (converged) {
            // already within tolerance; stop as soon as rounding blocks progress
            if (!accepted)
                return u;
            ++polished;
            continue;
        }
        if (!accepted)
            break;
    }
    if (std::sqrt(merit) <= tol)
        return u;
    throw ProjectionFailure("epigraph projection (" + fn_.name + "): Newton did not converge");
}

Point EpigraphSmooth::project_impl(const Point &p) const {
    const auto u = foot(p);
    if (!u)
        return p;
    Point out(p.size());
    out.head(n_) = *u;
    out[n_] = fn_.f(*u);
    return out;
}

Point EpigraphSmooth::displacement_impl(const Point &p) const {
    const auto u = foot(p);
    if (!u)
        return Point::Zero(p.size());
    const double s = p[n_];
    const double fu = fn_.f(*u);
    Point d(p.size());
    d.head(n_) = (fu - s) * fn_.grad(*u);
    d[n_] = s - fu;
    return d;
}

bool EpigraphSmooth::contains_impl(const Point &p, double tol) const {
    if (fn_.f(p.head(n_)) <= p[n_])
        return true;
    return displacement_impl(p).norm() <= tol;
}

std::string EpigraphSmooth::describe() const {
    return "epi(" + fn_.name + ", n=" + std::to_string(n_) + ")";
}

// ---------------------------------------------------------------- product space

ProductSet::ProductSet(std::vector<SetPtr> factors) : factors_(std::move(factors)) {
    if (factors_.empty())
        throw InvalidArgument("ProductSet: no factors");
    for (const auto &f : factors_)
        if (!f)
            throw InvalidArgument("ProductSet: null factor");
    block_dim_ = factors_.front()->dim();
    for (const auto &f : factors_)
        if (f->dim() != block_dim_)
            throw InvalidArgument("ProductSet: factors of mixed dimension");
}

Point ProductSet::project_impl(const Point &p) const {
    Point out;
    kernels::project_blocks(factors_, p, out);
    return out;
}

Point ProductSet::displacement_impl(const Point &p) const {
    Point out;
    kernels::displace_blocks(factors_, p, out);
    return out;
}

bool ProductSet::contains_impl(const Point &p, double tol) const {
    return displacement_impl(p).norm() <= tol;
}

std::string ProductSet::describe() const {
    return "product(m=" + std::to_string(factors_.size()) + ", n=" + std::to_string(block_dim_) + ")";
}

DiagonalSubspace::DiagonalSubspace(int n, int m) : n_(n), m_(m) {
    if (n_ < 1 || m_ < 1)
        throw InvalidArgument("DiagonalSubspace: n and m must be positive");
}

Point DiagonalSubspace::project_impl(const Point &p) const {
    return replicate(kernels::block_mean(p, n_, m_), m_);
}

Point DiagonalSubspace::project_direction_impl(const Point &v) const { return project_impl(v); }

std::string DiagonalSubspace::describe() const {
    return "diagonal(n=" + std::to_string(n_) + ", m=" + std::to_string(m_) + ")";
}

Point replicate(const Point &x, int m) {
    const auto n = x.size();
    Point out(n * m);
    for (int i = 0; i < m; ++i)
        out.segment(i * n, n) = x;
    return out;
}

std::pair<std::shared_ptr<const ProductSet>, std::shared_ptr<const DiagonalSubspace>>
product_lift(const std::vector<SetPtr> &sets) {
    if (sets.size() < 2)
        throw InvalidArgument("product_lift: need at least two sets");
    auto K = std::make_shared<const ProductSet>(sets);
    auto U = std::make_shared<const DiagonalSubspace>(K->block_dim(), K->blocks());
    return {std::move(K), std::move(U)};
}

} // namespace circumfeas
