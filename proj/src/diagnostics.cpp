#include "circumfeas/diagnostics.hpp"

#include "circumfeas/errors.hpp"
#include "circumfeas/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace circumfeas {

const char *to_string(RateClass c) {
    switch (c) {
    case RateClass::superlinear: return "superlinear";
    case RateClass::linear: return "linear";
    case RateClass::sublinear: return "sublinear";
    }
    return "?";
}

// ---------------------------------------------------------------- error sequences

std::vector<double> truncate_errors(std::vector<double> errors, bool self_referenced,
                                    std::size_t min_entries) {
    if (self_referenced)
        errors.resize(errors.size() > 3 ? errors.size() - 3 : 0);
    if (!errors.empty()) {
        const double floor = std::max(1e-13, 1e-10 * errors.front());
        const auto cut = std::find_if(errors.begin(), errors.end(),
                                      [floor](double e) { return !(e > floor); });
        errors.erase(cut, errors.end());
    }
    if (errors.size() < min_entries)
        throw InsufficientData("error sequence: " + std::to_string(errors.size()) +
                               " usable entries, need " + std::to_string(min_entries));
    return errors;
}

std::vector<double> error_sequence(const Trace &trace, const std::optional<Point> &reference,
                                   std::size_t min_entries) {
    if (trace.iterates.empty())
        throw InvalidArgument("error_sequence: empty trace");
    const Point &ystar = reference ? *reference : trace.last();
    if (ystar.size() != trace.last().size())
        throw InvalidArgument("error_sequence: reference has wrong dimension");
    std::vector<double> e;
    e.reserve(trace.size());
    for (const auto &x : trace.iterates)
        e.push_back((x - ystar).norm());
    return truncate_errors(std::move(e), !reference, min_entries);
}

namespace {

void check_errors(const std::vector<double> &errors, std::size_t min_entries) {
    if (errors.size() < std::max<std::size_t>(min_entries, 2))
        throw InsufficientData("rate estimate: too few entries");
    for (double e : errors)
        if (!(e > 0.0) || !std::isfinite(e))
            throw InvalidArgument("rate estimate: entries must be positive and finite");
}

std::size_t tail_width(std::size_t len) {
    return std::clamp<std::size_t>(len / 3, 1, 10);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

RateReport q_estimate(const std::vector<double> &errors, std::size_t min_entries) {
    check_errors(errors, min_entries);
    RateReport rep;
    rep.q_tail.reserve(errors.size() - 1);
    for (std::size_t k = 0; k + 1 < errors.size(); ++k)
        rep.q_tail.push_back(errors[k + 1] / errors[k]);
    const std::size_t w = std::min(tail_width(errors.size()), rep.q_tail.size());
    rep.q_hat = median({rep.q_tail.end() - static_cast<std::ptrdiff_t>(w), rep.q_tail.end()});
    rep.window = {errors.size() - 1 - w, errors.size() - 1};
    return rep;
}

double r_estimate(const std::vector<double> &errors, std::size_t min_entries) {
    check_errors(errors, min_entries);
    const std::size_t len = errors.size();
    const std::size_t pts = std::min(len, std::max<std::size_t>(tail_width(len) + 1, 3));
    const std::size_t k0 = len - pts;
    double sk = 0.0, sy = 0.0;
    for (std::size_t k = k0; k < len; ++k) {
        sk += static_cast<double>(k);
        sy += std::log(errors[k]);
    }
    const double mk = sk / static_cast<double>(pts);
    const double my = sy / static_cast<double>(pts);
    double num = 0.0, den = 0.0;
    for (std::size_t k = k0; k < len; ++k) {
        const double dk = static_cast<double>(k) - mk;
        num += dk * (std::log(errors[k]) - my);
        den += dk * dk;
    }
    return std::exp(num / den);
}

RateClass classify_rate(RateReport &report, const RateThresholds &thresholds) {
    const auto &q = report.q_tail;
    const std::size_t w = report.window.second - report.window.first;
    const std::size_t span = std::min(q.size(), std::max<std::size_t>(w, 2));
    bool decreasing = span >= 2;
    for (std::size_t i = q.size() - span; i + 1 < q.size(); ++i)
        if (!(q[i + 1] < q[i] * (1.0 - 1e-6)))
            decreasing = false;

    report.linear_constant.reset();
    if (report.q_hat < thresholds.superlinear && decreasing) {
        report.classification = RateClass::superlinear;
    } else if (report.q_hat > thresholds.sublinear) {
        report.classification = RateClass::sublinear;
    } else {
        report.classification = RateClass::linear;
        report.linear_constant = report.q_hat;
    }
    return report.classification;
}

RateReport analyze_errors(const std::vector<double> &errors, const RateThresholds &thresholds,
                          std::size_t min_entries) {
    RateReport rep = q_estimate(errors, min_entries);
    rep.r_hat = r_estimate(errors, min_entries);
    classify_rate(rep, thresholds);
    return rep;
}

// ---------------------------------------------------------------- Fejer / error bound

double fejer_check(const Trace &trace, const std::vector<Point> &witnesses, const Problem &P) {
    for (const auto &y : witnesses) {
        if (y.size() != P.dim())
            throw InvalidArgument("fejer_check: witness has wrong dimension");
        if (!P.K->contains(y, 1e-8) || !P.U->contains(y, 1e-8))
            throw InvalidArgument("fejer_check: witness is not in K cap U");
    }
    double worst = 0.0;
    for (const auto &y : witnesses)
        for (std::size_t k = 0; k + 1 < trace.size(); ++k)
            worst = std::max(worst, (trace.iterates[k + 1] - y).norm() - (trace.iterates[k] - y).norm());
    return worst;
}

double eb_omega_estimate(const Problem &P, int samples, const std::vector<double> &radius_schedule,
                         unsigned long long seed) {
    P.validate();
    if (!P.known_solution)
        throw InvalidArgument("eb_omega_estimate: needs a known solution");
    if (samples < 100)
        throw InvalidArgument("eb_omega_estimate: need at least 100 samples");
    if (radius_schedule.empty())
        throw InvalidArgument("eb_omega_estimate: empty radius schedule");
    const Point &anchor = *P.known_solution;
    const int N = P.dim();

    // Sample points serially for determinism, evaluate in parallel.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<Point> points;
    points.reserve(radius_schedule.size() * static_cast<std::size_t>(samples));
    for (double radius : radius_schedule) {
        if (!(radius > 0.0))
            throw InvalidArgument("eb_omega_estimate: radii must be positive");
        for (int i = 0; i < samples; ++i) {
            Point v(N);
            for (int j = 0; j < N; ++j)
                v[j] = gauss(rng);
            Point dir = P.U->is_affine() ? P.U->project_direction(v) : P.U->project(anchor + v) - anchor;
            const double nd = dir.norm();
            if (nd == 0.0)
                continue;
            Point x = anchor + dir * (radius / nd);
            if (!P.U->is_affine())
                x = P.U->project(x);
            points.push_back(std::move(x));
        }
    }
    const auto ratios = kernels::evaluate(static_cast<int>(points.size()), [&](int i) {
        const double r = (points[i] - anchor).norm();
        if (r == 0.0)
            return std::numeric_limits<double>::infinity();
        return P.K->distance(points[i]) / r;
    });
    double best = std::numeric_limits<double>::infinity();
    for (double r : ratios) {
        if (r == 0.0)
            throw UnsupportedProblem("eb_omega_estimate: K cap U is not a single point; an "
                                     "intersection oracle would be required");
        best = std::min(best, r);
    }
    if (!std::isfinite(best))
        throw UnsupportedProblem("eb_omega_estimate: U has no directions to sample");
    return best;
}

// ---------------------------------------------------------------- gamma limits

namespace {

// Value at the pair of consecutive probes that agree best; later probes win
// ties. Returns 0 when the probes decay below 1e-6.
double stable_limit(const std::vector<double> &g) {
    if (g.back() < 1e-6)
        return 0.0;
    std::size_t best = g.size() - 1;
    double best_diff = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double d = std::abs(g[k] - g[k - 1]);
        if (d <= best_diff) {
            best_diff = d;
            best = k;
        }
    }
    return g[best];
}

} // namespace

double gamma_hat(const RadialFunction &phi) {
    std::vector<double> g;
    for (int e = 2; e <= 7; ++e) {
        const double t = std::pow(10.0, -e);
        double v;
        if (phi.ratio) {
            v = phi.ratio(t);
        } else {
            const double d = phi.dphi(t);
            if (d == 0.0)
                throw InvalidArgument("gamma_hat: phi'(t) = 0 at probe t = " + std::to_string(t));
            v = phi.phi(t) / (t * d);
        }
        if (!std::isfinite(v))
            throw InvalidArgument("gamma_hat: non-finite ratio at probe t = " + std::to_string(t));
        g.push_back(v);
    }
    return stable_limit(g);
}

GammaLimit gamma_limit(const EpigraphSmooth &E, const std::vector<Point> &directions) {
    if (directions.empty())
        throw InvalidArgument("gamma_limit: no directions");
    const auto &fn = E.function();
    GammaLimit out;
    for (const auto &d0 : directions) {
        if (d0.size() != E.base_dim())
            throw InvalidArgument("gamma_limit: direction has wrong dimension");
        const double nd = d0.norm();
        if (nd == 0.0)
            throw InvalidArgument("gamma_limit: zero direction");
        const Point d = d0 / nd;
        std::vector<double> g;
        for (int e = 2; e <= 6; ++e) {
            const double t = std::pow(10.0, -e);
            const Point x = t * d;
            const double gn = fn.grad(x).norm();
            if (gn == 0.0)
                throw InvalidArgument("gamma_limit: vanishing gradient away from 0");
            const double v = fn.f(x) / (t * gn);
            if (!std::isfinite(v))
                throw InvalidArgument("gamma_limit: non-finite ratio");
            g.push_back(v);
        }
        out.per_direction.push_back(stable_limit(g));
    }
    const auto [lo, hi] = std::minmax_element(out.per_direction.begin(), out.per_direction.end());
    out.gamma = *lo;
    out.spread = *hi - *lo;
    out.direction_dependent = out.spread > 1e-3;
    return out;
}

std::vector<Point> sample_directions(int n, int count, unsigned long long seed) {
    if (n < 1 || count < 1)
        throw InvalidArgument("sample_directions: need n >= 1 and count >= 1");
    std::vector<Point> dirs;
    dirs.reserve(count);
    if (n == 1) {
        dirs.push_back(Point::Ones(1));
        dirs.push_back(-Point::Ones(1));
        return dirs;
    }
    if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = std::numbers::pi * static_cast<double>(i) / count;
            Point d(2);
            d << std::cos(a), std::sin(a);
            dirs.push_back(d);
        }
        return dirs;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < n; ++i) {
        Point e = Point::Zero(n);
        e[i] = 1.0;
        dirs.push_back(e);
    }
    while (static_cast<int>(dirs.size()) < count) {
        Point v(n);
        for (int j = 0; j < n; ++j)
            v[j] = gauss(rng);
        if (v.norm() > 0.0)
            dirs.push_back(v / v.norm());
    }
    return dirs;
}

// ---------------------------------------------------------------- constants

const char *to_string(Family f) {
    switch (f) {
    case Family::family1_radial: return "family1_radial";
    case Family::family1_smooth: return "family1_smooth";
    case Family::family2_radial: return "family2_radial";
    case Family::two_lines: return "two_lines";
    case Family::ball_tangent: return "ball_tangent";
    case Family::flat: return "flat";
    case Family::product_m_sets: return "product_m_sets";
    case Family::conjecture_probe: return "conjecture_probe";
    }
    return "?";
}

Family parse_family(const std::string &name) {
    for (Family f : {Family::family1_radial, Family::family1_smooth, Family::family2_radial,
                     Family::two_lines, Family::ball_tangent, Family::flat, Family::product_m_sets,
                     Family::conjecture_probe})
        if (name == to_string(f))
            return f;
    throw InvalidArgument("unknown family '" + name + "'");
}

double family2_root(const RadialFunction &phi) {
    if (!(phi.phi(0.0) < 0.0))
        throw InvalidInstance("family-2 profile needs phi(0) < 0");
    double hi = 1.0;
    int grow = 0;
    while (!(phi.phi(hi) > 0.0)) {
        if (++grow > 64 || hi >= phi.domain_radius)
            throw InvalidInstance("family-2 profile " + phi.name + " has no positive root");
        hi = std::min(2.0 * hi, phi.domain_radius);
    }
    double lo = 0.0;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (phi.phi(mid) > 0.0 ? hi : lo) = mid;
    }
    return std::abs(phi.phi(lo)) <= std::abs(phi.phi(hi)) ? lo : hi;
}

TheoryConstants theory_constants(const Problem &P, const InstanceMeta &meta) {
    TheoryConstants tc;
    tc.omega = meta.omega;
    if (tc.omega) {
        const double w2 = *tc.omega * *tc.omega;
        tc.map_bound = std::sqrt(1.0 - w2);
        tc.crm_bound = std::sqrt((1.0 - w2) / (1.0 + w2));
    }
    switch (meta.family) {
    case Family::family1_radial:
    case Family::ball_tangent:
    case Family::flat: {
        if (!meta.phi)
            throw InvalidInstance("family-1 radial constants need phi");
        tc.gamma_hat = gamma_hat(*meta.phi);
        tc.gamma = tc.gamma_hat;
        tc.crm_family1_bound = 1.0 - *tc.gamma_hat;
        break;
    }
    case Family::family1_smooth: {
        if (!meta.f)
            throw InvalidInstance("family-1 smooth constants need f");
        const auto *E = dynamic_cast<const EpigraphSmooth *>(P.K.get());
        if (!E)
            throw InvalidInstance("family-1 smooth constants need an EpigraphSmooth K");
        const auto gl = gamma_limit(*E, sample_directions(meta.n, 720));
        tc.gamma = gl.gamma;
        tc.gamma_direction_dependent = gl.direction_dependent;
        tc.crm_family1_bound = std::sqrt(1.0 - gl.gamma * gl.gamma);
        if (meta.hessian_eigen_range)
            tc.hessian_gamma_lower =
                meta.hessian_eigen_range->first / (2.0 * meta.hessian_eigen_range->second);
        break;
    }
    case Family::family2_radial: {
        if (!meta.phi)
            throw InvalidInstance("family-2 constants need phi");
        const double ts = family2_root(*meta.phi);
        const double d = meta.phi->dphi(ts);
        tc.t_star = ts;
        tc.map_family2_constant = 1.0 / (1.0 + ts * d * d);
        tc.map_family2_ray_rate = 1.0 / (1.0 + d * d);
        break;
    }
    default:
        break;
    }
    return tc;
}

} // namespace circumfeas
