#pragma once

#include "circumfeas/solvers.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace circumfeas {

enum class RateClass { superlinear, linear, sublinear };
const char *to_string(RateClass c);

/// Cut-offs used by classify_rate.
struct RateThresholds {
    double superlinear = 0.05;
    double sublinear = 0.95;
};

struct RateReport {
    std::vector<double> q_tail; // e_{k+1} / e_k
    double q_hat = 0.0;
    double r_hat = 0.0;
    RateClass classification = RateClass::linear;
    std::optional<double> linear_constant;
    std::pair<std::size_t, std::size_t> window{0, 0}; // error indices [start, end]
};

inline constexpr std::size_t default_min_entries = 6;

/// e_k = ||x^k - y*||, y* = reference or else the final iterate. Entries from
/// the first one at or below max(1e-13, 1e-10 e_0) are dropped; with the
/// final iterate as reference the last 3 entries are dropped first.
std::vector<double> error_sequence(const Trace &trace, const std::optional<Point> &reference,
                                   std::size_t min_entries = default_min_entries);

/// Same truncation applied to precomputed distances.
std::vector<double> truncate_errors(std::vector<double> errors, bool self_referenced,
                                    std::size_t min_entries = default_min_entries);

/// Fills q_tail, q_hat (median of the last W = min(10, len/3) ratios) and
/// window.
RateReport q_estimate(const std::vector<double> &errors,
                      std::size_t min_entries = default_min_entries);

/// exp(slope) of the least-squares fit of ln e_k against k over the tail
/// window (the last W + 1 entries, at least 3).
double r_estimate(const std::vector<double> &errors,
                  std::size_t min_entries = default_min_entries);

/// superlinear: q_hat below the superlinear cut-off and the ratios
/// non-increasing over the window; sublinear: q_hat above the sublinear
/// cut-off; linear otherwise, with linear_constant = q_hat.
RateClass classify_rate(RateReport &report, const RateThresholds &thresholds = {});

/// q_estimate + r_estimate + classify_rate.
RateReport analyze_errors(const std::vector<double> &errors, const RateThresholds &thresholds = {},
                          std::size_t min_entries = default_min_entries);

/// Largest increase of ||x^k - y|| over consecutive iterates and witnesses.
/// Each witness must lie in K cap U to 1e-8.
double fejer_check(const Trace &trace, const std::vector<Point> &witnesses, const Problem &P);

/// Empirical lower estimate of the error-bound constant: the minimum of
/// dist(x, K) / ||x - anchor|| over points x of U sampled around the known
/// solution at each radius. Only valid when K cap U is that single point;
/// a sampled point of U inside K raises UnsupportedProblem.
double eb_omega_estimate(const Problem &P, int samples, const std::vector<double> &radius_schedule,
                         unsigned long long seed = 0x5eed);

/// Limit of phi(t) / (t phi'(t)) as t -> 0 from probes t = 1e-2 ... 1e-7.
/// Returns 0 when the probes fall below 1e-6.
double gamma_hat(const RadialFunction &phi);

struct GammaLimit {
    double gamma = 0.0; // minimum over directions
    double spread = 0.0; // max - min over directions
    bool direction_dependent = false; // spread > 1e-3
    std::vector<double> per_direction;
};

/// Per-direction limits of f(td) / (||td|| ||grad f(td)||) as t -> 0.
GammaLimit gamma_limit(const EpigraphSmooth &E, const std::vector<Point> &directions);

/// Unit directions on the circle (n = 2) or pseudo-random on the sphere.
std::vector<Point> sample_directions(int n, int count, unsigned long long seed = 7);

enum class Family {
    family1_radial,
    family1_smooth,
    family2_radial,
    two_lines,
    ball_tangent,
    flat,
    product_m_sets,
    conjecture_probe,
};
const char *to_string(Family f);
Family parse_family(const std::string &name);

/// What theory_constants needs to know about an instance.
struct InstanceMeta {
    Family family = Family::two_lines;
    std::optional<double> omega;
    std::optional<RadialFunction> phi;
    std::optional<SmoothFunction> f;
    int n = 1;
    std::optional<std::pair<double, double>> hessian_eigen_range; // (min, max)
};

struct TheoryConstants {
    std::optional<double> omega;
    std::optional<double> map_bound; // sqrt(1 - w^2)
    std::optional<double> crm_bound; // sqrt((1 - w^2) / (1 + w^2))
    std::optional<double> gamma;
    std::optional<double> gamma_hat;
    std::optional<double> crm_family1_bound; // 1 - gamma_hat (radial) or sqrt(1 - gamma^2)
    std::optional<double> map_family2_constant; // 1 / (1 + t* phi'(t*)^2)
    /// 1 / (1 + phi'(t*)^2): the MAP ratio obtained by linearizing the ray
    /// stationarity equation r + phi(r) phi'(r) = ||x|| at t*.
    std::optional<double> map_family2_ray_rate;
    std::optional<double> hessian_gamma_lower; // lambda_min / (2 lambda_max)
    std::optional<double> t_star;
    bool gamma_direction_dependent = false;
};

/// Positive root of phi by bisection, bracket [0, R] with R doubled from 1.
double family2_root(const RadialFunction &phi);

TheoryConstants theory_constants(const Problem &P, const InstanceMeta &meta);

} // namespace circumfeas
