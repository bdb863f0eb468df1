#pragma once

#include "circumfeas/diagnostics.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace circumfeas {

/// Parameters by family (all optional, defaults in brackets):
///   n [1]        base dimension (family 1/2 radial, ball_tangent, flat); R^n for product_m_sets [2]
///   x0_scale     first coordinate of the default start [3; 0.9 ballcap; 0.5 flat]
///   alpha, c     for the default profile of family1_radial (power(alpha)) and family2_radial
///   theta [30]   angle in degrees (two_lines)
///   m [3]        number of sets (product_m_sets)
///   height [0.5] ball center height (conjecture_probe)
///   seed [1]     random choices (product_m_sets normals, convexity spot checks)
struct InstanceSpec {
    Family family = Family::two_lines;
    std::map<std::string, double> parameters;
    std::string phi; // RadialFunction::parse syntax
    std::string f;   // SmoothFunction::parse syntax
    std::optional<std::vector<double>> x0;
    StopRule stop;
    std::string label;

    double param(const std::string &name, double fallback) const;
};

struct Instance {
    Family family = Family::two_lines;
    Problem problem;
    /// The m sets of product_m_sets; empty otherwise.
    std::vector<SetPtr> sets;
    InstanceMeta meta;
    Point x0;
    /// Started on a ray of U outside K cap U (family 2, conjecture_probe):
    /// the limit of both methods on that ray.
    std::optional<Point> ray_solution;
    /// Points of K cap U used for the Fejer and dominance checks.
    std::vector<Point> witnesses;
    std::optional<RateClass> map_prediction;
    std::optional<RateClass> crm_prediction;
};

/// Validates the family assumptions and throws InvalidInstance naming the
/// one that fails.
Instance build_instance(const InstanceSpec &spec);

struct MethodResult {
    Trace trace;
    std::optional<RateReport> report;
    /// Reached the solution before enough error entries accumulated.
    bool finite_termination = false;
    std::string note;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ComparisonReport {
    InstanceSpec instance;
    MethodResult map;
    MethodResult crm;
    TheoryConstants constants;
    double fejer_violation = 0.0;
    std::optional<double> dominance_violation;
    std::vector<Verdict> verdicts;
    bool exploratory = false;

    /// All verdicts pass; exploratory reports always pass.
    bool passed() const;
};

/// Largest excess of ||C(x^k) - y|| over ||T(x^k) - y|| along a CRM trace.
double dominance_check(const Problem &P, const Trace &crm_trace, const std::vector<Point> &witnesses);

/// Rate analysis of one trace. With a reference, dist_to_solution is
/// recomputed against it; otherwise an existing dist_to_solution is used,
/// and failing that the final iterate. Traces that reach the floating-point
/// floor with fewer than the default number of usable entries are analysed
/// from 3 entries.
MethodResult analyse_trace(Trace trace, const std::optional<Point> &reference = {});

ComparisonReport run_comparison(const InstanceSpec &spec);

/// run_comparison with the verdicts marked exploratory.
ComparisonReport conjecture_probe(const InstanceSpec &spec);

} // namespace circumfeas
