#pragma once

#include "circumfeas/sets.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace circumfeas {

enum class Method { MAP, CRM, SePM, SiPM, ProductCRM };
enum class StopReason { tol_reached, max_iter, fixed_point, degenerate_fallback_loop };

const char *to_string(Method m);
const char *to_string(StopReason r);
Method parse_method(const std::string &name);

/// A set K and a second set U (an affine manifold whenever CRM is used),
/// optionally with a known point of K cap U.
struct Problem {
    SetPtr K;
    SetPtr U;
    std::optional<Point> known_solution;
    std::string label;

    int dim() const { return K ? K->dim() : 0; }

    /// Checks non-null sets, matching dimensions and, when present, that the
    /// known solution lies in both sets to 1e-8.
    void validate() const;
};

struct StopRule {
    double tol_abs = 1e-12;
    std::size_t max_iter = 10000;
    /// A step shorter than floor_guard * ||x|| is treated as a fixed point.
    double floor_guard = 1e-15;

    void validate() const;
};

struct Trace {
    Method method = Method::MAP;
    std::vector<Point> iterates;
    /// Empty unless a known solution (or a reference attached afterwards)
    /// is available.
    std::vector<double> dist_to_solution;
    std::vector<double> dist_to_K;
    /// ||x^k - x^{k-1}||, 0 for k = 0.
    std::vector<double> step_norm;
    StopReason stop_reason = StopReason::max_iter;
    /// Iterations whose CRM step fell back to a MAP step.
    std::vector<std::size_t> fallback_iterations;

    std::size_t size() const { return iterates.size(); }
    const Point &last() const { return iterates.back(); }

    /// Fills dist_to_solution with ||x^k - reference||.
    void attach_reference(const Point &reference);
};

/// R_S(p) = 2 P_S(p) - p.
Point reflect(const SetOracle &S, const Point &p);

/// T(p) = P_U(P_K(p)).
Point map_step(const Problem &P, const Point &p);

struct CrmStep {
    enum class Outcome { regular, fixed_point, fallback };
    Point point;
    Outcome outcome = Outcome::regular;
};

/// Circumcenter of (p, R_K p, R_U R_K p) for p in U. The reflections are
/// formed from the set displacements, so the triangle edges keep relative
/// accuracy even when R_K p is within rounding distance of p; the result is
/// mapped back onto U, where the exact circumcenter lies. Falls back to a
/// MAP step when the three points are exactly collinear.
CrmStep crm_step_detailed(const Problem &P, const Point &p);
Point crm_step(const Problem &P, const Point &p);

/// P_{K_m} o ... o P_{K_1}.
Point sepm_step(const std::vector<SetPtr> &sets, const Point &p);
/// (1/m) sum_i P_{K_i}.
Point sipm_step(const std::vector<SetPtr> &sets, const Point &p);

/// MAP or CRM on a two-set problem. CRM first replaces x0 by P_U(x0).
Trace run(Method method, const Problem &P, const Point &x0, const StopRule &stop = {});

/// SePM or SiPM on m sets; dist_to_K records the largest distance to any
/// set.
Trace run(Method method, const std::vector<SetPtr> &sets, const Point &x0,
          const StopRule &stop = {}, const std::optional<Point> &known_solution = {});

/// CRM on the Pierra lift of m >= 2 sets, started from (x0, ..., x0). The
/// trace holds the first-block components.
Trace product_crm_run(const std::vector<SetPtr> &sets, const Point &x0,
                      const StopRule &stop = {},
                      const std::optional<Point> &known_solution = {});

} // namespace circumfeas
