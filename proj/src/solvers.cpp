#include "circumfeas/solvers.hpp"

#include "circumfeas/errors.hpp"
#include "circumfeas/kernels.hpp"

#include <algorithm>
#include <functional>

namespace circumfeas {

const char *to_string(Method m) {
    switch (m) {
    case Method::MAP: return "MAP";
    case Method::CRM: return "CRM";
    case Method::SePM: return "SePM";
    case Method::SiPM: return "SiPM";
    case Method::ProductCRM: return "ProductCRM";
    }
    return "?";
}

const char *to_string(StopReason r) {
    switch (r) {
    case StopReason::tol_reached: return "tol_reached";
    case StopReason::max_iter: return "max_iter";
    case StopReason::fixed_point: return "fixed_point";
    case StopReason::degenerate_fallback_loop: return "degenerate_fallback_loop";
    }
    return "?";
}

Method parse_method(const std::string &name) {
    for (Method m : {Method::MAP, Method::CRM, Method::SePM, Method::SiPM, Method::ProductCRM})
        if (name == to_string(m))
            return m;
    throw InvalidArgument("unknown method '" + name + "'");
}

void Problem::validate() const {
    if (!K || !U)
        throw InvalidProblem("problem '" + label + "': missing set");
    if (K->dim() != U->dim())
        throw InvalidProblem("problem '" + label + "': K and U differ in dimension");
    if (known_solution) {
        if (known_solution->size() != K->dim())
            throw InvalidProblem("problem '" + label + "': known solution has wrong dimension");
        if (!K->contains(*known_solution, 1e-8) || !U->contains(*known_solution, 1e-8))
            throw InvalidProblem("problem '" + label + "': known solution is not in K cap U");
    }
}

void StopRule::validate() const {
    if (!(floor_guard >= 0.0) || !(tol_abs > floor_guard))
        throw InvalidArgument("stop rule: need tol_abs > floor_guard >= 0");
    if (max_iter == 0)
        throw InvalidArgument("stop rule: max_iter must be positive");
}

void Trace::attach_reference(const Point &reference) {
    dist_to_solution.clear();
    dist_to_solution.reserve(iterates.size());
    for (const auto &x : iterates)
        dist_to_solution.push_back((x - reference).norm());
}

Point reflect(const SetOracle &S, const Point &p) { return p - 2.0 * S.displacement(p); }

Point map_step(const Problem &P, const Point &p) { return P.U->project(P.K->project(p)); }

CrmStep crm_step_detailed(const Problem &P, const Point &p) {
    if (!P.U || !P.U->is_affine())
        throw InvalidProblem("CRM requires U to be an affine manifold");
    const Point dK = P.K->displacement(p);
    if (dK.squaredNorm() == 0.0)
        return {p, CrmStep::Outcome::fixed_point};

    // a = R_K p = p + g;  b = R_U a = p + 2 par(g) - g - 2 e, with e the
    // (ideally zero) offset of p from U.
    const Point g = -2.0 * dK;
    const Point e = P.U->displacement(p);
    const Point g_par = P.U->project_direction(g);
    const Point to_b = 2.0 * g_par - g - 2.0 * e;

    // Exact collinearity only: the edges are accurate to relative rounding,
    // so very thin triangles still have well-defined circumcenters.
    const CircumcenterTolerances tol{0.0, 0.0};
    try {
        const Point offset = circumcenter_offset(g, to_b, tol);
        Point c = p - e + P.U->project_direction(offset);
        if (!c.allFinite())
            throw DegenerateCircumcenter("non-finite CRM point");
        return {std::move(c), CrmStep::Outcome::regular};
    } catch (const DegenerateCircumcenter &) {
        return {map_step(P, p), CrmStep::Outcome::fallback};
    }
}

Point crm_step(const Problem &P, const Point &p) { return crm_step_detailed(P, p).point; }

namespace {

void check_sets(const std::vector<SetPtr> &sets, const Point &p, const char *what) {
    if (sets.empty())
        throw InvalidArgument(std::string(what) + ": no sets");
    for (const auto &s : sets) {
        if (!s)
            throw InvalidArgument(std::string(what) + ": null set");
        if (s->dim() != p.size())
            throw InvalidArgument(std::string(what) + ": dimension mismatch");
    }
}

} // namespace

Point sepm_step(const std::vector<SetPtr> &sets, const Point &p) {
    check_sets(sets, p, "sepm_step");
    Point x = p;
    for (const auto &s : sets)
        x = s->project(x);
    return x;
}

Point sipm_step(const std::vector<SetPtr> &sets, const Point &p) {
    check_sets(sets, p, "sipm_step");
    return kernels::average_projections(sets, p);
}

namespace {

struct Driver {
    Method method;
    std::function<CrmStep(const Point &)> step;
    // maps the iterated point to the recorded one (identity outside the
    // product lift)
    std::function<Point(const Point &)> view;
    std::function<double(const Point &)> dist_to_K;
    std::optional<Point> known_solution;
};

Trace drive(const Driver &d, const Point &start, const StopRule &stop) {
    stop.validate();
    Trace tr;
    tr.method = d.method;

    Point recorded = d.view(start);
    auto record = [&](const Point &pt, double step_norm) {
        tr.iterates.push_back(pt);
        tr.dist_to_K.push_back(d.dist_to_K(pt));
        tr.step_norm.push_back(step_norm);
        if (d.known_solution)
            tr.dist_to_solution.push_back((pt - *d.known_solution).norm());
    };
    record(recorded, 0.0);

    constexpr std::size_t fallback_loop_limit = 50;
    std::size_t consecutive_fallbacks = 0;
    Point x = start;
    for (std::size_t k = 0; k < stop.max_iter; ++k) {
        CrmStep next = d.step(x);
        if (!next.point.allFinite())
            throw NumericalFailure(std::string(to_string(d.method)) + " produced a non-finite iterate",
                                   k + 1);
        Point next_view = d.view(next.point);
        const double step = (next_view - recorded).norm();
        if (next.outcome == CrmStep::Outcome::fixed_point ||
            step <= stop.floor_guard * recorded.norm()) {
            tr.stop_reason = StopReason::fixed_point;
            return tr;
        }
        record(next_view, step);
        if (next.outcome == CrmStep::Outcome::fallback) {
            tr.fallback_iterations.push_back(k + 1);
            if (++consecutive_fallbacks >= fallback_loop_limit) {
                tr.stop_reason = StopReason::degenerate_fallback_loop;
                return tr;
            }
        } else {
            consecutive_fallbacks = 0;
        }
        x = std::move(next.point);
        recorded = std::move(next_view);
        const bool at_solution = d.known_solution && tr.dist_to_solution.back() <= stop.tol_abs;
        if (step <= stop.tol_abs || at_solution) {
            tr.stop_reason = StopReason::tol_reached;
            return tr;
        }
    }
    tr.stop_reason = StopReason::max_iter;
    return tr;
}

Point identity(const Point &p) { return p; }

} // namespace

Trace run(Method method, const Problem &P, const Point &x0, const StopRule &stop) {
    P.validate();
    require_finite(x0, "run: x0");
    if (x0.size() != P.dim())
        throw InvalidArgument("run: x0 has wrong dimension");
    Driver d;
    d.method = method;
    d.view = identity;
    d.dist_to_K = [&](const Point &x) { return P.K->distance(x); };
    d.known_solution = P.known_solution;
    Point start = x0;
    switch (method) {
    case Method::MAP:
        d.step = [&](const Point &x) { return CrmStep{map_step(P, x), CrmStep::Outcome::regular}; };
        break;
    case Method::CRM:
        if (!P.U->is_affine())
            throw InvalidProblem("CRM requires U to be an affine manifold");
        start = P.U->project(x0);
        d.step = [&](const Point &x) { return crm_step_detailed(P, x); };
        break;
    default:
        throw InvalidArgument(std::string("run: method ") + to_string(method) +
                              " does not take a two-set problem");
    }
    return drive(d, start, stop);
}

Trace run(Method method, const std::vector<SetPtr> &sets, const Point &x0, const StopRule &stop,
          const std::optional<Point> &known_solution) {
    require_finite(x0, "run: x0");
    check_sets(sets, x0, "run");
    if (known_solution && known_solution->size() != x0.size())
        throw InvalidArgument("run: known solution has wrong dimension");
    Driver d;
    d.method = method;
    d.view = identity;
    d.known_solution = known_solution;
    d.dist_to_K = [&](const Point &x) {
        double worst = 0.0;
        for (const auto &s : sets)
            worst = std::max(worst, s->distance(x));
        return worst;
    };
    switch (method) {
    case Method::SePM:
        d.step = [&](const Point &x) { return CrmStep{sepm_step(sets, x), CrmStep::Outcome::regular}; };
        break;
    case Method::SiPM:
        d.step = [&](const Point &x) { return CrmStep{sipm_step(sets, x), CrmStep::Outcome::regular}; };
        break;
    case Method::ProductCRM:
        return product_crm_run(sets, x0, stop, known_solution);
    default:
        throw InvalidArgument(std::string("run: method ") + to_string(method) +
                              " needs a two-set problem");
    }
    return drive(d, x0, stop);
}

Trace product_crm_run(const std::vector<SetPtr> &sets, const Point &x0, const StopRule &stop,
                      const std::optional<Point> &known_solution) {
    require_finite(x0, "product_crm_run: x0");
    if (sets.size() < 2)
        throw InvalidArgument("product_crm_run: need at least two sets");
    check_sets(sets, x0, "product_crm_run");
    auto [K, U] = product_lift(sets);
    Problem lifted{K, U, std::nullopt, "product"};
    const int n = static_cast<int>(x0.size());

    Driver d;
    d.method = Method::ProductCRM;
    d.view = [n](const Point &p) -> Point { return p.head(n); };
    d.known_solution = known_solution;
    d.dist_to_K = [&](const Point &x) {
        double worst = 0.0;
        for (const auto &s : sets)
            worst = std::max(worst, s->distance(x));
        return worst;
    };
    d.step = [&](const Point &x) { return crm_step_detailed(lifted, x); };
    return drive(d, replicate(x0, static_cast<int>(sets.size())), stop);
}

} // namespace circumfeas
