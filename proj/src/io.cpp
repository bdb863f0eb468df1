#include "circumfeas/io.hpp"

#include "circumfeas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace circumfeas {

using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void put(std::ostream &os, double v) {
    if (std::isnan(v)) {
        os << "nan";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

double at(const std::vector<double> &v, std::size_t k) { return k < v.size() ? v[k] : nan; }

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string &s, std::size_t line) {
    if (s == "nan")
        return nan;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw InvalidArgument("trace csv line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

json opt(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

} // namespace

void write_trace_csv(std::ostream &os, const Trace &trace) {
    if (trace.iterates.empty())
        throw InvalidArgument("write_trace_csv: empty trace");
    const auto n = trace.iterates.front().size();
    os << "k";
    for (Eigen::Index i = 0; i < n; ++i)
        os << ",x_" << i;
    os << ",dist_to_solution,dist_to_K,step_norm,ratio\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        os << k;
        for (Eigen::Index i = 0; i < n; ++i) {
            os << ',';
            put(os, trace.iterates[k][i]);
        }
        const double d = at(trace.dist_to_solution, k);
        const double prev = k > 0 ? at(trace.dist_to_solution, k - 1) : nan;
        for (double v : {d, at(trace.dist_to_K, k), at(trace.step_norm, k), prev > 0.0 ? d / prev : nan}) {
            os << ',';
            put(os, v);
        }
        os << '\n';
    }
}

Trace read_trace_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line))
        throw InvalidArgument("trace csv: missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto head = split(line);
    const std::vector<std::string> tail{"dist_to_solution", "dist_to_K", "step_norm", "ratio"};
    if (head.size() < 6 || head.front() != "k")
        throw InvalidArgument("trace csv: header must start with k and hold at least one coordinate");
    const std::size_t n = head.size() - 5;
    for (std::size_t i = 0; i < n; ++i)
        if (head[1 + i] != "x_" + std::to_string(i))
            throw InvalidArgument("trace csv: expected column x_" + std::to_string(i) + ", got '" +
                                  head[1 + i] + "'");
    for (std::size_t i = 0; i < tail.size(); ++i)
        if (head[1 + n + i] != tail[i])
            throw InvalidArgument("trace csv: expected column " + tail[i] + ", got '" + head[1 + n + i] + "'");

    Trace tr;
    std::vector<double> dsol;
    bool all_dsol = true;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != head.size())
            throw InvalidArgument("trace csv line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(head.size()) + " fields");
        if (parse_double(cells[0], lineno) != static_cast<double>(tr.size()))
            throw InvalidArgument("trace csv line " + std::to_string(lineno) + ": k out of sequence");
        Point x(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            x[static_cast<Eigen::Index>(i)] = parse_double(cells[1 + i], lineno);
        tr.iterates.push_back(std::move(x));
        const double d = parse_double(cells[1 + n], lineno);
        all_dsol = all_dsol && !std::isnan(d);
        dsol.push_back(d);
        tr.dist_to_K.push_back(parse_double(cells[2 + n], lineno));
        tr.step_norm.push_back(parse_double(cells[3 + n], lineno));
    }
    if (tr.iterates.empty())
        throw InvalidArgument("trace csv: no rows");
    if (all_dsol)
        tr.dist_to_solution = std::move(dsol);
    return tr;
}

void save_trace_csv(const std::string &path, const Trace &trace) {
    std::ofstream os(path);
    if (!os)
        throw Error("cannot write " + path);
    write_trace_csv(os, trace);
    if (!os)
        throw Error("write failed: " + path);
}

Trace load_trace_csv(const std::string &path) {
    std::ifstream is(path);
    if (!is)
        throw Error("cannot read " + path);
    return read_trace_csv(is);
}

json to_json(const Trace &trace) {
    json rows = json::array();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto &x = trace.iterates[k];
        rows.push_back({{"k", k},
                        {"x", std::vector<double>(x.data(), x.data() + x.size())},
                        {"dist_to_solution", k < trace.dist_to_solution.size() ? json(trace.dist_to_solution[k])
                                                                               : json(nullptr)},
                        {"dist_to_K", trace.dist_to_K[k]},
                        {"step_norm", trace.step_norm[k]}});
    }
    return {{"method", to_string(trace.method)},
            {"stop_reason", to_string(trace.stop_reason)},
            {"fallback_iterations", trace.fallback_iterations},
            {"rows", rows}};
}

json to_json(const RateReport &r) {
    return {{"q_tail", r.q_tail},
            {"q_hat", r.q_hat},
            {"r_hat", r.r_hat},
            {"classification", to_string(r.classification)},
            {"linear_constant", opt(r.linear_constant)},
            {"window", {r.window.first, r.window.second}}};
}

json to_json(const TheoryConstants &tc) {
    return {{"omega", opt(tc.omega)},
            {"map_bound", opt(tc.map_bound)},
            {"crm_bound", opt(tc.crm_bound)},
            {"gamma", opt(tc.gamma)},
            {"gamma_hat", opt(tc.gamma_hat)},
            {"crm_family1_bound", opt(tc.crm_family1_bound)},
            {"map_family2_constant", opt(tc.map_family2_constant)},
            {"map_family2_ray_rate", opt(tc.map_family2_ray_rate)},
            {"hessian_gamma_lower", opt(tc.hessian_gamma_lower)},
            {"t_star", opt(tc.t_star)},
            {"gamma_direction_dependent", tc.gamma_direction_dependent}};
}

json to_json(const MethodResult &res) {
    return {{"method", to_string(res.trace.method)},
            {"iterations", res.trace.size() - 1},
            {"stop_reason", to_string(res.trace.stop_reason)},
            {"fallback_iterations", res.trace.fallback_iterations.size()},
            {"report", res.report ? to_json(*res.report) : json(nullptr)},
            {"finite_termination", res.finite_termination},
            {"note", res.note}};
}

json to_json(const InstanceSpec &spec) {
    json j = {{"family", to_string(spec.family)},
              {"parameters", spec.parameters},
              {"phi", spec.phi},
              {"f", spec.f},
              {"label", spec.label},
              {"stop",
               {{"tol_abs", spec.stop.tol_abs},
                {"max_iter", spec.stop.max_iter},
                {"floor_guard", spec.stop.floor_guard}}}};
    j["x0"] = spec.x0 ? json(*spec.x0) : json(nullptr);
    return j;
}

json to_json(const ComparisonReport &rep) {
    json verdicts = json::array();
    for (const auto &v : rep.verdicts)
        verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    return {{"version", version},
            {"config", to_json(rep.instance)},
            {"map_report", to_json(rep.map)},
            {"crm_report", to_json(rep.crm)},
            {"constants", to_json(rep.constants)},
            {"fejer_violation", rep.fejer_violation},
            {"dominance_violation", opt(rep.dominance_violation)},
            {"verdicts", verdicts},
            {"exploratory", rep.exploratory},
            {"passed", rep.passed()}};
}

namespace {

template <class T>
T field(const json &j, const std::string &name, const std::string &path) {
    try {
        return j.at(name).get<T>();
    } catch (const json::exception &e) {
        throw InvalidArgument("config field '" + path + name + "': " + e.what());
    }
}

} // namespace

InstanceSpec spec_from_json(const json &j) {
    if (!j.is_object())
        throw InvalidArgument("config: expected a JSON object");
    static const std::vector<std::string> known{"family", "parameters", "phi",     "f",      "x0",
                                                "stop",   "label",      "out_dir", "format", "emit_plot_script"};
    for (const auto &[k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw InvalidArgument("config field '" + k + "': unknown key");

    InstanceSpec spec;
    try {
        spec.family = parse_family(field<std::string>(j, "family", ""));
    } catch (const InvalidArgument &e) {
        throw InvalidArgument(std::string("config field 'family': ") + e.what());
    }
    if (j.contains("parameters")) {
        const auto &p = j["parameters"];
        if (!p.is_object())
            throw InvalidArgument("config field 'parameters': expected an object");
        for (const auto &[k, v] : p.items()) {
            if (!v.is_number())
                throw InvalidArgument("config field 'parameters." + k + "': expected a number");
            spec.parameters[k] = v.get<double>();
        }
    }
    if (j.contains("phi"))
        spec.phi = field<std::string>(j, "phi", "");
    if (j.contains("f"))
        spec.f = field<std::string>(j, "f", "");
    if (j.contains("label"))
        spec.label = field<std::string>(j, "label", "");
    if (j.contains("x0") && !j["x0"].is_null())
        spec.x0 = field<std::vector<double>>(j, "x0", "");
    if (j.contains("stop")) {
        const auto &s = j["stop"];
        if (!s.is_object())
            throw InvalidArgument("config field 'stop': expected an object");
        for (const auto &[k, v] : s.items())
            if (k != "tol_abs" && k != "max_iter" && k != "floor_guard")
                throw InvalidArgument("config field 'stop." + k + "': unknown key");
        if (s.contains("tol_abs"))
            spec.stop.tol_abs = field<double>(s, "tol_abs", "stop.");
        if (s.contains("max_iter")) {
            const auto m = field<long long>(s, "max_iter", "stop.");
            if (m <= 0)
                throw InvalidArgument("config field 'stop.max_iter': must be positive");
            spec.stop.max_iter = static_cast<std::size_t>(m);
        }
        if (s.contains("floor_guard"))
            spec.stop.floor_guard = field<double>(s, "floor_guard", "stop.");
        try {
            spec.stop.validate();
        } catch (const InvalidArgument &e) {
            throw InvalidArgument(std::string("config field 'stop': ") + e.what());
        }
    }
    return spec;
}

} // namespace circumfeas
