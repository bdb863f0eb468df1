// circumfeas: run instances, reproduce the reference suites, re-analyse traces.
//
// exit codes: 0 all verdicts pass, 1 a verdict failed, 2 configuration/IO error

#include "circumfeas/errors.hpp"
#include "circumfeas/io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace circumfeas;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string out_dir = ".";
    std::string format = "csv";
    std::optional<std::size_t> max_iter;
    std::optional<double> tol;
    std::optional<unsigned long long> seed;
    bool emit_plot_script = false;
};

void setup_logging() {
    auto log = spdlog::stderr_color_mt("circumfeas");
    spdlog::set_default_logger(log);
    const char *env = std::getenv("CIRCUMFEAS_LOG");
    const std::string level = env ? env : "off";
    if (level == "off")
        spdlog::set_level(spdlog::level::off);
    else if (level == "info")
        spdlog::set_level(spdlog::level::info);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
        throw ConfigError("CIRCUMFEAS_LOG must be off, info or debug, got '" + level + "'");
}

void apply_overrides(InstanceSpec &spec, const Options &opt) {
    if (opt.max_iter)
        spec.stop.max_iter = *opt.max_iter;
    if (opt.tol)
        spec.stop.tol_abs = *opt.tol;
    if (opt.seed)
        spec.parameters["seed"] = static_cast<double>(*opt.seed);
    try {
        spec.stop.validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError(std::string("--max-iter/--tol: ") + e.what());
    }
}

void write_text(const fs::path &p, const std::string &text) {
    std::ofstream os(p);
    if (!os)
        throw ConfigError("cannot write " + p.string());
    os << text;
}

void write_plot_script(const fs::path &dir, const std::vector<std::string> &csvs) {
    std::string s = "# gnuplot script; run from this directory\n"
                    "set datafile separator ','\nset logscale y\nset key autotitle columnhead\n"
                    "set xlabel 'k'\nset ylabel 'dist_to_solution'\nplot ";
    for (std::size_t i = 0; i < csvs.size(); ++i) {
        const std::string col = "column('dist_to_solution')";
        s += (i ? ", \\\n     '" : "'") + csvs[i] + "' using 'k':(" + col + ") with lines title '" + csvs[i] + "'";
    }
    write_text(dir / "plot.gp", s + "\n");
}

// Writes the traces and report of one comparison into dir.
void write_artifacts(const fs::path &dir, const ComparisonReport &rep, const Options &opt) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("--out-dir: cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::string> csvs;
    for (const auto *res : {&rep.map, &rep.crm}) {
        const std::string stem = std::string("trace_") + (res == &rep.map ? "map" : "crm");
        try {
            if (opt.format == "csv") {
                save_trace_csv((dir / (stem + ".csv")).string(), res->trace);
                csvs.push_back(stem + ".csv");
            } else {
                write_text(dir / (stem + ".json"), to_json(res->trace).dump(1) + "\n");
            }
        } catch (const Error &e) {
            throw ConfigError(e.what());
        }
    }
    json j = to_json(rep);
    j["config"]["out_dir"] = opt.out_dir;
    j["config"]["format"] = opt.format;
    write_text(dir / "report.json", j.dump(2) + "\n");
    if (opt.emit_plot_script && !csvs.empty())
        write_plot_script(dir, csvs);
    spdlog::info("wrote artifacts to {}", dir.string());
}

std::string summary(const MethodResult &res) {
    char buf[64];
    if (res.report)
        std::snprintf(buf, sizeof buf, "%-11s %.5f", to_string(res.report->classification), res.report->q_hat);
    else if (res.finite_termination)
        std::snprintf(buf, sizeof buf, "%-11s %zu step%s", "finite", res.trace.size() - 1,
                      res.trace.size() == 2 ? "" : "s");
    else
        std::snprintf(buf, sizeof buf, "%s", "n/a");
    return buf;
}

void print_header() {
    std::printf("%-26s %-20s %-20s %s\n", "instance", "MAP", "CRM", "result");
}

void print_row(const std::string &label, const ComparisonReport &rep) {
    std::printf("%-26s %-20s %-20s %s\n", label.c_str(), summary(rep.map).c_str(), summary(rep.crm).c_str(),
                rep.exploratory ? "EXPLORATORY" : rep.passed() ? "PASS" : "FAIL");
    for (const auto &v : rep.verdicts)
        if (!v.pass)
            std::printf("    %s: %s\n", v.name.c_str(), v.detail.c_str());
}

InstanceSpec make(Family fam, std::string label, std::map<std::string, double> params = {},
                  std::string phi = {}, std::string f = {}, std::optional<std::vector<double>> x0 = {}) {
    InstanceSpec s;
    s.family = fam;
    s.label = std::move(label);
    s.parameters = std::move(params);
    s.phi = std::move(phi);
    s.f = std::move(f);
    s.x0 = std::move(x0);
    return s;
}

std::vector<InstanceSpec> suite(const std::string &name) {
    if (name == "family1")
        return {make(Family::ball_tangent, "ball_tangent_n1", {{"n", 1}}),
                make(Family::ball_tangent, "ball_tangent_n3", {{"n", 3}}),
                make(Family::family1_radial, "power4", {}, "power(4)"),
                make(Family::flat, "flat"),
                make(Family::family1_smooth, "quadratic_1_4", {}, {}, "quadratic(1,4)",
                     std::vector<double>{3, 2, 0})};
    if (name == "family2")
        return {make(Family::family2_radial, "shifted_square", {{"x0_scale", 10}}, "shifted_power(2,1)"),
                make(Family::family2_radial, "shifted_cosh", {{"x0_scale", 10}}, "shifted_cosh(2)")};
    if (name == "errorbound")
        return {make(Family::two_lines, "two_lines_30", {{"theta", 30}}, {}, {}, std::vector<double>{1, 0}),
                make(Family::two_lines, "two_lines_60", {{"theta", 60}}, {}, {}, std::vector<double>{1, 0}),
                make(Family::two_lines, "two_lines_90", {{"theta", 90}}, {}, {}, std::vector<double>{1, 0})};
    throw ConfigError("suite must be one of family1, family2, errorbound, all; got '" + name + "'");
}

// Adds the sampled error-bound estimate to a two-lines comparison.
void add_omega_verdict(ComparisonReport &rep, unsigned long long seed) {
    const Instance inst = build_instance(rep.instance);
    const double est = eb_omega_estimate(inst.problem, 200, {1.0, 0.1, 0.01}, seed);
    const double exact = *inst.meta.omega;
    rep.verdicts.push_back({"omega_estimate", std::abs(est - exact) <= 1e-9,
                            "estimated " + std::to_string(est) + ", exact " + std::to_string(exact)});
}

int cmd_run(const std::string &config, const Options &opt) {
    std::ifstream is(config);
    if (!is)
        throw ConfigError("cannot read config file " + config);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error &e) {
        throw ConfigError("config " + config + ": " + e.what());
    }
    InstanceSpec spec;
    Options o = opt;
    try {
        spec = spec_from_json(j);
        if (j.contains("out_dir") && o.out_dir == ".")
            o.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("format") && o.format == "csv")
            o.format = j.at("format").get<std::string>();
        if (j.contains("emit_plot_script"))
            o.emit_plot_script = o.emit_plot_script || j.at("emit_plot_script").get<bool>();
    } catch (const InvalidArgument &e) {
        throw ConfigError(e.what());
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config field: ") + e.what());
    }
    if (o.format != "csv" && o.format != "json")
        throw ConfigError("config field 'format': must be csv or json");
    apply_overrides(spec, o);
    spdlog::info("running {} ({})", spec.label, to_string(spec.family));
    ComparisonReport rep;
    try {
        rep = spec.family == Family::conjecture_probe ? conjecture_probe(spec) : run_comparison(spec);
    } catch (const InvalidInstance &e) {
        throw ConfigError(e.what());
    }
    write_artifacts(o.out_dir, rep, o);
    print_header();
    print_row(spec.label.empty() ? to_string(spec.family) : spec.label, rep);
    return rep.passed() ? 0 : 1;
}

int cmd_reproduce(const std::string &name, const Options &opt) {
    const std::vector<std::string> suites =
        name == "all" ? std::vector<std::string>{"family1", "family2", "errorbound"} : std::vector<std::string>{name};
    bool ok = true;
    for (const auto &s : suites) {
        const auto specs = suite(s);
        std::printf("[%s]\n", s.c_str());
        print_header();
        for (auto spec : specs) {
            apply_overrides(spec, opt);
            spdlog::info("reproducing {}", spec.label);
            ComparisonReport rep = run_comparison(spec);
            if (spec.family == Family::two_lines)
                add_omega_verdict(rep, opt.seed.value_or(0x5eed));
            write_artifacts(fs::path(opt.out_dir) / s / spec.label, rep, opt);
            print_row(spec.label, rep);
            ok = ok && rep.passed();
        }
    }
    return ok ? 0 : 1;
}

int cmd_rates(const std::string &path) {
    Trace tr;
    try {
        tr = load_trace_csv(path);
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
    const MethodResult res = analyse_trace(std::move(tr));
    json j = {{"version", version}, {"trace", path}, {"report", res.report ? to_json(*res.report) : json(nullptr)},
              {"finite_termination", res.finite_termination}, {"note", res.note}};
    std::cout << j.dump(2) << "\n";
    if (!res.report && !res.finite_termination) {
        std::cerr << "rates: " << res.note << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Projection and circumcentered-reflection methods for convex feasibility"};
    app.require_subcommand(1);
    Options opt;
    std::size_t max_iter = 0;
    double tol = 0.0;
    unsigned long long seed = 0;
    app.add_option("--out-dir", opt.out_dir, "Directory for traces and reports");
    app.add_option("--format", opt.format, "Trace format")->check(CLI::IsMember({"csv", "json"}));
    auto *o_iter = app.add_option("--max-iter", max_iter, "Iteration budget per run")->check(CLI::PositiveNumber);
    auto *o_tol = app.add_option("--tol", tol, "Absolute stopping tolerance")->check(CLI::PositiveNumber);
    auto *o_seed = app.add_option("--seed", seed, "Seed for randomized choices");
    app.add_flag("--emit-plot-script", opt.emit_plot_script, "Write a gnuplot script next to the CSV traces");

    std::string config, suite_name, trace_path;
    auto *run = app.add_subcommand("run", "Run one instance from a JSON config")->fallthrough();
    run->add_option("config", config, "Config file")->required();
    auto *rep = app.add_subcommand("reproduce", "Run a reference suite and print a pass/fail table")->fallthrough();
    rep->add_option("suite", suite_name, "family1 | family2 | errorbound | all")
        ->required()
        ->check(CLI::IsMember({"family1", "family2", "errorbound", "all"}));
    auto *rates = app.add_subcommand("rates", "Re-analyse a trace CSV")->fallthrough();
    rates->add_option("trace", trace_path, "Trace CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (*o_iter)
        opt.max_iter = max_iter;
    if (*o_tol)
        opt.tol = tol;
    if (*o_seed)
        opt.seed = seed;

    try {
        setup_logging();
        if (*run)
            return cmd_run(config, opt);
        if (*rep)
            return cmd_reproduce(suite_name, opt);
        return cmd_rates(trace_path);
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
