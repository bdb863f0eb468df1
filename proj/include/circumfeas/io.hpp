#pragma once

#include "circumfeas/experiments.hpp"

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace circumfeas {

inline constexpr const char *version = "0.1.0";

/// Columns: k, x_0 .. x_{n-1}, dist_to_solution, dist_to_K, step_norm,
/// ratio; values with 17 significant digits, "nan" where undefined. ratio
/// is dist_to_solution[k] / dist_to_solution[k-1].
void write_trace_csv(std::ostream &os, const Trace &trace);
Trace read_trace_csv(std::istream &is);

void save_trace_csv(const std::string &path, const Trace &trace);
Trace load_trace_csv(const std::string &path);

nlohmann::json to_json(const Trace &trace);
nlohmann::json to_json(const RateReport &report);
nlohmann::json to_json(const TheoryConstants &tc);
nlohmann::json to_json(const MethodResult &res);
nlohmann::json to_json(const InstanceSpec &spec);
nlohmann::json to_json(const ComparisonReport &rep);

/// Throws InvalidArgument naming the offending field.
InstanceSpec spec_from_json(const nlohmann::json &j);

} // namespace circumfeas
