#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "convexity.hpp"
#include "errors.hpp"
#include "measure.hpp"
#include "transport.hpp"

namespace otconv {

using nlohmann::json;

// Measure files: {"dim": d, "atoms": [[...],...], "weights": [...]}.
// Unknown fields are ignored; missing fields are errors.

inline json measure_to_json(const DiscreteMeasure& mu) {
  return json{{"dim", mu.dim()}, {"atoms", mu.atoms()}, {"weights", mu.weights()}};
}

inline DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("measure JSON must be an object");
  for (const char* field : {"dim", "atoms", "weights"})
    if (!j.contains(field))
      throw ParseError(std::string("measure JSON missing field '") + field + "'");
  int dim;
  std::vector<Point> atoms;
  std::vector<double> weights;
  try {
    dim = j.at("dim").get<int>();
    atoms = j.at("atoms").get<std::vector<Point>>();
    weights = j.at("weights").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed measure JSON: ") + e.what());
  }
  for (const Point& p : atoms)
    if (static_cast<int>(p.size()) != dim)
      throw DimensionMismatch("atom length does not match declared dim");
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

inline DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measure file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return measure_from_json(j);
}

// Plan files: {"source": <measure>, "target": <measure>,
//              "entries": [[i, j, mass], ...]}.

inline json plan_to_json(const TransportPlan& plan) {
  json entries = json::array();
  for (const PlanEntry& e : plan.entries())
    entries.push_back({e.source_index, e.target_index, e.mass});
  return json{{"source", measure_to_json(plan.source())},
              {"target", measure_to_json(plan.target())},
              {"entries", std::move(entries)}};
}

inline TransportPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("plan JSON must be an object");
  for (const char* field : {"source", "target", "entries"})
    if (!j.contains(field))
      throw ParseError(std::string("plan JSON missing field '") + field + "'");
  DiscreteMeasure source = measure_from_json(j.at("source"));
  DiscreteMeasure target = measure_from_json(j.at("target"));
  std::vector<PlanEntry> entries;
  try {
    for (const json& row : j.at("entries"))
      entries.push_back({row.at(0).get<std::size_t>(), row.at(1).get<std::size_t>(),
                         row.at(2).get<double>()});
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed plan entries: ") + e.what());
  }
  return TransportPlan(std::move(source), std::move(target), std::move(entries));
}

inline TransportPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return plan_from_json(j);
}

// Reports: {verdict, worst_slack, witness, checks_run, seed}.

inline json witness_to_json(const Witness& w) {
  json j{{"description", w.description}};
  if (w.t) j["t"] = *w.t;
  if (w.t_triple) j["t_triple"] = *w.t_triple;
  return j;
}

inline json report_to_json(const ConvexityReport& report) {
  json j{{"verdict", to_string(report.verdict)},
         {"worst_slack", report.worst_slack},
         {"witness", report.witness ? witness_to_json(*report.witness) : json()},
         {"checks_run", report.checks_run},
         {"seed", report.seed}};
  return j;
}

/// Combined report in the standard schema plus a per-family breakdown.
inline json equivalence_report_to_json(const EquivalenceReport& suite) {
  json j = report_to_json(suite.combined());
  j["families"] = json{{"geodesics", report_to_json(suite.geodesics)},
                       {"generalized_geodesics", report_to_json(suite.generalized)},
                       {"plan_curves", report_to_json(suite.plan_curves)}};
  j["families_agree"] = suite.verdicts_agree();
  j["budget"] = suite.budget;
  return j;
}

}  // namespace otconv
