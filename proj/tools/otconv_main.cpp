// Command-line front end: W2 distances and plans, curve traces, convexity
// checks, and a one-shot reproduction of the tent-kernel counterexample.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <otconv/otconv.hpp>

namespace {

using namespace otconv;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitViolated = 4;
constexpr int kExitNoGradient = 5;

// 17 significant digits guarantee that printed doubles parse back bitwise.
std::string fmt(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("OTCONV_SEED")) return std::strtoull(env, nullptr, 10);
  return kDefaultSeed;
}

Functional make_functional(const std::string& name, double eps) {
  if (name == "second-moment") return second_moment_functional();
  if (name == "potential:quadratic")
    return potential_energy([](const Point& x) { return 0.5 * squared_norm(x); },
                            [](const Point& x) { return x; },
                            "potential:quadratic");
  if (name == "interaction:weps") return interaction_energy(w_epsilon_kernel(eps));
  throw ParseError("unknown functional '" + name +
                   "'; expected second-moment | potential:quadratic | interaction:weps");
}

void emit_curve_csv(const AccelerationFreeCurve& curve, int grid, std::ostream& out) {
  out << "t,atom_index";
  for (int c = 1; c <= curve.dim(); ++c) out << ",x_" << c;
  out << ",weight\n";
  for (int k = 0; k < grid; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(grid - 1);
    const DiscreteMeasure snapshot = eval(curve, t);
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      out << fmt(t) << ',' << i;
      for (double c : snapshot.atom(i)) out << ',' << fmt(c);
      out << ',' << fmt(snapshot.weight(i)) << '\n';
    }
  }
}

void emit_value_trace(const Functional& functional, const AccelerationFreeCurve& curve,
                      int grid, std::ostream& out) {
  out << "t,value\n";
  for (int k = 0; k < grid; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(grid - 1);
    out << fmt(t) << ',' << fmt(functional.evaluate(eval(curve, t))) << '\n';
  }
}

int cmd_distance(const std::string& mu_path, const std::string& nu_path,
                 bool plan_only, const std::string& format) {
  const DiscreteMeasure mu = load_measure(mu_path);
  const DiscreteMeasure nu = load_measure(nu_path);
  const W2Solution sol = solve_w2(mu, nu);
  if (format == "csv") {
    if (plan_only) {
      std::cout << "source_index,target_index,mass\n";
      for (const PlanEntry& e : sol.plan.entries())
        std::cout << e.source_index << ',' << e.target_index << ',' << fmt(e.mass)
                  << '\n';
    } else {
      std::cout << "w2,cost\n" << fmt(sol.w2) << ',' << fmt(sol.cost) << '\n';
    }
  } else if (plan_only) {
    std::cout << plan_to_json(sol.plan).dump(2) << '\n';
  } else {
    json out{{"w2", sol.w2}, {"cost", sol.cost}, {"plan", plan_to_json(sol.plan)}};
    std::cout << out.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_curve(const std::optional<std::string>& mu_path,
              const std::optional<std::string>& nu_path,
              const std::optional<std::string>& plan_path,
              const std::optional<std::string>& anchor_path, int grid,
              const std::string& format) {
  std::optional<AccelerationFreeCurve> curve;
  if (plan_path) {
    curve = curve_from_plan(load_plan(*plan_path));
  } else {
    if (!mu_path || !nu_path)
      throw ParseError("curve needs two measure files or --plan");
    const DiscreteMeasure mu = load_measure(*mu_path);
    const DiscreteMeasure nu = load_measure(*nu_path);
    if (anchor_path)
      curve = generalized_geodesic(load_measure(*anchor_path), mu, nu);
    else
      curve = geodesic(mu, nu);
  }
  if (format == "json") {
    json rows = json::array();
    for (int k = 0; k < grid; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(grid - 1);
      const DiscreteMeasure snapshot = eval(*curve, t);
      rows.push_back({{"t", t},
                      {"atoms", snapshot.atoms()},
                      {"weights", snapshot.weights()}});
    }
    std::cout << rows.dump(2) << '\n';
  } else {
    emit_curve_csv(*curve, grid, std::cout);
  }
  return kExitOk;
}

int cmd_check(const std::string& functional_name, double eps, double lambda,
              int grid, int budget, double tol,
              const std::optional<std::uint64_t>& seed_flag, bool include_pair,
              bool first_order, const std::string& format) {
  const Functional functional = make_functional(functional_name, eps);
  SamplerConfig config;
  config.seed = resolve_seed(seed_flag);
  config.include_paper_pair = include_pair;
  config.pair_eps = eps;
  if (include_pair) {
    // The tent-kernel crossing configuration lives on the line.
    config.min_dim = 1;
    config.max_dim = 1;
  }

  const auto emit = [&format](const ConvexityReport& report, const json& full) {
    if (format == "csv") {
      std::cout << "verdict,worst_slack,checks_run,seed\n"
                << to_string(report.verdict) << ',' << fmt(report.worst_slack)
                << ',' << report.checks_run << ',' << report.seed << '\n';
    } else {
      std::cout << full.dump(2) << '\n';
    }
  };

  if (first_order) {
    const ConvexityReport report = check_displacement_monotonicity_sampled(
        functional, lambda, config, budget, tol);
    emit(report, report_to_json(report));
    return report.verdict == Verdict::Violated ? kExitViolated : kExitOk;
  }

  const EquivalenceReport suite =
      check_equivalence_suite(functional, lambda, config, budget, grid, tol);
  emit(suite.combined(), equivalence_report_to_json(suite));
  return suite.combined().verdict == Verdict::Violated ? kExitViolated : kExitOk;
}

int cmd_repro_example(double eps, const std::string& out_dir) {
  if (!(eps > 0.0))
    throw NonpositiveEpsilon("eps must be positive, got " + std::to_string(eps));
  const int grid = 1001;
  const Functional weps = interaction_energy(w_epsilon_kernel(eps));

  // (a) The crossing acceleration-free curve: mass swaps between eps and 0.
  const DiscreteMeasure mu({{eps}, {0.0}}, {0.5, 0.5});
  const DiscreteMeasure nu({{0.0}, {eps}}, {0.5, 0.5});
  const AccelerationFreeCurve crossing =
      curve_from_plan(TransportPlan(mu, nu, {{0, 0, 0.5}, {1, 1, 0.5}}));

  // (b) The geodesic with x' = x + eps/2 and y' = y + 2 eps; its value
  // profile is piecewise linear with a kink at t = 1/3.
  const DiscreteMeasure mu_b({{0.0}, {0.5 * eps}}, {0.5, 0.5});
  const DiscreteMeasure nu_b({{0.0}, {2.0 * eps}}, {0.5, 0.5});
  const AccelerationFreeCurve kink = geodesic(mu_b, nu_b);

  std::filesystem::create_directories(out_dir);
  const std::string crossing_path =
      (std::filesystem::path(out_dir) / "crossing_curve.csv").string();
  const std::string kink_path =
      (std::filesystem::path(out_dir) / "kink_geodesic.csv").string();
  std::ofstream crossing_out(crossing_path);
  std::ofstream kink_out(kink_path);
  if (!crossing_out || !kink_out)
    throw Error("cannot write traces under " + out_dir);
  emit_value_trace(weps, crossing, grid, crossing_out);
  emit_value_trace(weps, kink, grid, kink_out);

  const json summary{{"F_end", weps.evaluate(eval(crossing, 0.0))},
                     {"F_mid", weps.evaluate(eval(crossing, 0.5))},
                     {"kink_t", 1.0 / 3.0}};
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete optimal transport and Wasserstein convexity checks"};
  app.require_subcommand(1);

  std::string mu_path, nu_path;
  std::optional<std::string> curve_mu, curve_nu, plan_path, anchor_path;
  std::string functional_name = "second-moment";
  std::string out_dir = ".";
  std::string format = "json";
  std::string curve_format = "csv";
  double lambda = 0.0, eps = 1.0, tol = kSlackTolerance;
  int grid = 101, budget = 50;
  std::optional<std::uint64_t> seed_flag;
  bool include_pair = false, first_order = false;

  const auto format_check = CLI::IsMember({"json", "csv"});

  CLI::App* distance = app.add_subcommand("distance", "W2 distance and optimal plan");
  distance->add_option("mu", mu_path, "source measure JSON")->required();
  distance->add_option("nu", nu_path, "target measure JSON")->required();
  distance->add_option("--format", format, "json | csv")->check(format_check);

  CLI::App* plan_cmd = app.add_subcommand("plan", "optimal plan in the plan file schema");
  plan_cmd->add_option("mu", mu_path, "source measure JSON")->required();
  plan_cmd->add_option("nu", nu_path, "target measure JSON")->required();
  plan_cmd->add_option("--format", format, "json | csv")->check(format_check);

  CLI::App* curve_cmd = app.add_subcommand("curve", "curve snapshots over a grid");
  curve_cmd->add_option("mu", curve_mu, "source measure JSON");
  curve_cmd->add_option("nu", curve_nu, "target measure JSON");
  curve_cmd->add_option("--plan", plan_path, "acceleration-free curve from this plan file");
  curve_cmd->add_option("--anchor", anchor_path,
                        "generalized geodesic with this base measure");
  curve_cmd->add_option("--grid", grid, "number of snapshots")
      ->check(CLI::Range(3, 1000000));
  curve_cmd->add_option("--format", curve_format, "csv | json")->check(format_check);

  CLI::App* check = app.add_subcommand("check", "convexity certification");
  check->add_option("--functional", functional_name,
                    "second-moment | potential:quadratic | interaction:weps");
  check->add_option("--eps", eps, "tent kernel width");
  check->add_option("--lambda", lambda, "convexity modulus");
  check->add_option("--grid", grid, "grid size per curve")
      ->check(CLI::Range(3, 1000000));
  check->add_option("--budget", budget, "number of sampled instances")
      ->check(CLI::PositiveNumber);
  check->add_option("--seed", seed_flag, "sampler seed (overrides OTCONV_SEED)");
  check->add_option("--tol", tol, "slack tolerance")->check(CLI::PositiveNumber);
  check->add_option("--format", format, "json | csv")->check(format_check);
  check->add_flag("--include-paper-pair", include_pair,
                  "inject the known tent-kernel crossing violation");
  check->add_flag("--first-order", first_order,
                  "displacement monotonicity instead of chord checks");

  CLI::App* repro = app.add_subcommand("repro-example",
                                       "tent-kernel counterexample traces");
  repro->add_option("--eps", eps, "tent kernel width");
  repro->add_option("--out", out_dir, "directory for the CSV traces");

  CLI11_PARSE(app, argc, argv);

  try {
    if (distance->parsed()) return cmd_distance(mu_path, nu_path, false, format);
    if (plan_cmd->parsed()) return cmd_distance(mu_path, nu_path, true, format);
    if (curve_cmd->parsed())
      return cmd_curve(curve_mu, curve_nu, plan_path, anchor_path, grid,
                       curve_format);
    if (check->parsed())
      return cmd_check(functional_name, eps, lambda, grid, budget, tol, seed_flag,
                       include_pair, first_order, format);
    if (repro->parsed()) return cmd_repro_example(eps, out_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DimensionMismatch& e) {
    std::cerr << "dimension mismatch: " << e.what() << '\n';
    return kExitDimension;
  } catch (const GradientUnavailable& e) {
    std::cerr << "gradient unavailable: " << e.what() << '\n';
    return kExitNoGradient;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
