#include "rsigma/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "rsigma/density.hpp"
#include "rsigma/errors.hpp"
#include "rsigma/explorer.hpp"
#include "rsigma/primes.hpp"
#include "rsigma/solver.hpp"
#include "rsigma/zeta.hpp"

namespace rsigma::cli {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double round_down(real x) {
  double d = static_cast<double>(x);
  if (static_cast<real>(d) > x) d = std::nextafter(d, -kInf);
  return d;
}

double round_up(real x) {
  double d = static_cast<double>(x);
  if (static_cast<real>(d) < x) d = std::nextafter(d, kInf);
  return d;
}

// Brackets are rounded outward so the double pair still encloses the value.
json to_json(const Bracket& b) { return json{{"lo", round_down(b.lo)}, {"hi", round_up(b.hi)}}; }

json to_json(const RootResult& r) {
  return json{{"value", to_json(r.value)},
              {"iterations", r.iterations},
              {"residual", to_json(r.residual)},
              {"residual_at_lo", to_json(r.residual_lo)},
              {"residual_at_hi", to_json(r.residual_hi)},
              {"boundary", r.boundary},
              {"method", r.method}};
}

bool is_bracket(const json& j) {
  return j.is_object() && j.size() == 2 && j.contains("lo") && j.contains("hi") &&
         j["lo"].is_number() && j["hi"].is_number();
}

std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

void collect_brackets(const json& j, const std::string& path, json& into) {
  if (is_bracket(j)) {
    into[path] = json::array({j["lo"], j["hi"]});
    return;
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      collect_brackets(it.value(), path + "/" + escape_pointer_token(it.key()), into);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      collect_brackets(j[i], path + "/" + std::to_string(i), into);
    }
  }
}

void flatten(const json& j, const std::string& path, std::ostream& out) {
  if (j.is_object() && !j.empty()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), path + "/" + escape_pointer_token(it.key()), out);
    }
  } else if (j.is_array() && !j.empty()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "/" + std::to_string(i), out);
  } else {
    out << path << '\t' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

struct Globals {
  std::string format = "json";
  std::uint64_t prime_limit = kDefaultPrimeLimit;
  std::string out_path;
};

class Context {
 public:
  explicit Context(const Globals& g) : globals_(g) {}

  const PrimeTable& table() {
    if (!table_) {
      const char* dir = std::getenv(kPrimeCacheEnv);
      table_ = std::make_unique<PrimeTable>(
          load_or_sieve(globals_.prime_limit, dir ? std::filesystem::path(dir) : std::filesystem::path()));
    }
    return *table_;
  }

  json provenance(const json& tolerances) const {
    json p{{"tool", "rsigma"},
           {"version", kToolVersion},
           {"prime_limit", globals_.prime_limit},
           {"tolerances", tolerances}};
    p["prime_count"] = table_ ? json(table_->size()) : json(nullptr);
    return p;
  }

 private:
  const Globals& globals_;
  std::unique_ptr<PrimeTable> table_;
};

json root_row(const RootResult& r) { return to_json(r); }

json selection_json(const Selection& s) {
  return json{{"M", s.m},
              {"R1", root_row(s.thresholds[0])},
              {"R2", root_row(s.thresholds[1])},
              {"R4", root_row(s.thresholds[2])},
              {"eps_used", static_cast<double>(s.eps_used)}};
}

json gap_lemma_json(const GapLemmaReport& rep) {
  auto record = [](const RatioRecord& r) {
    return json{{"j", r.index}, {"p_j", r.prime}, {"p_j1", r.next},
                {"ratio", r.ratio}, {"below_sqrt2", r.below_sqrt2}};
  };
  json excluded = json::array();
  for (const auto& r : rep.excluded) excluded.push_back(record(r));
  json failures = json::array();
  for (const auto& r : rep.failures) failures.push_back(record(r));
  return json{{"name", "gap-lemma"},
              {"status", rep.pass ? "PASS" : "FAIL"},
              {"checked", rep.checked},
              {"max_ratio", record(rep.worst)},
              {"excluded", excluded},
              {"failures", failures},
              {"min_slack", rep.min_slack}};
}

json inequality_json(const InequalityReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(json{{"name", c.name},
                          {"statement", c.statement},
                          {"from", static_cast<double>(c.from)},
                          {"to", static_cast<double>(c.to)},
                          {"includes_right_end", c.includes_right_end},
                          {"points", c.points},
                          {"min_slack", static_cast<double>(c.min_slack)},
                          {"argmin", static_cast<double>(c.argmin)},
                          {"status", c.pass ? "PASS" : "FAIL"}});
  }
  return json{{"name", "inequalities"},
              {"status", rep.pass ? "PASS" : "FAIL"},
              {"grid_step", static_cast<double>(rep.grid_step)},
              {"checks", checks}};
}

json monotonicity_json(const MonotonicityReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back(json{{"name", c.name},
                          {"points", c.points},
                          {"min_slack", static_cast<double>(c.min_slack)},
                          {"argmin", static_cast<double>(c.argmin)},
                          {"status", c.pass ? "PASS" : "FAIL"}});
  }
  return json{{"name", "monotonicity"}, {"status", rep.pass ? "PASS" : "FAIL"}, {"checks", checks}};
}

void emit(const json& envelope, const std::string& format, std::ostream& out,
          const json* tsv_values) {
  if (format == "json") {
    out << envelope.dump(2) << '\n';
    return;
  }
  if (tsv_values) {
    for (const auto& v : *tsv_values) out << v.dump() << '\n';
    return;
  }
  flatten(envelope, "", out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rsigma: density thresholds for restricted divisor functions sigma_{-r,k}"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals globals;
  app.add_option("--format", globals.format, "Output format")
      ->check(CLI::IsMember({"json", "tsv"}));
  app.add_option("--prime-limit", globals.prime_limit, "Sieve limit for the prime table")
      ->check(CLI::Range(std::uint64_t{2}, std::uint64_t{0xFFFFFFFF}));
  app.add_option("--out", globals.out_path, "Write results to PATH instead of stdout");

  int k = 1, k_max = 10;
  double r = 0, x = 0, eps = 0, resolution = 0, grid_step = 1e-3;
  std::uint64_t steps = 1000, bound = 1;
  std::size_t m_max = 20;
  bool with_trace = false;
  std::string suite = "all";

  auto* eta_cmd = app.add_subcommand("eta", "Solve eta_k");
  eta_cmd->add_option("--k", k, "k >= 1")->required()->check(CLI::PositiveNumber);
  eta_cmd->add_option("--eps", eps, "Bracket width (default 1e-10)");

  auto* limit_cmd = app.add_subcommand("eta-limit", "Solve the k -> infinity threshold eta");
  limit_cmd->add_option("--eps", eps, "Bracket width (default 1e-9)");

  auto* thr_cmd = app.add_subcommand("thresholds", "R_k(1), R_k(2), R_k(4) and M_k");
  thr_cmd->add_option("--k", k, "k >= 1")->required()->check(CLI::PositiveNumber);
  thr_cmd->add_option("--eps", eps, "Bracket width (default 1e-10)");

  auto* table_cmd = app.add_subcommand("table", "Thresholds for k = 1..kmax");
  table_cmd->add_option("--kmax", k_max, "Largest k")->required()->check(CLI::PositiveNumber);
  table_cmd->add_option("--eps", eps, "Bracket width (default 1e-10)");

  auto* density_cmd = app.add_subcommand("density", "Density verdict for (k, r)");
  density_cmd->add_option("--k", k, "k >= 1")->required()->check(CLI::PositiveNumber);
  density_cmd->add_option("--r", r, "r > 1")->required();
  density_cmd->add_option("--eps", eps, "Tolerance for log G (default automatic)");

  auto* approx_cmd = app.add_subcommand("approximate", "Greedy approximation of a log-target");
  approx_cmd->add_option("--k", k, "k >= 1")->required()->check(CLI::PositiveNumber);
  approx_cmd->add_option("--r", r, "r > 1")->required();
  approx_cmd->add_option("--x", x, "Target in [0, log G_k(r))")->required();
  approx_cmd->add_option("--steps", steps, "Number of primes to use")->required();
  approx_cmd->add_flag("--trace", with_trace, "Include the full C, D, E sequences");

  auto* census_cmd = app.add_subcommand("census", "Enumerate sigma_{-r,k}(n) for n <= bound");
  census_cmd->add_option("--k", k, "k >= 1")->required()->check(CLI::PositiveNumber);
  census_cmd->add_option("--r", r, "r > 1")->required();
  census_cmd->add_option("--bound", bound, "Largest n")->required();
  census_cmd->add_option("--resolution", resolution, "Minimum reported gap width");
  census_cmd->add_option("--m-max", m_max, "Largest m for the analytic overlay");

  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_option("--suite", suite, "Suite")
      ->check(CLI::IsMember({"gap-lemma", "inequalities", "monotonicity", "all"}));
  verify_cmd->add_option("--grid-step", grid_step, "Grid step (<= 1e-3)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  Context ctx(globals);
  json envelope;
  json parameters;
  json result;
  json tolerances = json::object();
  const json* tsv_values = nullptr;
  json census_values;
  int exit_code = kExitOk;

  try {
    if (eta_cmd->parsed()) {
      const real e = eps > 0 ? eps : kThresholdEps;
      envelope["command"] = "eta";
      parameters = {{"k", k}, {"eps", static_cast<double>(e)}};
      const auto& table = ctx.table();
      const RootResult value = eta(k, e);
      const Selection sel = m_selector(table, k, e);
      const auto& chosen = sel.thresholds[sel.m == 1 ? 0 : sel.m == 2 ? 1 : 2];
      result = {{"k", k},
                {"M", sel.m},
                {"eta", to_json(value)},
                {"cross_check",
                 {{"threshold", to_json(chosen)},
                  {"agrees", value.value.lo <= chosen.value.hi &&
                                 chosen.value.lo <= value.value.hi}}}};
      tolerances["eps"] = static_cast<double>(e);
    } else if (limit_cmd->parsed()) {
      const real e = eps > 0 ? eps : kEtaLimitEps;
      envelope["command"] = "eta-limit";
      parameters = {{"eps", static_cast<double>(e)}};
      result = {{"eta", to_json(eta_limit(e))}};
      tolerances["eps"] = static_cast<double>(e);
    } else if (thr_cmd->parsed()) {
      const real e = eps > 0 ? eps : kThresholdEps;
      envelope["command"] = "thresholds";
      parameters = {{"k", k}, {"eps", static_cast<double>(e)}};
      result = selection_json(m_selector(ctx.table(), k, e));
      result["k"] = k;
      tolerances["eps"] = static_cast<double>(e);
    } else if (table_cmd->parsed()) {
      const real e = eps > 0 ? eps : kThresholdEps;
      envelope["command"] = "table";
      parameters = {{"kmax", k_max}, {"eps", static_cast<double>(e)}};
      const EtaTable t = eta_table(ctx.table(), k_max, e);
      json rows = json::array();
      for (const auto& row : t.rows) {
        rows.push_back({{"k", row.k},
                        {"M", row.m},
                        {"R1", to_json(row.thresholds[0])},
                        {"R2", to_json(row.thresholds[1])},
                        {"R4", to_json(row.thresholds[2])},
                        {"eta", to_json(row.eta)},
                        {"eta_matches_R_M", row.matches_selected_threshold}});
      }
      result = {{"rows", rows},
                {"eta_limit", to_json(t.limit)},
                {"unresolved_increase", t.unresolved_increase},
                {"decreasing", t.decreasing},
                {"unresolved_below_limit", t.unresolved_below_limit},
                {"above_limit", t.above_limit},
                {"consistent", t.consistent}};
      tolerances["eps"] = static_cast<double>(e);
    } else if (density_cmd->parsed()) {
      envelope["command"] = "density";
      parameters = {{"k", k}, {"r", r}};
      const real e = eps > 0 ? static_cast<real>(eps) : evaluation_eps(r);
      const DensityReport rep = density_report(ctx.table(), k, r, e);
      json per_m = json::array();
      for (const auto& row : rep.per_m) {
        per_m.push_back({{"m", row.m},
                         {"f", to_json(row.f)},
                         {"log_g", to_json(row.log_g)},
                         {"t", to_json(row.t)}});
      }
      result = {{"k", k},
                {"r", r},
                {"verdict", to_string(rep.verdict)},
                {"basis", rep.basis},
                {"per_m", per_m}};
      if (rep.verdict == Verdict::undetermined) {
        result["undetermined_width"] = static_cast<double>(rep.undetermined_width);
      }
      if (rep.eta_k) result["eta_k"] = to_json(*rep.eta_k);
      tolerances["log_g_eps"] = static_cast<double>(e);
    } else if (approx_cmd->parsed()) {
      envelope["command"] = "approximate";
      parameters = {{"k", k}, {"r", r}, {"x", x}, {"steps", steps}};
      const auto& table = ctx.table();
      const GreedyTrace trace = greedy_approximate(table, k, r, x, steps);
      json witness = json::array();
      for (const auto& f : trace.witness.factors()) {
        witness.push_back({{"index", f.prime_index},
                           {"prime", table.nth(f.prime_index)},
                           {"exponent", f.exponent}});
      }
      result = {{"k", k},
                {"r", r},
                {"x", x},
                {"steps", steps},
                {"achieved", static_cast<double>(trace.achieved)},
                {"residual", static_cast<double>(trace.residual)},
                {"log_g", to_json(trace.log_g)},
                {"tail_after", to_json(trace.tail_after)},
                {"residual_below_tail", trace.residual < trace.tail_after.lo},
                {"witness", witness},
                {"witness_log_sigma",
                 static_cast<double>(log_sigma_restricted(table, trace.witness, r))}};
      if (with_trace) {
        auto to_doubles = [](const std::vector<real>& v) {
          std::vector<double> d(v.begin(), v.end());
          return d;
        };
        result["alphas"] = trace.alphas;
        result["c"] = to_doubles(trace.c);
        result["d"] = to_doubles(trace.d);
        result["e"] = to_doubles(trace.e);
      }
    } else if (census_cmd->parsed()) {
      envelope["command"] = "census";
      parameters = {{"k", k}, {"r", r}, {"bound", bound}, {"m_max", m_max}};
      if (resolution > 0) parameters["resolution"] = resolution;
      const GapCensus c = range_census(ctx.table(), k, r, bound, resolution, m_max);
      json gaps = json::array();
      for (const auto& g : c.gaps) {
        gaps.push_back({{"left", static_cast<double>(g.left)},
                        {"right", static_cast<double>(g.right)},
                        {"width", static_cast<double>(g.width)}});
      }
      json analytic = json::array();
      for (const auto& a : c.analytic_gaps) {
        json entry{{"m", a.m},
                   {"left", round_down(a.left)},
                   {"right", round_up(a.right)},
                   {"values_inside", a.values_inside}};
        entry["empirical_gap"] = a.empirical_gap ? json(*a.empirical_gap) : json(nullptr);
        analytic.push_back(entry);
      }
      census_values = json::array();
      for (const real v : c.values) census_values.push_back(static_cast<double>(v));
      result = {{"k", k},
                {"r", r},
                {"bound", bound},
                {"resolution", static_cast<double>(c.resolution)},
                {"default_resolution", c.default_resolution},
                {"members", c.members},
                {"distinct_values", c.values.size()},
                {"sup", to_json(c.sup)},
                {"estimated_L", c.estimated_l},
                {"gaps", gaps},
                {"analytic_gaps", analytic},
                {"values", census_values}};
      tolerances["resolution"] = static_cast<double>(c.resolution);
      tsv_values = &census_values;
    } else if (verify_cmd->parsed()) {
      envelope["command"] = "verify";
      parameters = {{"suite", suite}, {"grid_step", grid_step}};
      json suites = json::array();
      bool pass = true;
      auto report = [&](const json& s) {
        err << s["status"].get<std::string>() << ' ' << s["name"].get<std::string>();
        if (s.contains("min_slack")) err << " min_slack=" << s["min_slack"].dump();
        if (s.contains("checks")) {
          for (const auto& c : s["checks"]) {
            err << "\n  " << c["status"].get<std::string>() << ' ' << c["name"].get<std::string>()
                << " min_slack=" << c["min_slack"].dump();
          }
        }
        err << '\n';
        pass = pass && s["status"] == "PASS";
        suites.push_back(s);
      };
      if (suite == "gap-lemma" || suite == "all") {
        report(gap_lemma_json(verify_gap_lemma(ctx.table())));
      }
      if (suite == "inequalities" || suite == "all") {
        report(inequality_json(check_inequalities(grid_step)));
      }
      if (suite == "monotonicity" || suite == "all") {
        report(monotonicity_json(check_monotonicity(ctx.table(), {1, 2, 5}, grid_step)));
      }
      result = {{"suites", suites}, {"status", pass ? "PASS" : "FAIL"}};
      tolerances["grid_step"] = grid_step;
      if (!pass) exit_code = kExitVerifyFailed;
    }
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    // DomainError, PrecisionError, IndeterminateError, PreconditionError,
    // CapacityError and the standard argument errors all map to exit 1.
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  envelope["parameters"] = parameters;
  envelope["result"] = result;
  json brackets = json::object();
  collect_brackets(result, "/result", brackets);
  envelope["brackets"] = brackets;
  envelope["provenance"] = ctx.provenance(tolerances);

  if (globals.out_path.empty()) {
    emit(envelope, globals.format, out, tsv_values);
  } else {
    std::ofstream file(globals.out_path);
    if (!file) {
      err << "error: cannot open " << globals.out_path << '\n';
      return kExitError;
    }
    emit(envelope, globals.format, file, tsv_values);
  }
  return exit_code;
}

}  // namespace rsigma::cli
