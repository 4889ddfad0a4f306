#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "rsigma/cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = rsigma::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  const Outcome o = run(std::move(args));
  REQUIRE(o.code == rsigma::cli::kExitOk);
  return json::parse(o.out);
}

std::map<std::string, std::string> parse_tsv(const std::string& text) {
  std::map<std::string, std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    rows[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return rows;
}

// JSON-pointer token escaping: '~' -> "~0", '/' -> "~1".
std::string escape(const std::string& key) {
  std::string out;
  for (const char c : key) out += c == '~' ? "~0" : c == '/' ? "~1" : std::string(1, c);
  return out;
}

void flatten(const json& j, const std::string& path, std::map<std::string, json>& into) {
  if (j.is_object() && !j.empty()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), path + "/" + escape(it.key()), into);
  } else if (j.is_array() && !j.empty()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "/" + std::to_string(i), into);
  } else {
    into[path] = j;
  }
}

}  // namespace

TEST_CASE("eta-limit envelope") {
  const json j = run_json({"eta-limit"});
  CHECK(j["command"] == "eta-limit");
  const double lo = j["result"]["eta"]["value"]["lo"];
  const double hi = j["result"]["eta"]["value"]["hi"];
  CHECK(lo <= 1.8877909 + 1e-7);
  CHECK(hi >= 1.8877909 - 1e-7);
  CHECK(hi - lo <= 1e-9 * (1 + 1e-6));
  CHECK(j["brackets"]["/result/eta/value"][0] == lo);
  CHECK(j["brackets"]["/result/eta/value"][1] == hi);
  CHECK(j["provenance"]["tool"] == "rsigma");
  CHECK(j["provenance"]["version"] == rsigma::cli::kToolVersion);
  CHECK(j["provenance"]["tolerances"]["eps"] == 1e-9);
  CHECK(j["parameters"]["eps"] == 1e-9);
}

TEST_CASE("thresholds and eta") {
  const json t3 = run_json({"thresholds", "--k", "3"});
  CHECK(t3["result"]["M"] == 2);
  CHECK(t3["result"]["R4"]["boundary"] == true);
  const json t1 = run_json({"thresholds", "--k", "1"});
  CHECK(t1["result"]["M"] == 1);
  const json e = run_json({"eta", "--k", "1"});
  CHECK(e["result"]["cross_check"]["agrees"] == true);
  CHECK(e["result"]["eta"]["value"]["lo"].get<double>() > 1.864633);
  CHECK(e["result"]["eta"]["value"]["hi"].get<double>() < 1.8877909);
}

TEST_CASE("density verdicts") {
  CHECK(run_json({"density", "--k", "1", "--r", "2"})["result"]["verdict"] == "not_dense");
  CHECK(run_json({"density", "--k", "1", "--r", "1.5"})["result"]["verdict"] == "dense");
  CHECK(run_json({"density", "--k", "5", "--r", "2.5"})["result"]["verdict"] == "not_dense");
  const json d = run_json({"density", "--k", "2", "--r", "1.7"});
  REQUIRE(d["result"]["per_m"].size() == 3);
  CHECK(d["brackets"].contains("/result/per_m/0/t"));
}

TEST_CASE("table") {
  const json t = run_json({"table", "--kmax", "3"});
  REQUIRE(t["result"]["rows"].size() == 3);
  CHECK(t["result"]["rows"][0]["M"] == 1);
  CHECK(t["result"]["rows"][1]["M"] == 2);
  CHECK(t["result"]["consistent"] == true);
}

TEST_CASE("approximate and census") {
  const json a = run_json({"approximate", "--k", "1", "--r", "1.5", "--x", "0.5", "--steps", "2000",
                           "--trace"});
  CHECK(a["result"]["residual_below_tail"] == true);
  CHECK(a["result"]["alphas"].size() == 2000);
  CHECK(a["result"]["c"].size() == 2001);
  CHECK(a["result"]["achieved"].get<double>() <= 0.5);

  const json c = run_json({"census", "--k", "1", "--r", "2", "--bound", "1000"});
  CHECK(c["result"]["values"].size() == c["result"]["distinct_values"]);
  CHECK(c["result"]["values"][0] == 1.0);
  for (const auto& g : c["result"]["analytic_gaps"]) CHECK(g["values_inside"] == 0);

  const Outcome tsv = run({"--format", "tsv", "census", "--k", "1", "--r", "2", "--bound", "1000"});
  REQUIRE(tsv.code == 0);
  std::istringstream in(tsv.out);
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    REQUIRE(i < c["result"]["values"].size());
    CHECK(json::parse(line) == c["result"]["values"][i]);
    ++i;
  }
  CHECK(i == c["result"]["values"].size());
}

TEST_CASE("json and tsv encode the same numbers") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"density", "--k", "2", "--r", "1.9"},
           {"thresholds", "--k", "2"},
           {"approximate", "--k", "2", "--r", "1.6", "--x", "0.3", "--steps", "50"}}) {
    const json j = run_json(args);
    std::vector<std::string> tsv_args{"--format", "tsv"};
    tsv_args.insert(tsv_args.end(), args.begin(), args.end());
    const Outcome t = run(tsv_args);
    REQUIRE(t.code == 0);
    const auto rows = parse_tsv(t.out);
    std::map<std::string, json> flat;
    flatten(j, "", flat);
    CHECK(rows.size() == flat.size());
    for (const auto& [path, value] : flat) {
      CAPTURE(path);
      REQUIRE(rows.count(path) == 1);
      if (value.is_string()) {
        CHECK(rows.at(path) == value.get<std::string>());
      } else {
        CHECK(json::parse(rows.at(path)) == value);
      }
    }
  }
}

TEST_CASE("identical arguments give identical output") {
  const std::vector<std::string> args{"census", "--k", "2", "--r", "1.8", "--bound", "5000"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> t{"table", "--kmax", "4"};
  CHECK(run(t).out == run(t).out);
}

TEST_CASE("exit codes") {
  using namespace rsigma::cli;
  CHECK(run({"density", "--k", "1", "--r", "2", "--bogus"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  const Outcome bad_number = run({"density", "--k", "1", "--r", "abc"});
  CHECK(bad_number.code == kExitUsage);
  CHECK(bad_number.err.find("abc") != std::string::npos);
  CHECK(run({"--format", "xml", "eta-limit"}).code == kExitUsage);
  CHECK(run({"density", "--k", "0", "--r", "2"}).code == kExitUsage);

  const Outcome domain = run({"density", "--k", "1", "--r", "0.5"});
  CHECK(domain.code == kExitError);
  CHECK(domain.err.find("error") != std::string::npos);
  CHECK(run({"approximate", "--k", "1", "--r", "2", "--x", "5", "--steps", "10"}).code ==
        kExitError);
  CHECK(run({"census", "--k", "1", "--r", "2", "--bound", "30000000"}).code == kExitError);
  CHECK(run({"eta", "--k", "1", "--eps", "1e-30"}).code == kExitError);
  CHECK(run({"verify", "--suite", "inequalities", "--grid-step", "0.01"}).code == kExitError);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("verify suites") {
  const Outcome g = run({"verify", "--suite", "gap-lemma"});
  CHECK(g.code == rsigma::cli::kExitOk);
  CHECK(g.err.find("PASS gap-lemma") != std::string::npos);
  const json j = json::parse(g.out);
  CHECK(j["result"]["status"] == "PASS");
  const Outcome i = run({"verify", "--suite", "inequalities"});
  CHECK(i.code == rsigma::cli::kExitOk);
  CHECK(i.err.find("PASS inequalities") != std::string::npos);
  CHECK(i.err.find("min_slack=") != std::string::npos);
  CHECK(run({"verify", "--suite", "gap-lemma", "--prime-limit", "1000"}).code ==
        rsigma::cli::kExitError);
}

TEST_CASE("--out and the prime cache directory") {
  const auto dir = std::filesystem::temp_directory_path() / "rsigma-test-cli";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto file = dir / "out.json";
  const Outcome o = run({"--out", file.string(), "density", "--k", "1", "--r", "1.5"});
  CHECK(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream in(file);
  CHECK(json::parse(in)["result"]["verdict"] == "dense");

  const auto cache = dir / "cache";
  ::setenv(rsigma::cli::kPrimeCacheEnv, cache.c_str(), 1);
  const Outcome first = run({"--prime-limit", "100000", "density", "--k", "1", "--r", "1.5"});
  const Outcome second = run({"--prime-limit", "100000", "density", "--k", "1", "--r", "1.5"});
  ::unsetenv(rsigma::cli::kPrimeCacheEnv);
  CHECK(first.code == 0);
  CHECK(std::filesystem::exists(cache / "primes-100000.bin"));
  CHECK(first.out == second.out);
  CHECK(json::parse(first.out)["provenance"]["prime_limit"] == 100000);
}
