// Acceptance gate: one PASS/FAIL line per criterion, with wall time against its budget.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "ccsv/error.hpp"
#include "ccsv/format/ccsv.hpp"
#include "ccsv/rdf/turtle.hpp"
#include "ccsv/service/json.hpp"
#include "support/test_support.hpp"

namespace ts = testing_support;
using namespace ccsv;

namespace {

struct Failure {
  std::string why;
};

void check(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

template <typename A, typename B>
void check_eq(const A& got, const B& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream s;
    s << what << ": got " << got << ", want " << want;
    throw Failure{s.str()};
  }
}

// -------------------------------------------------------------------------

void golden_preamble() {
  const auto doc = parse_ccsv(ts::slurp(ts::fixture_dir() / "gps-bus-checkpoint-1.ccsv"), "gps-bus-checkpoint-1.ccsv");
  const auto& m = doc.model;
  check_eq(m.deployment.started_at.to_iso8601(), std::string("2015-02-01T00:00:00Z"), "deployment start");
  check_eq(m.measurement_types.size(), 1u, "measurement types");
  const auto& mt = m.measurement_types[0];
  check_eq(mt.column, 1u, "measurement column");
  check_eq(m.timestamp_for(mt).column, 0u, "timestamp column");
  check_eq(mt.characteristic.str(), ts::pmf("ArrivalDeparture").str(), "characteristic");
  check_eq(mt.standard.str(), ts::pmf("Binary").str(), "standard");
}

void golden_network() {
  const auto kb = ts::fortaleza_kb();
  const auto ctx = kb->resolve_deployment(ts::res("deployment-checkpoint-1"));
  check(ctx.platform && ctx.platform->latitude && ctx.platform->longitude, "no platform location");
  check_eq(ctx.platform->latitude->lexical, std::string("-3.79486600"), "lat");
  check_eq(ctx.platform->longitude->lexical, std::string("-38.61625700"), "long");
}

void turtle_round_trip() {
  std::mt19937_64 rng(20150201);
  for (int i = 0; i < 200; ++i) {
    const auto g = ts::random_graph(rng);
    const auto text = rdf::serialize_turtle(g);
    check(rdf::parse_turtle(text, rdf::kDefaultResourceBase) == g, "graph " + std::to_string(i) + " differs");
  }
}

void loader_laws() {
  static const auto kb = ts::fortaleza_kb();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 60; ++i) {
    const std::size_t rows = 1 + rng() % 500;
    const std::size_t types = 1 + rng() % 4;
    const auto gen = ts::random_document(rng, rows, types, false);
    const auto r = load(parse_ccsv(gen.text, "g.ccsv"), *kb);
    check_eq(r.records.size(), rows * types, "N x R");
  }
  for (int i = 0; i < 60; ++i) {
    const std::size_t rows = 1 + rng() % 500;
    const std::size_t types = 1 + rng() % 4;
    const auto gen = ts::random_document(rng, rows, types, true);
    const auto r = load(parse_ccsv(gen.text, "g.ccsv"), *kb);
    check_eq(r.records.size(), rows * types - r.report.total_skipped(), "emitted == rows*types - skipped");
    std::size_t expected = 0;
    for (auto n : gen.expected_per_type) expected += n;
    check_eq(r.records.size(), expected, "emitted vs independent count");
    const auto it = r.report.skipped.find(std::string(kSkipBadTimestamp));
    check_eq(it == r.report.skipped.end() ? 0u : it->second, gen.expected_bad_timestamp, "bad timestamp skips");
  }
}

void index_oracle() {
  std::mt19937_64 rng(10000);
  const auto records = ts::random_records(rng, 10000);
  MeasurementIndex index;
  index.index_records(records);
  for (int i = 0; i < 100; ++i) {
    const auto q = ts::random_query(rng);
    const auto diff = ts::compare_with_oracle(index, q, ts::oracle_search(records, q));
    check(diff.empty(), "query " + std::to_string(i) + ": " + diff);
  }
}

void end_to_end() {
  ts::TempDir dir("e2e");
  ts::spit(dir / "ccsv.toml", ts::config_text(dir / "index.snap"));
  const auto sim = ts::run({ts::simulate_tool().string(), "--out", dir.path().string()});
  check_eq(sim.exit_code, 0, "simulate exit");
  const Json manifest = Json::parse(sim.out);
  std::vector<std::string> files;
  for (const auto& f : manifest["files"]) files.push_back(f["path"]);
  check_eq(files.size(), 3u, "simulated files");

  const auto ccsv = [&](std::vector<std::string> args) {
    args.insert(args.begin(), {ts::ccsv_tool().string(), "-c", (dir / "ccsv.toml").string(), "-f", "json"});
    return ts::run(args);
  };
  const auto query = [&] {
    const auto q = ccsv({"query", "--facet", "instrument", "--limit", "1"});
    check_eq(q.exit_code, 0, "query exit");
    return Json::parse(q.out);
  };

  std::vector<std::string> load_args{"load"};
  load_args.insert(load_args.end(), files.begin(), files.end());
  check_eq(ccsv(load_args).exit_code, 0, "first load exit");
  const Json first = query();
  const std::size_t total = first["total"];
  check_eq(total, manifest["total_rows"].get<std::size_t>(), "indexed records vs simulated rows");
  std::size_t sum = 0;
  for (const auto& c : first["facets"]["instrument"]) sum += c["count"].get<std::size_t>();
  check_eq(sum, total, "instrument facet sum");
  check_eq(first["facets"]["instrument"].size(), 2u, "instrument facet values");

  check_eq(ccsv(load_args).exit_code, 0, "reload exit");
  check(query() == first, "reload changed the query answer");
}

void snapshot_fidelity() {
  std::mt19937_64 rng(50);
  MeasurementIndex a;
  a.index_records(ts::random_records(rng, 5000));
  ts::TempDir dir("snap");
  a.snapshot(dir / "index.snap");
  MeasurementIndex b;
  b.restore(dir / "index.snap");
  for (int i = 0; i < 50; ++i) {
    const auto q = ts::random_query(rng);
    check(to_json(a.search(q)).dump() == to_json(b.search(q)).dump(), "query " + std::to_string(i) + " differs");
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {"golden preamble parse", 1, golden_preamble},
      {"golden network resolution", 1, golden_network},
      {"turtle round trip (200 graphs)", 30, turtle_round_trip},
      {"loader product and skip-count laws", 30, loader_laws},
      {"index oracle equivalence (1e4 records, 100 queries)", 60, index_oracle},
      {"end-to-end load/query/reload", 10, end_to_end},
      {"snapshot fidelity (50 queries)", 30, snapshot_fidelity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::string why;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run();
    } catch (const Failure& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && secs >= c.budget_s) why = "over time budget";
    const bool ok = why.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << std::fixed << std::setprecision(3) << secs
              << " s, budget " << std::setprecision(0) << c.budget_s << " s)" << (ok ? "" : "  " + why) << '\n';
  }
  return failed == 0 ? 0 : 1;
}
