// ccsv-simulate: a synthetic day of bus arrivals and departures at two
// checkpoints, written as single-instrument CCSV files.
//
// Each bus runs checkpoint-1 -> checkpoint-2 -> checkpoint-1 loops, so
// checkpoint-1 sees twice the traffic of checkpoint-2. Every pass yields an
// arrival (1) and a departure (0) row. A checkpoint's rows are split into
// files of at most --max-rows rows.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccsv/format/csv.hpp"
#include "ccsv/time.hpp"

namespace {

struct Event {
  std::int64_t ms;
  int value;
  std::string bus;
  friend bool operator<(const Event& a, const Event& b) { return std::tie(a.ms, a.bus, a.value) < std::tie(b.ms, b.bus, b.value); }
};

std::string preamble(const std::string& checkpoint, const std::string& day, const std::string& dataset,
                     const std::string& kb_url) {
  const std::string dc = "datacollection-" + checkpoint + "-" + day;
  std::string out;
  out += "<pmf-kb>\n  a ccsv:KnowledgeBase;\n  ccsv:hasConnectionURL \"" + kb_url + "\"^^xsd:anyURI .\n\n";
  out += "<deployment-" + checkpoint + ">\n  a vstoi:Deployment;\n";
  out += "  prov:startedAtTime \"2015-02-01T00:00:00Z\"^^xsd:dateTime;\n";
  out += "  hasneto:hasDataCollection <" + dc + "> .\n\n";
  out += "<" + dc + ">\n  a hasneto:DataCollection; a time:Interval;\n";
  out += "  prov:startedAtTime \"" + day + "T00:00:00Z\"^^xsd:dateTime .\n\n";
  out += "<" + dataset + ">\n  a vstoi:Dataset;\n  prov:wasGeneratedBy <" + dc + "> ;\n";
  out += "  hasneto:hasMeasurementType <mt0> .\n\n";
  out += "<mt0>\n  a oboe:Measurement; a time:Instant;\n  time:inDateTime <ts0>;\n  ccsv:atColumn 1;\n";
  out += "  oboe:ofCharacteristic pmf:ArrivalDeparture ;\n  oboe:usesStandard pmf:Binary .\n\n";
  out += "<ts0>\n  a time:Instant; ccsv:atColumn 0 .\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate a day of bus checkpoint events as CCSV files"};
  std::string out_dir = ".";
  std::uint64_t seed = 20150201;
  int buses = 2;
  int trips = 5;
  std::size_t max_rows = 25;
  std::string day = "2015-02-01";
  std::string kb_url = "http://ccsv.example.org/kb/pmf";
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--buses", buses, "Number of buses")->check(CLI::Range(1, 50));
  app.add_option("--trips", trips, "Round trips per bus")->check(CLI::Range(1, 40));
  app.add_option("--max-rows", max_rows, "Maximum data rows per file")->check(CLI::PositiveNumber);
  app.add_option("--day", day, "Simulated day, YYYY-MM-DD");
  app.add_option("--kb-url", kb_url, "Connection URL written into each preamble");
  CLI11_PARSE(app, argc, argv);

  const auto start = ccsv::parse_iso8601(day + "T00:00:00Z");
  if (!start) {
    std::cerr << "invalid --day '" << day << "'\n";
    return 2;
  }

  std::mt19937_64 rng(seed);
  const auto uniform = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  constexpr std::int64_t kMinute = 60'000;

  std::vector<Event> cp1;
  std::vector<Event> cp2;
  for (int b = 0; b < buses; ++b) {
    const std::string bus = "bus-" + std::to_string(101 + b);
    std::int64_t t = start->epoch_millis() + 5 * 60 * kMinute + b * 30 * kMinute + uniform(0, 10 * kMinute) / 1000 * 1000;
    const auto pass = [&](std::vector<Event>& at) {
      const std::int64_t dwell = uniform(30'000, 180'000) / 1000 * 1000;
      at.push_back({t, 1, bus});
      at.push_back({t + dwell, 0, bus});
      t += dwell + uniform(15 * kMinute, 35 * kMinute) / 1000 * 1000;
    };
    for (int trip = 0; trip < trips; ++trip) {
      pass(cp1);
      pass(cp2);
      pass(cp1);
    }
  }

  std::filesystem::create_directories(out_dir);
  nlohmann::json manifest = {{"seed", seed}, {"day", day}, {"files", nlohmann::json::array()}};
  std::size_t total_rows = 0;
  for (auto* events : {&cp1, &cp2}) {
    const std::string checkpoint = events == &cp1 ? "checkpoint-1" : "checkpoint-2";
    std::sort(events->begin(), events->end());
    const std::size_t parts = (events->size() + max_rows - 1) / max_rows;
    for (std::size_t p = 0; p < parts; ++p) {
      const std::string dataset = "gps-bus-information-" + checkpoint + "-" + day + "-part-" + std::to_string(p + 1);
      ccsv::CsvTable table;
      table.header = {"timestamp", "event", "bus"};
      const std::size_t end = std::min(events->size(), (p + 1) * max_rows);
      for (std::size_t i = p * max_rows; i < end; ++i) {
        const Event& e = (*events)[i];
        table.rows.push_back({ccsv::Instant::from_epoch_millis(e.ms).to_iso8601(), std::to_string(e.value), e.bus});
      }
      const auto path = std::filesystem::path(out_dir) / (dataset + ".ccsv");
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << preamble(checkpoint, day, dataset, kb_url) << "---\n" << ccsv::write_csv(table);
      if (!out) {
        std::cerr << "cannot write " << path << '\n';
        return 1;
      }
      manifest["files"].push_back({{"path", path.string()},
                                   {"deployment", "deployment-" + checkpoint},
                                   {"instrument", checkpoint},
                                   {"rows", table.rows.size()}});
      total_rows += table.rows.size();
    }
  }
  manifest["total_rows"] = total_rows;
  std::cout << manifest.dump(2) << '\n';
  return 0;
}
