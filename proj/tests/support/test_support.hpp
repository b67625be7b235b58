// Helpers shared by the unit tests and the acceptance binary: fixture paths,
// subprocess capture, random generators and a brute-force search oracle that
// shares no code with the index.
#pragma once

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccsv/index/measurement_index.hpp"
#include "ccsv/kb/knowledge_base.hpp"
#include "ccsv/loader/loader.hpp"
#include "ccsv/rdf/graph.hpp"
#include "ccsv/rdf/vocab.hpp"

namespace testing_support {

namespace fs = std::filesystem;
using ccsv::rdf::Iri;

inline fs::path data_dir() { return CCSV_DATA_DIR; }
inline fs::path fixture_dir() { return CCSV_FIXTURE_DIR; }
inline fs::path ccsv_tool() { return CCSV_TOOL; }
inline fs::path simulate_tool() { return CCSV_SIMULATE; }

inline const std::string& base() {
  static const std::string b(ccsv::rdf::kDefaultResourceBase);
  return b;
}
inline Iri res(const std::string& local) { return Iri(base() + local); }
inline Iri pmf(const std::string& local) { return Iri("http://ccsv.example.org/ns/pmf#" + local); }

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("ccsv-" + tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

/// Runs argv through the shell, capturing stdout; stderr goes to /dev/null.
inline CommandResult run(const std::vector<std::string>& argv) {
  std::string cmd;
  for (const auto& a : argv) cmd += shell_quote(a) + " ";
  cmd += "2>/dev/null";
  CommandResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

/// Config text pointing at the shipped ontology and network files.
inline std::string config_text(const fs::path& snapshot, const std::string& extra = {}) {
  std::string out = "resource_base = \"" + base() + "\"\n";
  out += "[index]\nsnapshot = \"" + snapshot.string() + "\"\n";
  out += extra;
  out += "[[knowledge_base]]\nname = \"pmf-kb\"\nurls = [\"http...\", \"http://ccsv.example.org/kb/pmf\"]\n";
  out += "files = [\"" + (data_dir() / "hasneto-sc-schema.ttl").string() + "\", \"" +
         (data_dir() / "pmf-domain.ttl").string() + "\", \"" + (data_dir() / "fortaleza-network.ttl").string() +
         "\"]\n";
  return out;
}

/// The shipped knowledge base: schema, domain ontology and Fortaleza network.
inline std::unique_ptr<ccsv::KnowledgeBase> fortaleza_kb() {
  auto kb = std::make_unique<ccsv::KnowledgeBase>("pmf-kb");
  kb->load_file(data_dir() / "hasneto-sc-schema.ttl");
  kb->load_file(data_dir() / "pmf-domain.ttl");
  kb->load_file(data_dir() / "fortaleza-network.ttl");
  return kb;
}

// ---------------------------------------------------------------------------
// Random RDF graphs inside the supported Turtle subset.

inline ccsv::rdf::Graph random_graph(std::mt19937_64& rng) {
  using namespace ccsv::rdf;
  const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  static const std::vector<std::string> namespaces = {
      "http://example.org/ns#", "http://example.org/res/", "urn:ex:", "http://hadatac.org/ont/vstoi#",
      "http://ccsv.example.org/ns/pmf#", "http://www.w3.org/2000/01/rdf-schema#", "https://example.com/a/b?q=",
  };
  static const std::vector<std::string> locals = {
      "a", "B", "item-1", "x_y", "v1.0", "ends.", "caf\xc3\xa9", "with%20pct", "1numeric", "p:q", "t~ilde",
      "", "CamelCase", "deep/path", "frag#ment", "under_", "-dash", "sp\xc3\xa4t",
  };
  static const std::vector<std::string> strings = {
      "", "plain", "with \"quotes\"", "back\\slash", "line\nbreak", "tab\there", "caf\xc3\xa9 \xe2\x98\x95",
      "'single'", "trailing space ", "\"\"\"", "emoji \xf0\x9f\x9a\x8c", "cr\rlf", "#not a comment", "a;b,c.",
  };
  static const std::vector<std::string> langs = {"en", "pt-BR", "de", "x-private"};
  static const std::vector<std::pair<std::string, const Iri*>> typed = {
      {"42", &xsd::integer()},        {"-7", &xsd::integer()},   {"007", &xsd::integer()},
      {"3.14", &xsd::decimal()},      {"-0.5", &xsd::decimal()}, {"1.5E3", &xsd::double_()},
      {"true", &xsd::boolean()},      {"false", &xsd::boolean()},
      {"2015-02-01T00:00:00Z", &xsd::date_time()},
      {"http://example.org/x", &xsd::any_uri()},
  };
  const auto iri = [&] { return Iri(namespaces[pick(namespaces.size())] + locals[pick(locals.size())]); };
  const auto blank = [&] { return BlankNode{"b" + std::to_string(pick(6))}; };
  const auto literal = [&]() -> Literal {
    switch (pick(4)) {
      case 0: return Literal(strings[pick(strings.size())]);
      case 1: return Literal(strings[pick(strings.size())], langs[pick(langs.size())]);
      case 2: {
        const auto& [lex, dt] = typed[pick(typed.size())];
        return Literal(lex, *dt);
      }
      default: return Literal(strings[pick(strings.size())], Iri("http://example.org/dt#custom"));
    }
  };

  Graph g;
  const std::size_t n = pick(40);
  for (std::size_t i = 0; i < n; ++i) {
    const Term subject = pick(5) == 0 ? Term(blank()) : Term(iri());
    const Iri predicate = pick(6) == 0 ? ccsv::vocab::rdf::type() : iri();
    Term object = iri();
    switch (pick(3)) {
      case 0: object = iri(); break;
      case 1: object = literal(); break;
      default: object = pick(2) == 0 ? Term(blank()) : Term(literal()); break;
    }
    g.insert(Triple(subject, predicate, object));
  }
  if (pick(2) == 0) g.set_prefix("ex", "http://example.org/ns#");
  return g;
}

// ---------------------------------------------------------------------------
// Random CCSV documents against the Fortaleza knowledge base.

struct GeneratedDocument {
  std::string text;
  std::size_t rows = 0;
  std::size_t types = 0;
  /// Expected per measurement type (in IRI order, mt0 < mt1 < ...): records emitted.
  std::vector<std::size_t> expected_per_type;
  std::size_t expected_bad_timestamp = 0;
  std::size_t expected_empty_value = 0;
};

/// `types` measurement types over `rows` rows. Each type gets its own value
/// column; timestamps come from one or two timestamp columns. With `inject`,
/// some timestamp cells are garbage and some value cells are empty.
inline GeneratedDocument random_document(std::mt19937_64& rng, std::size_t rows, std::size_t types, bool inject) {
  const auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::size_t ts_columns = types > 1 && chance(0.5) ? 2 : 1;
  const std::size_t first_value_col = ts_columns;
  std::vector<std::size_t> ts_of(types);
  for (std::size_t t = 0; t < types; ++t) ts_of[t] = ts_columns == 2 ? t % 2 : 0;

  std::ostringstream pre;
  pre << "<pmf-kb> a ccsv:KnowledgeBase ; ccsv:hasConnectionURL \"http...\"^^xsd:anyURI .\n"
      << "<deployment-checkpoint-1> a vstoi:Deployment ;\n"
      << "  prov:startedAtTime \"2015-02-01T00:00:00Z\"^^xsd:dateTime ;\n"
      << "  hasneto:hasDataCollection <dc-random> .\n"
      << "<dc-random> a hasneto:DataCollection ; prov:startedAtTime \"2015-02-02T00:00:00Z\"^^xsd:dateTime .\n"
      << "<dataset-random-" << rng() << "> a vstoi:Dataset ; prov:wasGeneratedBy <dc-random>";
  for (std::size_t t = 0; t < types; ++t) pre << " ;\n  hasneto:hasMeasurementType <mt" << t << ">";
  pre << " .\n";
  for (std::size_t t = 0; t < types; ++t) {
    pre << "<mt" << t << "> a oboe:Measurement ; time:inDateTime <ts" << ts_of[t] << "> ; ccsv:atColumn "
        << first_value_col + t << " ;\n  oboe:ofCharacteristic pmf:ArrivalDeparture ; oboe:usesStandard pmf:Binary .\n";
  }
  for (std::size_t c = 0; c < ts_columns; ++c) pre << "<ts" << c << "> a time:Instant ; ccsv:atColumn " << c << " .\n";

  GeneratedDocument doc;
  doc.rows = rows;
  doc.types = types;
  doc.expected_per_type.assign(types, 0);

  std::ostringstream body;
  for (std::size_t c = 0; c < ts_columns; ++c) body << (c ? "," : "") << "time" << c;
  for (std::size_t t = 0; t < types; ++t) body << ",value" << t;
  body << '\n';
  std::uniform_int_distribution<int> second(0, 86'399);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<bool> ts_ok(ts_columns, true);
    for (std::size_t c = 0; c < ts_columns; ++c) {
      if (c) body << ',';
      if (inject && chance(0.1)) {
        ts_ok[c] = false;
        body << (chance(0.5) ? "not-a-time" : "2015-13-45T99:00:00Z");
      } else {
        const int s = second(rng);
        char buf[32];
        std::snprintf(buf, sizeof buf, "2015-02-02T%02d:%02d:%02dZ", s / 3600, s / 60 % 60, s % 60);
        body << (chance(0.2) ? std::to_string(1422835200 + s) : std::string(buf));
      }
    }
    for (std::size_t t = 0; t < types; ++t) {
      const bool empty = inject && chance(0.08);
      body << ',' << (empty ? "" : std::to_string(rng() % 2));
      if (!ts_ok[ts_of[t]]) {
        ++doc.expected_bad_timestamp;
      } else if (empty) {
        ++doc.expected_empty_value;
      } else {
        ++doc.expected_per_type[t];
      }
    }
    body << '\n';
  }
  doc.text = pre.str() + "---\n" + body.str();
  return doc;
}

// ---------------------------------------------------------------------------
// Random measurement records and queries, plus the linear-scan oracle.

struct RecordPools {
  std::vector<std::string> instruments, platforms, characteristics, units, collections, datasets, entities;
  std::vector<std::string> lats, longs;
};

inline RecordPools record_pools() {
  RecordPools p;
  for (int i = 1; i <= 5; ++i) p.instruments.push_back(base() + "checkpoint-" + std::to_string(i));
  for (int i = 1; i <= 4; ++i) p.platforms.push_back(base() + "checkpoint-platform-" + std::to_string(i));
  p.platforms.push_back("");
  p.characteristics = {pmf("ArrivalDeparture").str(), pmf("Speed").str(), pmf("Occupancy").str()};
  p.units = {pmf("Binary").str(), pmf("KilometresPerHour").str(), pmf("Count").str()};
  for (int i = 1; i <= 4; ++i) p.collections.push_back(base() + "dc-" + std::to_string(i));
  for (int i = 1; i <= 6; ++i) p.datasets.push_back(base() + "dataset-" + std::to_string(i));
  p.entities = {pmf("Bus").str(), "", pmf("Passenger").str()};
  p.lats = {"-3.79486600", "-3.72791200", "-3.7", "0", ""};
  p.longs = {"-38.61625700", "-38.53405200", "-38.5", "0", ""};
  return p;
}

inline std::vector<ccsv::MeasurementRecord> random_records(std::mt19937_64& rng, std::size_t n) {
  const RecordPools p = record_pools();
  const auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<ccsv::MeasurementRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ccsv::MeasurementRecord r;
    r.record_id = ccsv::make_record_id("random", "mt", i);
    r.value = std::to_string(std::uniform_int_distribution<int>(-5, 40)(rng));
    // Minute resolution within two days, so equal timestamps occur.
    r.timestamp = ccsv::Instant::from_epoch_seconds(1422748800 + 60 * std::uniform_int_distribution<int>(0, 2879)(rng));
    r.entity = pick(p.entities);
    r.characteristic = pick(p.characteristics);
    r.unit = pick(p.units);
    r.instrument = pick(p.instruments);
    r.instrument_label = "label of " + r.instrument.substr(base().size());
    r.platform = pick(p.platforms);
    r.platform_label = r.platform.empty() ? "" : "label of " + r.platform.substr(base().size());
    r.latitude = r.platform.empty() ? "" : pick(p.lats);
    r.longitude = r.platform.empty() ? "" : pick(p.longs);
    r.data_collection = pick(p.collections);
    r.dataset = pick(p.datasets);
    r.source = r.dataset.substr(base().size()) + ".ccsv";
    out.push_back(std::move(r));
  }
  return out;
}

/// Field access by name, written independently of the index's own accessors.
inline std::string oracle_field(const ccsv::MeasurementRecord& r, const std::string& name) {
  static const std::map<std::string, std::string ccsv::MeasurementRecord::*> members = {
      {"record_id", &ccsv::MeasurementRecord::record_id},
      {"value", &ccsv::MeasurementRecord::value},
      {"entity", &ccsv::MeasurementRecord::entity},
      {"characteristic", &ccsv::MeasurementRecord::characteristic},
      {"unit", &ccsv::MeasurementRecord::unit},
      {"instrument", &ccsv::MeasurementRecord::instrument},
      {"instrument_label", &ccsv::MeasurementRecord::instrument_label},
      {"platform", &ccsv::MeasurementRecord::platform},
      {"platform_label", &ccsv::MeasurementRecord::platform_label},
      {"latitude", &ccsv::MeasurementRecord::latitude},
      {"longitude", &ccsv::MeasurementRecord::longitude},
      {"data_collection", &ccsv::MeasurementRecord::data_collection},
      {"dataset", &ccsv::MeasurementRecord::dataset},
      {"source", &ccsv::MeasurementRecord::source},
  };
  return r.*members.at(name);
}

inline ccsv::FacetedQuery random_query(std::mt19937_64& rng) {
  const RecordPools p = record_pools();
  const auto chance = [&](double q) { return std::bernoulli_distribution(q)(rng); };
  const auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  const std::vector<std::pair<std::string, const std::vector<std::string>*>> filterable = {
      {"instrument", &p.instruments},  {"platform", &p.platforms},        {"characteristic", &p.characteristics},
      {"unit", &p.units},              {"data_collection", &p.collections}, {"dataset", &p.datasets},
      {"entity", &p.entities},         {"latitude", &p.lats},
  };
  ccsv::FacetedQuery q;
  const int filters = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < filters; ++i) {
    const auto& [field, pool] = filterable[std::uniform_int_distribution<std::size_t>(0, filterable.size() - 1)(rng)];
    q.filters.emplace_back(field, chance(0.05) ? "no-such-value" : pick(*pool));
  }
  if (chance(0.4)) {
    const auto a = 1422748800 + 60 * std::uniform_int_distribution<int>(0, 2879)(rng);
    const auto b = 1422748800 + 60 * std::uniform_int_distribution<int>(0, 2879)(rng);
    if (chance(0.8)) q.from = ccsv::Instant::from_epoch_seconds(std::min(a, b));
    if (chance(0.8)) q.to = ccsv::Instant::from_epoch_seconds(std::max(a, b));
  }
  for (const std::string f : {"instrument", "platform", "characteristic", "unit", "data_collection"}) {
    if (chance(0.5)) q.facets.push_back(f);
  }
  q.offset = chance(0.7) ? 0 : std::uniform_int_distribution<std::size_t>(0, 300)(rng);
  q.limit = std::uniform_int_distribution<std::size_t>(1, ccsv::FacetedQuery::kMaxLimit)(rng);
  static const std::vector<std::string> sorts = {"timestamp", "value", "instrument", "latitude", "record_id"};
  q.sort.field = pick(sorts);
  q.sort.descending = chance(0.5);
  return q;
}

struct OracleAnswer {
  std::size_t total = 0;
  std::set<std::string> ids;
  std::map<std::string, std::map<std::string, std::size_t>> facets;
};

/// Brute force: scan every record, test every filter, group by facet value.
inline OracleAnswer oracle_search(const std::vector<ccsv::MeasurementRecord>& all, const ccsv::FacetedQuery& q) {
  std::map<std::string, const ccsv::MeasurementRecord*> latest;  // last write wins per record_id
  for (const auto& r : all) latest[r.record_id] = &r;
  OracleAnswer a;
  for (const auto& f : q.facets) a.facets[f];
  for (const auto& [id, r] : latest) {
    bool ok = true;
    for (const auto& [field, value] : q.filters) {
      if (field == "timestamp") {
        const auto t = ccsv::parse_timestamp_cell(value);
        ok = ok && t && r->timestamp.epoch_millis() == t->epoch_millis();
      } else {
        ok = ok && oracle_field(*r, field) == value;
      }
    }
    const auto ms = r->timestamp.epoch_millis();
    if (q.from && ms < q.from->epoch_millis()) ok = false;
    if (q.to && ms >= q.to->epoch_millis()) ok = false;
    if (!ok) continue;
    ++a.total;
    a.ids.insert(id);
    for (const auto& f : q.facets) ++a.facets[f][oracle_field(*r, f)];
  }
  return a;
}

/// Compares an index answer with the oracle; returns a description of the first difference.
inline std::string compare_with_oracle(const ccsv::MeasurementIndex& index, const ccsv::FacetedQuery& q,
                                       const OracleAnswer& expected) {
  ccsv::FacetedQuery all = q;
  all.offset = 0;
  all.limit = ccsv::FacetedQuery::kMaxLimit;
  std::set<std::string> ids;
  ccsv::SearchResult first;
  for (std::size_t page = 0;; ++page) {
    const auto r = index.search(all);
    if (page == 0) first = r;
    if (r.total != expected.total) return "total " + std::to_string(r.total) + " != " + std::to_string(expected.total);
    for (const auto& rec : r.records) {
      if (!ids.insert(rec.record_id).second) return "record " + rec.record_id + " returned twice across pages";
    }
    all.offset += all.limit;
    if (all.offset >= r.total) break;
  }
  if (ids != expected.ids) return "matching record_ids differ";
  for (const auto& [field, counts] : expected.facets) {
    const auto it = first.facets.find(field);
    if (it == first.facets.end()) return "facet " + field + " missing";
    std::map<std::string, std::size_t> got;
    for (const auto& c : it->second) got[c.value] = c.count;
    if (got != counts) return "facet counts differ for " + field;
  }
  if (first.facets.size() != expected.facets.size()) return "unexpected facet fields";
  return {};
}

}  // namespace testing_support
