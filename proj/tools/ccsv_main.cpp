// ccsv: validate, load, query and serve contextualized CSV files.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "ccsv/error.hpp"
#include "ccsv/rdf/vocab.hpp"
#include "ccsv/service/http_server.hpp"
#include "ccsv/service/json.hpp"
#include "ccsv/service/service.hpp"

namespace {

using namespace ccsv;

enum class Format { Table, Json };

struct Globals {
  std::string config_path = "ccsv.toml";
  Format format = Format::Table;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO", "cannot read " + path.string(), path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::string short_iri(const std::string& iri, const std::string& base) {
  if (iri.rfind(base, 0) == 0 && iri.size() > base.size()) return "<" + iri.substr(base.size()) + ">";
  return rdf::compact_iri(iri, rdf::default_prefixes());
}

void report_error(const Globals& g, const Error& e) {
  if (g.format == Format::Json) {
    print_json(error_json(e.code(), e.what(), e.subject()));
  } else {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
  }
}

// ---- validate: 0 clean, 1 format error, 2 kb findings, 3 config or IO ----

int cmd_validate(const Globals& g, const std::string& file) {
  std::unique_ptr<Service> service;
  std::string text;
  try {
    service = std::make_unique<Service>(load_config(g.config_path));
    text = read_file(file);
  } catch (const Error& e) {
    report_error(g, e);
    return 3;
  }

  std::optional<CcsvDocument> doc;
  try {
    doc = service->parse(text, std::filesystem::path(file).filename().string());
  } catch (const Error& e) {
    if (g.format == Format::Json) {
      print_json({{"file", file}, {"ok", false}, {"diagnostics", Json::array({{{"severity", "error"},
                                                                                {"code", e.code()},
                                                                                {"subject", e.subject()},
                                                                                {"message", e.what()}}})}});
    } else {
      std::cout << "error\t" << e.code() << '\t' << e.subject() << '\t' << e.what() << '\n';
    }
    return 1;
  }

  const auto diagnostics = service->validate(*doc);
  const bool failed = has_errors(diagnostics);
  if (g.format == Format::Json) {
    Json list = Json::array();
    for (const auto& d : diagnostics) list.push_back(to_json(d));
    print_json({{"file", file}, {"ok", !failed}, {"diagnostics", list}});
  } else {
    for (const auto& d : diagnostics) std::cout << to_string(d.severity) << '\t' << d.subject << '\t' << d.message << '\n';
    if (!failed) std::cout << "ok\t" << file << '\n';
  }
  return failed ? 2 : 0;
}

// ---- load: exit code is the number of failed files, capped at 125 ----

int cmd_load(const Globals& g, const std::vector<std::string>& files) {
  std::unique_ptr<Service> service;
  try {
    service = std::make_unique<Service>(load_config(g.config_path));
    service->restore_snapshot();
  } catch (const Error& e) {
    report_error(g, e);
    return 125;
  }
  for (const auto& w : service->kb_warnings()) std::cerr << "warning: " << w << '\n';

  Json reports = Json::array();
  Json failures = Json::array();
  int failed = 0;
  for (const auto& file : files) {
    try {
      const CcsvDocument doc = service->parse(read_file(file), std::filesystem::path(file).filename().string());
      LoadResult result = service->ingest(doc);
      const auto out = normalized_path_for(file);
      write_text_file(out, write_csv(result.normalized));
      result.report.normalized_csv_path = out.string();
      if (g.format == Format::Json) {
        reports.push_back(to_json(result.report));
      } else {
        const auto& r = result.report;
        std::cout << "loaded\t" << file << "\trows=" << r.rows << "\tmeasurement_types=" << r.measurement_types
                  << "\trecords=" << r.records_emitted << "\tskipped=" << r.total_skipped() << "\tnormalized="
                  << r.normalized_csv_path << '\n';
        for (const auto& [reason, n] : r.skipped) std::cout << "  skipped\t" << reason << '\t' << n << '\n';
        for (const auto& w : r.warnings) std::cout << "  warning\t" << w << '\n';
      }
    } catch (const Error& e) {
      ++failed;
      if (g.format == Format::Json) {
        failures.push_back({{"source", file}, {"error", error_json(e.code(), e.what(), e.subject())["error"]}});
      } else {
        std::cout << "failed\t" << file << "\t[" << e.code() << "] " << e.what() << '\n';
      }
    }
  }

  try {
    service->save_snapshot();
  } catch (const Error& e) {
    report_error(g, e);
    return 125;
  }
  if (g.format == Format::Json) {
    print_json({{"reports", reports}, {"failures", failures}, {"index_size", service->index().size()}});
  }
  return std::min(failed, 125);
}

// ---- query: 0 ok, 2 bad query, 3 config or IO ----

struct QueryArgs {
  std::vector<std::string> filters;
  std::vector<std::string> facets;
  std::string from;
  std::string to;
  std::string sort;
  std::optional<std::size_t> offset;
  std::optional<std::size_t> limit;
};

void print_table(const SearchResult& r, const std::string& base) {
  const std::size_t first = r.records.empty() ? 0 : r.offset + 1;
  std::cout << "total " << r.total << " (showing " << first << "-" << r.offset + r.records.size() << ")\n";
  for (const auto& [field, counts] : r.facets) {
    std::cout << "\nfacet " << field << '\n';
    for (const auto& c : counts) {
      std::cout << "  " << std::setw(8) << c.count << "  " << (c.value.empty() ? "(none)" : short_iri(c.value, base))
                << '\n';
    }
  }
  if (r.records.empty()) return;
  std::cout << "\ntimestamp\tvalue\tcharacteristic\tunit\tinstrument\tplatform\n";
  for (const auto& rec : r.records) {
    std::cout << rec.timestamp.to_iso8601() << '\t' << rec.value << '\t' << short_iri(rec.characteristic, base) << '\t'
              << short_iri(rec.unit, base) << '\t' << rec.instrument_label << '\t' << rec.platform_label << '\n';
  }
}

int cmd_query(const Globals& g, const QueryArgs& args) {
  std::unique_ptr<Service> service;
  try {
    service = std::make_unique<Service>(load_config(g.config_path));
    service->restore_snapshot();
  } catch (const Error& e) {
    report_error(g, e);
    return 3;
  }
  try {
    // Same parameter vocabulary as GET /api/search.
    std::vector<std::pair<std::string, std::string>> params;
    for (const auto& f : args.filters) {
      const auto eq = f.find('=');
      if (eq == std::string::npos || eq == 0) throw IndexError("InvalidQuery", "--filter expects <field>=<value>", f);
      params.emplace_back("filter", f.substr(0, eq) + ":" + f.substr(eq + 1));
    }
    for (const auto& f : args.facets) params.emplace_back("facet", f);
    if (!args.from.empty()) params.emplace_back("from", args.from);
    if (!args.to.empty()) params.emplace_back("to", args.to);
    if (!args.sort.empty()) params.emplace_back("sort", args.sort);
    if (args.offset) params.emplace_back("offset", std::to_string(*args.offset));
    if (args.limit) params.emplace_back("limit", std::to_string(*args.limit));

    const SearchResult result = service->search(query_from_params(params, service->config().default_limit));
    if (g.format == Format::Json) {
      std::cout << to_json(result).dump() << '\n';
    } else {
      print_table(result, service->config().resource_base);
    }
    return 0;
  } catch (const Error& e) {
    report_error(g, e);
    return 2;
  }
}

// ---- serve ----

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

int cmd_serve(const Globals& g, const std::string& host_override, int port_override) {
  std::unique_ptr<Service> service;
  try {
    service = std::make_unique<Service>(load_config(g.config_path));
    if (service->restore_snapshot()) {
      std::cerr << "restored " << service->index().size() << " records from " << service->config().snapshot.string()
                << '\n';
    }
  } catch (const Error& e) {
    report_error(g, e);
    return 3;
  }
  for (const auto& w : service->kb_warnings()) std::cerr << "warning: " << w << '\n';

  HttpServer server(*service);
  const std::string host = host_override.empty() ? service->config().server.host : host_override;
  const int port = port_override >= 0 ? port_override : service->config().server.port;
  int bound = 0;
  try {
    bound = server.bind(host, port);
  } catch (const Error& e) {
    report_error(g, e);
    return 3;
  }
  std::cerr << "listening on http://" << host << ":" << bound << '\n';
  std::cout << "port " << bound << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread listener([&] { server.listen(); });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  listener.join();

  try {
    service->save_snapshot();
  } catch (const Error& e) {
    report_error(g, e);
    return 3;
  }
  std::cerr << "stopped; index has " << service->index().size() << " records\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextualized CSV: validate, load, query and serve measurement data"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("-c,--config", g.config_path, "Configuration file")->envname("CCSV_CONFIG");
  const std::map<std::string, Format> formats{{"table", Format::Table}, {"json", Format::Json}};
  app.add_option("-f,--format", g.format, "Output format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  auto* validate = app.add_subcommand("validate", "Check a CCSV file against its knowledge base");
  std::string validate_file;
  validate->add_option("file", validate_file, "CCSV file")->required();

  auto* load = app.add_subcommand("load", "Load CCSV files into the index");
  std::vector<std::string> load_files;
  load->add_option("files", load_files, "CCSV files")->required();

  auto* query = app.add_subcommand("query", "Search the index");
  QueryArgs qa;
  query->add_option("--filter", qa.filters, "<field>=<value>, repeatable");
  query->add_option("--facet", qa.facets, "Facet field, repeatable");
  query->add_option("--from", qa.from, "Inclusive start, ISO 8601");
  query->add_option("--to", qa.to, "Exclusive end, ISO 8601");
  query->add_option("--sort", qa.sort, "Sort field; prefix with '-' for descending");
  query->add_option("--offset", qa.offset, "First result to return");
  query->add_option("--limit", qa.limit, "Page size");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Bind address (overrides the config)");
  serve->add_option("--port", port, "Port, 0 for any free port (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  if (*validate) return cmd_validate(g, validate_file);
  if (*load) return cmd_load(g, load_files);
  if (*query) return cmd_query(g, qa);
  return cmd_serve(g, host, port);
}
