// Python bindings: documents, knowledge bases, the loader, the index and the
// service facade. Results cross the boundary as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ccsv/error.hpp"
#include "ccsv/format/ccsv.hpp"
#include "ccsv/rdf/turtle.hpp"
#include "ccsv/service/json.hpp"
#include "ccsv/service/service.hpp"

namespace py = pybind11;
using namespace ccsv;

namespace {

py::object to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case Json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get_ref<const std::string&>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
    default: return py::none();
  }
}

using Params = std::vector<std::pair<std::string, std::string>>;

// search(filters={"instrument": "checkpoint-1"}, facets=[...], ...) -> request parameters.
Params search_params(const py::dict& filters, const std::vector<std::string>& facets, const std::string& from,
                     const std::string& to, std::optional<std::size_t> offset, std::optional<std::size_t> limit,
                     const std::string& sort) {
  Params p;
  for (const auto& [k, v] : filters) {
    const std::string field = py::str(k);
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      for (const auto& each : v) p.emplace_back("filter", field + ":" + std::string(py::str(each)));
    } else {
      p.emplace_back("filter", field + ":" + std::string(py::str(v)));
    }
  }
  for (const auto& f : facets) p.emplace_back("facet", f);
  if (!from.empty()) p.emplace_back("from", from);
  if (!to.empty()) p.emplace_back("to", to);
  if (offset) p.emplace_back("offset", std::to_string(*offset));
  if (limit) p.emplace_back("limit", std::to_string(*limit));
  if (!sort.empty()) p.emplace_back("sort", sort);
  return p;
}

py::dict model_dict(const CcsvDocument& doc) {
  const auto& m = doc.model;
  py::list types;
  for (const auto& mt : m.measurement_types) {
    const auto& ts = m.timestamp_for(mt);
    types.append(py::dict(py::arg("id") = mt.id.str(), py::arg("column") = mt.column,
                          py::arg("characteristic") = mt.characteristic.str(), py::arg("standard") = mt.standard.str(),
                          py::arg("timestamp") = ts.id.str(), py::arg("timestamp_column") = ts.column));
  }
  return py::dict(py::arg("source") = doc.source_name,
                  py::arg("knowledge_base") = m.knowledge_base.id.str(),
                  py::arg("connection_url") = m.knowledge_base.connection_url,
                  py::arg("deployment") = m.deployment.id.str(),
                  py::arg("deployment_started_at") = m.deployment.started_at.to_iso8601(),
                  py::arg("data_collection") = m.data_collection.id.str(),
                  py::arg("dataset") = m.dataset.str(),
                  py::arg("measurement_types") = types,
                  py::arg("header") = doc.body.header,
                  py::arg("rows") = doc.body.rows.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Contextualized CSV core";

  // args are (code, message, subject).
  static py::handle error_type = py::exception<Error>(m, "CcsvError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error_type.ptr(), py::make_tuple(e.code(), e.what(), e.subject()).ptr());
    }
  });

  m.attr("DEFAULT_RESOURCE_BASE") = std::string(rdf::kDefaultResourceBase);

  m.def(
      "parse_document",
      [](std::string_view text, std::string name, std::string base) {
        return model_dict(parse_ccsv(text, std::move(name), CcsvOptions{std::move(base)}));
      },
      py::arg("text"), py::arg("name") = "document.ccsv",
      py::arg("base") = std::string(rdf::kDefaultResourceBase));

  m.def(
      "turtle_round_trip",
      [](std::string_view text, std::string base) {
        const auto g = rdf::parse_turtle(text, base);
        const auto out = rdf::serialize_turtle(g);
        return py::make_tuple(out, rdf::parse_turtle(out, base) == g, g.size());
      },
      py::arg("text"), py::arg("base") = std::string(rdf::kDefaultResourceBase),
      "Parses Turtle, serializes it and reports (text, parse(serialize(g)) == g, triple count).");

  m.def("record_id", &make_record_id, py::arg("dataset"), py::arg("measurement_type"), py::arg("row"));

  py::class_<KnowledgeBase>(m, "KnowledgeBase")
      .def(py::init<std::string, std::string>(), py::arg("name"),
           py::arg("base") = std::string(rdf::kDefaultResourceBase))
      .def_property_readonly("name", &KnowledgeBase::name)
      .def("__len__", &KnowledgeBase::size)
      .def(
          "load_file",
          [](KnowledgeBase& kb, const std::filesystem::path& p) {
            const auto r = kb.load_file(p);
            return py::dict(py::arg("triples_read") = r.triples_read, py::arg("triples_added") = r.triples_added,
                            py::arg("type_counts") = r.type_counts, py::arg("warnings") = r.warnings);
          },
          py::arg("path"))
      .def(
          "load_metadata",
          [](KnowledgeBase& kb, std::string_view text) { return kb.load_metadata(text).triples_added; },
          py::arg("turtle"))
      .def(
          "resolve_deployment",
          [](const KnowledgeBase& kb, const std::string& iri, bool allow_missing_platform) {
            return to_py(to_json(kb.resolve_deployment(Iri(iri), {.allow_missing_platform = allow_missing_platform})));
          },
          py::arg("iri"), py::arg("allow_missing_platform") = false)
      .def(
          "is_subclass_of",
          [](const KnowledgeBase& kb, const std::string& a, const std::string& b) {
            return kb.is_subclass_of(Iri(a), Iri(b));
          },
          py::arg("sub"), py::arg("sup"));

  m.def(
      "load",
      [](std::string_view text, const KnowledgeBase& kb, std::string name) {
        const auto r = load(parse_ccsv(text, std::move(name), CcsvOptions{kb.base()}), kb);
        py::list records;
        for (const auto& rec : r.records) records.append(to_py(to_json(rec)));
        return py::make_tuple(records, to_py(to_json(r.report)), write_csv(r.normalized));
      },
      py::arg("text"), py::arg("kb"), py::arg("name") = "document.ccsv",
      "Returns (records, report, normalized_csv).");

  py::class_<Service>(m, "Service")
      .def(py::init([](const std::filesystem::path& config) { return std::make_unique<Service>(load_config(config)); }),
           py::arg("config"))
      .def("__len__", [](const Service& s) { return s.index().size(); })
      .def("restore_snapshot", &Service::restore_snapshot)
      .def("save_snapshot", &Service::save_snapshot)
      .def(
          "validate",
          [](const Service& s, std::string_view text, std::string name) {
            py::list out;
            for (const auto& d : s.validate(s.parse(text, std::move(name)))) out.append(to_py(to_json(d)));
            return out;
          },
          py::arg("text"), py::arg("name") = "document.ccsv")
      .def(
          "ingest",
          [](Service& s, std::string_view text, std::string name) {
            return to_py(to_json(s.ingest(s.parse(text, std::move(name))).report));
          },
          py::arg("text"), py::arg("name") = "document.ccsv")
      .def(
          "search",
          [](const Service& s, const py::dict& filters, const std::vector<std::string>& facets, const std::string& from,
             const std::string& to, std::optional<std::size_t> offset, std::optional<std::size_t> limit,
             const std::string& sort) {
            const auto params = search_params(filters, facets, from, to, offset, limit, sort);
            return to_py(to_json(s.search(query_from_params(params, s.config().default_limit))));
          },
          py::arg("filters") = py::dict(), py::arg("facets") = std::vector<std::string>{}, py::arg("from_") = "",
          py::arg("to") = "", py::arg("offset") = py::none(), py::arg("limit") = py::none(), py::arg("sort") = "")
      .def("schema", [](const Service& s) { return to_py(to_json(s.index().schema())); })
      .def("instruments",
           [](const Service& s) {
             py::list out;
             for (const auto& item : s.instruments()) {
               out.append(py::dict(py::arg("iri") = item.instrument.iri.str(), py::arg("label") = item.instrument.label,
                                   py::arg("knowledge_base") = item.knowledge_base));
             }
             return out;
           })
      .def(
          "deployment", [](const Service& s, std::string_view ref) { return to_py(to_json(s.deployment(ref))); },
          py::arg("reference"));
}
