#include "ccsv/service/http_server.hpp"

#include <httplib.h>

#include <exception>

#include "ccsv/error.hpp"
#include "ccsv/service/json.hpp"

namespace ccsv {

namespace {

constexpr const char* kJson = "application/json";

int status_for(std::string_view code) {
  if (code == "UnknownField" || code == "NotFacetable" || code == "InvalidQuery" || code == "BadRequest") return 400;
  if (code == "UnknownDeployment" || code == "NotFound") return 404;
  if (code == "UnsupportedMediaType") return 415;
  if (code == "Internal") return 500;
  return 422;
}

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, std::string_view code, std::string_view message,
                std::string_view subject = {}) {
  const std::string closed = closed_error_code(code);
  send(res, status_for(closed), error_json(closed, message, subject));
}

// Runs a handler, mapping library errors onto the closed error set.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_error(res, e.code(), e.what(), e.subject());
  } catch (const std::invalid_argument& e) {
    send_error(res, "BadRequest", e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}

  void routes() {
    // SO_REUSEADDR only; with SO_REUSEPORT a second server would share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    const std::string origin = service.config().server.cors_origin;
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    });
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) {
        send_error(res, "NotFound", "no route for " + req.method + " " + req.path);
      } else if (res.status >= 400) {
        const int status = res.status;
        send_error(res, status >= 500 ? "Internal" : "BadRequest", httplib::status_message(status));
        res.status = status;
      }
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "unexpected failure";
      try {
        if (ep) std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send_error(res, "Internal", message);
    });

    server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      Json kbs = Json::array();
      for (const auto& kb : service.knowledge_bases()) kbs.push_back({{"name", kb->name()}, {"triples", kb->size()}});
      send(res, 200, {{"status", "ok"}, {"records", service.index().size()}, {"knowledge_bases", kbs}});
    });

    server.Get("/api/schema", [this](const httplib::Request&, httplib::Response& res) {
      Json body = to_json(service.index().schema());
      body["default_limit"] = service.config().default_limit;
      body["max_limit"] = service.config().max_limit;
      send(res, 200, body);
    });

    server.Get("/api/search", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::vector<std::pair<std::string, std::string>> params(req.params.begin(), req.params.end());
        const FacetedQuery q = query_from_params(params, service.config().default_limit);
        send(res, 200, to_json(service.search(q)));
      });
    });

    server.Get("/api/kb/instruments", [this](const httplib::Request&, httplib::Response& res) {
      Json list = Json::array();
      for (const auto& item : service.instruments()) {
        list.push_back({{"iri", item.instrument.iri.str()},
                        {"label", item.instrument.label},
                        {"knowledge_base", item.knowledge_base}});
      }
      send(res, 200, {{"instruments", list}});
    });

    server.Get(R"(/api/kb/deployments/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send(res, 200, to_json(service.deployment(req.matches[1].str()))); });
    });

    server.Post("/api/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string type = req.get_header_value("Content-Type");
        if (type.rfind("text/vnd.ccsv", 0) != 0) {
          send_error(res, "UnsupportedMediaType", "expected Content-Type text/vnd.ccsv, got '" + type + "'");
          return;
        }
        const std::string name = req.has_param("name") ? req.get_param_value("name") : "upload.ccsv";
        const CcsvDocument doc = service.parse(req.body, name);
        const LoadResult result = service.ingest(doc);
        send(res, 202, to_json(result.report));
      });
    });
  }

  Service& service;
  httplib::Server server;
  bool bound = false;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) { impl_->routes(); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound_port = port;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound_port = -1;
  }
  if (bound_port <= 0) throw Error("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound_port;
}

void HttpServer::listen() {
  if (!impl_->bound) throw Error("BindFailed", "listen() before bind()");
  impl_->server.listen_after_bind();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace ccsv
