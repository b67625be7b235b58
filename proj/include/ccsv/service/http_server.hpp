#pragma once

#include <memory>
#include <string>

#include "ccsv/service/service.hpp"

namespace ccsv {

/// JSON API over a Service:
///
///   GET  /api/health
///   GET  /api/schema
///   GET  /api/search?filter=<field>:<value>&facet=<field>&from=&to=&offset=&limit=&sort=
///   GET  /api/kb/instruments
///   GET  /api/kb/deployments/<id>
///   POST /api/datasets            (Content-Type: text/vnd.ccsv) -> 202 + LoadReport
///
/// Errors are {"error": {"code", "message", "subject"?}} with a code from
/// api_error_codes().
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the listening socket; port 0 picks a free one. Returns the bound
  /// port. Throws Error("BindFailed").
  int bind(const std::string& host, int port);

  /// Serves until stop(). Requires a successful bind().
  void listen();
  /// Blocks until listen() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ccsv
