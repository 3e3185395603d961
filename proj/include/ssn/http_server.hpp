#pragma once

#include <memory>
#include <string>

#include "ssn/service.hpp"

namespace ssn {

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds host:port; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call bind() first.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Splits "host:port"; a bare host gets port 8080. Throws Error(InvalidConfig).
std::pair<std::string, int> parse_bind_addr(const std::string& addr);

}  // namespace ssn
