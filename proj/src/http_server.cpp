#include "ssn/http_server.hpp"

#include <httplib.h>

#include "ssn/error.hpp"

namespace ssn {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {}

  void dispatch(const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    req.accept = in.get_header_value("Accept");
    req.body = in.body;
    for (const auto& [name, part] : in.files) req.parts.emplace(name, part.content);

    auto res = service.handle(req);
    out.status = res.status;
    for (const auto& [k, v] : res.headers) out.set_header(k, v);
    out.set_content(res.body, res.content_type);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& in, httplib::Response& out) { impl_->dispatch(in, out); };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
  // The browser client is served from a different origin.
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  impl_->server.Options(".*", [](const httplib::Request&, httplib::Response& out) {
    out.set_header("Access-Control-Allow-Methods", "GET, POST");
    out.set_header("Access-Control-Allow-Headers", "Content-Type, Accept");
    out.status = 204;
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

std::pair<std::string, int> parse_bind_addr(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) return {addr, 8080};
  std::string host = addr.substr(0, colon);
  std::string port = addr.substr(colon + 1);
  char* end = nullptr;
  long p = std::strtol(port.c_str(), &end, 10);
  if (host.empty() || port.empty() || *end != '\0' || p < 0 || p > 65535)
    throw Error(ErrorCode::InvalidConfig, "bad bind address '" + addr + "'");
  return {host, static_cast<int>(p)};
}

}  // namespace ssn
