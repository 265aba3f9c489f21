#include "hybridpower/service.hpp"

#include <charconv>

#include <httplib.h>

#include "hybridpower/api.hpp"

namespace hybridpower::service {

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const api::json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

bool is_json(const httplib::Request& req) {
  if (!req.has_header("Content-Type")) return true;
  const std::string type = req.get_header_value("Content-Type");
  return type.rfind(kJson, 0) == 0;
}

}  // namespace

std::string version() { return HYBRIDPOWER_VERSION; }

std::optional<Options> parse_address(const std::string& addr, Options base) {
  if (addr.empty()) return base;
  const auto colon = addr.rfind(':');
  std::string host = colon == std::string::npos ? addr : addr.substr(0, colon);
  if (colon != std::string::npos) {
    const std::string port = addr.substr(colon + 1);
    int value = -1;
    const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc() || end != port.data() + port.size() || value < 0 || value > 65535) {
      return std::nullopt;
    }
    base.port = value;
  }
  if (!host.empty()) base.host = host;
  return base;
}

struct Server::Impl {
  Options options;
  httplib::Server http;
};

Server::Server(Options options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto& http = impl_->http;
  const std::string cors = impl_->options.cors_origin;

  http.set_payload_max_length(impl_->options.max_body_bytes);
  http.set_post_routing_handler([cors](const httplib::Request&, httplib::Response& res) {
    if (!cors.empty()) {
      res.set_header("Access-Control-Allow-Origin", cors);
      res.set_header("Vary", "Origin");
    }
  });
  http.Options(R"(/v1/.*)", [cors](const httplib::Request&, httplib::Response& res) {
    if (cors.empty()) {
      res.status = 404;
      return;
    }
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });

  http.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    send(res, 200, {{"status", "ok"}, {"version", version()}});
  });

  for (auto endpoint : {api::Endpoint::Evaluate, api::Endpoint::SampleSize,
                        api::Endpoint::PowerDistribution, api::Endpoint::Utility,
                        api::Endpoint::ImpliedReward}) {
    const std::string path = "/v1/" + std::string(api::path_name(endpoint));
    http.Post(path, [endpoint](const httplib::Request& req, httplib::Response& res) {
      if (!is_json(req)) {
        send(res, 415, api::error_body("unsupported_media_type", "content type must be application/json"));
        return;
      }
      const auto outcome = api::handle_text(endpoint, req.body);
      send(res, outcome.status, outcome.body);
    });
  }

  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* code = res.status == 404 ? "not_found" : res.status == 413 ? "payload_too_large" : "http_error";
    send(res, res.status, api::error_body(code, httplib::status_message(res.status)));
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send(res, 500, api::error_body("internal", message));
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& o = impl_->options;
  if (o.port == 0) return impl_->http.bind_to_any_port(o.host);
  return impl_->http.bind_to_port(o.host, o.port) ? o.port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace hybridpower::service
