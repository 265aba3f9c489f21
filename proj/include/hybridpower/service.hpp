#pragma once

#include <memory>
#include <optional>
#include <string>

namespace hybridpower::service {

struct Options {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  /// Value of Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin;
  std::size_t max_body_bytes = 1 << 20;
};

/// Parses "host:port", "host" or ":port" (e.g. from HYBRIDPOWER_ADDR) over
/// the defaults in `base`. Returns nullopt when malformed.
std::optional<Options> parse_address(const std::string& addr, Options base = {});

std::string version();

/// JSON-over-HTTP front end for the api layer. Handlers keep no state between
/// requests.
class Server {
 public:
  explicit Server(Options options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the socket; returns the bound port, or -1 on failure.
  int bind();
  /// Serves until stop(); requires a successful bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hybridpower::service
