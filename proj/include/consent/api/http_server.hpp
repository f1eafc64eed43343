#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "consent/api/gateway.hpp"

namespace httplib {
class Server;
}

namespace consent::api {

/// HTTP/1.1 binding of Gateway. Bodies are canonical JSON; the bearer token
/// comes from the Authorization header.
class HttpServer {
 public:
  explicit HttpServer(Gateway& gateway,
                      std::optional<std::filesystem::path> staticDir = std::nullopt);
  ~HttpServer();

  // Blocks until stop(). Returns false if the port could not be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int bindAnyPort(const std::string& host);
  // Serves on a port bound by bindAnyPort. Blocks until stop().
  bool serveBound();
  void waitUntilReady() const;
  void stop();

 private:
  void routes();

  Gateway& gateway_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace consent::api
