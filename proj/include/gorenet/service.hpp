#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "gorenet/dsl.hpp"

namespace gorenet {

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Model store and interactive sessions behind the HTTP endpoints. Models
/// are immutable once stored and shared by every session built on them;
/// each session owns its marking, trace and judgment answers.
class Service {
 public:
  Service();
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Transport-free dispatch; thread-safe.
  HttpResponse handle(const HttpRequest& request);

 private:
  struct Session;
  struct State;
  std::unique_ptr<State> state_;
};

/// Serves `service` on host:port until stop_serving() is called. Port 0
/// picks a free port. Returns false when the socket cannot be bound.
/// `on_ready` receives the bound port once listening has started.
bool serve(Service& service, const std::string& host, int port,
           const std::function<void(int)>& on_ready = {});

/// Asks a running serve() loop to return.
void stop_serving();

}  // namespace gorenet
