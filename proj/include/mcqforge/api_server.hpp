#pragma once

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "mcqforge/annotation.hpp"

namespace httplib {
class Server;
}

namespace mcqforge {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Transport-free dispatch of the JSON API; ApiServer is a thin httplib
/// wrapper around it.
///
///   GET  /api/task1/next?worker=W     POST /api/task1/submit
///   GET  /api/task2/next?worker=W     POST /api/task2/submit
///   GET  /api/stats                   POST /api/feedback
///
/// Errors: {"error", "constraint", "message"}; 404 unknown assignment or
/// route, 409 conflict, 422 validation, 503 configuration. "No work" is a
/// 200 with {"status": "no_work"}.
ApiResponse handle_request(AnnotationStore& store, const std::string& method, const std::string& path,
                           const std::map<std::string, std::string>& query, const std::string& body);

class ApiServer {
public:
  explicit ApiServer(AnnotationStore& store);
  ~ApiServer();

  /// Binds to an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

private:
  AnnotationStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace mcqforge
