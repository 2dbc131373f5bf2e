#include "mcqforge/api_server.hpp"

#include <httplib.h>

#include "mcqforge/error.hpp"

namespace mcqforge {

namespace {

using json = nlohmann::json;

ApiResponse error_response(int status, std::string_view kind, const NamedError& e) {
  return {status, {{"error", kind}, {"constraint", e.constraint()}, {"message", e.what()}}};
}

json record_json(const MCQRecord& r) { return json::parse(mc_line(r)); }

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_string()) throw ValidationError("malformed_json", std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<std::string> list_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  const json& v = j.at(key);
  if (!v.is_array()) throw ValidationError("malformed_json", std::string("'") + key + "' must be a list");
  std::vector<std::string> out;
  for (const json& x : v) {
    if (!x.is_string()) throw ValidationError("malformed_json", std::string("'") + key + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json parse_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("malformed_json", "body is not a JSON object");
  return j;
}

std::string worker_of(const std::map<std::string, std::string>& query) {
  const auto it = query.find("worker");
  return it == query.end() ? std::string() : it->second;
}

ApiResponse task1_next(AnnotationStore& store, const std::map<std::string, std::string>& query) {
  const Task1Assignment a = store.next_task1(worker_of(query));
  json paragraphs = json::array();
  for (const std::string& id : a.paragraph_ids) {
    paragraphs.push_back({{"id", id}, {"text", store.paragraph(id)->text}});
  }
  return {200,
          {{"status", "ok"},
           {"assignment_id", a.assignment_id},
           {"issued_at", a.issued_at},
           {"paragraphs", paragraphs}}};
}

ApiResponse task1_submit(AnnotationStore& store, const std::string& body) {
  const json j = parse_body(body);
  Task1Response r{string_field(j, "assignment_id"), string_field(j, "choice"), string_field(j, "question"),
                  string_field(j, "answer")};
  const Task1Result res = store.submit_task1(r);
  json out = {{"status", res.qa ? "ok" : "rejected_all"}, {"warnings", res.warnings}, {"duplicate", res.duplicate}};
  if (res.qa) {
    out["qa"] = {{"id", res.qa->id}, {"question", res.qa->question}, {"answer", res.qa->answer},
                 {"paragraph_id", res.qa->paragraph_id}};
  }
  return {200, out};
}

ApiResponse task2_next(AnnotationStore& store, const std::map<std::string, std::string>& query) {
  const Task2Assignment a = store.next_task2(worker_of(query));
  QAPair qa;
  for (const QAPair& q : store.qa_pairs()) {
    if (q.id == a.qa_id) qa = q;
  }
  json suggestions = json::array();
  for (const auto& s : a.suggestions) suggestions.push_back({{"surface", s.surface}, {"score", s.score}});
  return {200,
          {{"status", "ok"},
           {"assignment_id", a.assignment_id},
           {"issued_at", a.issued_at},
           {"qa", {{"id", qa.id}, {"question", qa.question}, {"answer", qa.answer}}},
           {"suggestions", suggestions}}};
}

ApiResponse task2_submit(AnnotationStore& store, const std::string& body) {
  const json j = parse_body(body);
  Task2Response r;
  r.assignment_id = string_field(j, "assignment_id");
  r.verdict = string_field(j, "verdict");
  r.fail_reason = string_field(j, "fail_reason");
  r.selected = list_field(j, "selected");
  r.written = list_field(j, "written");
  if (j.contains("final_distractors") && !j.at("final_distractors").is_null()) {
    r.final_distractors = list_field(j, "final_distractors");
  }
  const Task2Result res = store.submit_task2(r);
  json out = {{"status", res.record ? "ok" : "failed"}, {"duplicate", res.duplicate}};
  if (res.record) {
    out["record"] = record_json(*res.record);
  } else {
    out["fail_reason"] = res.fail_reason;
  }
  return {200, out};
}

ApiResponse feedback(AnnotationStore& store, const std::string& body) {
  const json j = parse_body(body);
  store.add_feedback(string_field(j, "worker"), string_field(j, "text"));
  return {200, {{"status", "ok"}}};
}

}  // namespace

ApiResponse handle_request(AnnotationStore& store, const std::string& method, const std::string& path,
                           const std::map<std::string, std::string>& query, const std::string& body) {
  try {
    if (method == "GET" && path == "/api/task1/next") return task1_next(store, query);
    if (method == "POST" && path == "/api/task1/submit") return task1_submit(store, body);
    if (method == "GET" && path == "/api/task2/next") return task2_next(store, query);
    if (method == "POST" && path == "/api/task2/submit") return task2_submit(store, body);
    if (method == "GET" && path == "/api/stats") return {200, store.stats().to_json()};
    if (method == "POST" && path == "/api/feedback") return feedback(store, body);
    return {404, {{"error", "not_found"}, {"constraint", "unknown_route"}, {"message", method + " " + path}}};
  } catch (const NoWork&) {
    return {200, {{"status", "no_work"}}};
  } catch (const ConflictError& e) {
    return error_response(e.constraint() == "unknown_assignment" ? 404 : 409, "conflict", e);
  } catch (const ValidationError& e) {
    return error_response(422, "validation", e);
  } catch (const ConfigError& e) {
    return error_response(503, "configuration", e);
  }
}

ApiServer::ApiServer(AnnotationStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    ApiResponse r;
    try {
      r = handle_request(store_, req.method, req.path, query, req.body);
    } catch (const std::exception& e) {
      r = {500, {{"error", "internal"}, {"constraint", "internal"}, {"message", e.what()}}};
    }
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(R"(/api/.*)", route);
  server_->Post(R"(/api/.*)", route);
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool ApiServer::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }

bool ApiServer::listen_after_bind() { return server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_) server_->stop();
}

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace mcqforge
