#include "gorenet/service.hpp"

#include <atomic>
#include <chrono>
#include <regex>

#include <spdlog/spdlog.h>

// curl posts files as form data by default
#define CPPHTTPLIB_FORM_URL_ENCODED_PAYLOAD_MAX_LENGTH (16u << 20)
#include "httplib.h"

#include "gorenet/error.hpp"
#include "gorenet/export.hpp"

namespace gorenet {

struct Service::Session {
  std::mutex mutex;
  std::string id;
  std::string model_id;
  std::shared_ptr<const TwoLayerModel> model;
  std::optional<HybridStepper> stepper;
  std::string scenario;
  LabelMap labels;  // ad-hoc what-if edits on top of the scenario
  JudgmentTable supplied;
  JudgmentTable answers;
  std::optional<EvaluationResult> last;
};

struct Service::State {
  std::mutex mutex;
  std::map<std::string, std::shared_ptr<const TwoLayerModel>> models;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::size_t next_model = 1;
  std::size_t next_session = 1;
};

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

HttpResponse json_response(int status, const Json& body) { return {status, body.dump(), "application/json"}; }

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    Json j = Json::parse(body);
    if (!j.is_object()) throw HttpError{400, "bad-request", "request body must be a JSON object"};
    return j;
  } catch (const Json::exception& e) {
    throw HttpError{400, "bad-request", std::string("invalid JSON: ") + e.what()};
  }
}

std::string string_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw HttpError{400, "bad-request", std::string("missing string field '") + key + "'"};
  }
  return j[key].get<std::string>();
}

QualLabel label_value(const Json& j) {
  if (!j.is_string()) throw HttpError{400, "bad-request", "labels must be strings"};
  auto l = parse_label(j.get<std::string>());
  if (!l) throw HttpError{400, "bad-label", "unknown label '" + j.get<std::string>() + "'"};
  return *l;
}

std::string element_id(const TwoLayerModel& m, const std::string& key) {
  if (m.goals.find_element(key) != nullptr) return key;
  if (const Element* e = m.goals.find_element_by_name(key)) return e->id;
  throw HttpError{400, "unknown-element", "no element '" + key + "'"};
}

Marking marking_value(const TwoLayerModel& m, const Json& j) {
  Marking out = m.net->empty_marking();
  if (j.is_array()) {
    if (j.size() != out.size()) {
      throw HttpError{400, "dimension-mismatch",
                      "marking has " + std::to_string(j.size()) + " entries but the net has " +
                          std::to_string(out.size()) + " places"};
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number_unsigned()) throw HttpError{400, "bad-request", "token counts must be non-negative integers"};
      out.tokens[i] = j[i].get<std::uint64_t>();
    }
    return out;
  }
  if (j.is_object()) {
    for (const auto& [place, count] : j.items()) {
      auto p = m.net->place_index(place);
      if (!p) throw HttpError{400, "unknown-place", "no place '" + place + "'"};
      if (!count.is_number_unsigned()) throw HttpError{400, "bad-request", "token counts must be non-negative integers"};
      out.tokens[*p] = count.get<std::uint64_t>();
    }
    return out;
  }
  throw HttpError{400, "bad-request", "marking must be an array or an object"};
}

JudgmentTable judgments_value(const TwoLayerModel& m, const Json& j) {
  if (j.is_string()) {
    auto parsed = parse_judgments({j.get<std::string>(), "<request>"}, m.goals);
    if (!parsed.table) {
      throw HttpError{400, "parse-error", parsed.diagnostics.empty() ? "bad judgments"
                                                                      : format_diagnostic(parsed.diagnostics.front(), "<request>")};
    }
    return *parsed.table;
  }
  if (!j.is_array()) throw HttpError{400, "bad-request", "judgments must be DSL text or an array"};
  JudgmentTable out;
  for (const auto& e : j) {
    Judgment judgment;
    judgment.element = element_id(m, string_field(e, "element"));
    if (!e.contains("given") || !e["given"].is_array() || e["given"].empty()) {
      throw HttpError{400, "bad-request", "judgment needs a non-empty 'given' list"};
    }
    for (const auto& l : e["given"]) judgment.given.push_back(label_value(l));
    judgment.label = label_value(e.value("label", Json()));
    judgment.scenario = e.value("scenario", "");
    out.add(std::move(judgment));
  }
  return out;
}

Json enabled_json(const TwoLayerModel& m, const Marking& marking) {
  return enabled(*m.net, marking);
}

}  // namespace

Service::Service() : state_(std::make_unique<State>()) {}
Service::~Service() = default;

HttpResponse Service::handle(const HttpRequest& req) {
  static const std::regex model_re("^/models/([^/]+)$");
  static const std::regex dot_re("^/models/([^/]+)/dot$");
  static const std::regex session_re("^/sessions/([^/]+)$");
  static const std::regex session_action_re("^/sessions/([^/]+)/(step|evaluate|judgments)$");
  std::smatch match;

  auto find_model = [&](const std::string& id) {
    std::lock_guard lock(state_->mutex);
    auto it = state_->models.find(id);
    if (it == state_->models.end()) throw HttpError{404, "unknown-model", "no model '" + id + "'"};
    return it->second;
  };
  auto find_session = [&](const std::string& id) {
    std::lock_guard lock(state_->mutex);
    auto it = state_->sessions.find(id);
    if (it == state_->sessions.end()) throw HttpError{404, "unknown-session", "no session '" + id + "'"};
    return it->second;
  };
  auto evaluate = [](Session& s) {
    const TwoLayerModel& m = *s.model;
    Scenario scenario;
    if (const Scenario* named = m.find_scenario(s.scenario)) {
      scenario = *named;
    } else {
      scenario.name = s.scenario.empty() ? "session" : s.scenario;
      scenario.extends_baseline = true;
    }
    for (const auto& [id, l] : s.labels) scenario.labels[id] = l;
    JudgmentTable table = m.judgments;
    table.merge(s.supplied);
    table.merge(s.answers);
    s.last = propagate_forward(m.goals, scenario, m.baseline, table);
    return evaluation_to_json(*s.last, m.goals);
  };
  auto session_json = [](const Session& s) {
    Json out = {{"sessionId", s.id}, {"modelId", s.model_id}, {"scenario", s.scenario}};
    if (s.stepper) {
      out["marking"] = s.stepper->marking().tokens;
      out["enabled"] = enabled_json(*s.model, s.stepper->marking());
      out["trace"] = trace_to_json(s.stepper->trace(), *s.model);
    } else {
      out["marking"] = nullptr;
      out["enabled"] = Json::array();
      out["trace"] = nullptr;
    }
    out["evaluation"] = s.last ? evaluation_to_json(*s.last, s.model->goals) : Json(nullptr);
    return out;
  };

  try {
    if (req.method == "GET" && req.path == "/health") return json_response(200, {{"status", "ok"}});

    if (req.method == "POST" && req.path == "/models") {
      std::string text = req.body;
      if (!text.empty() && text.front() == '{') text = string_field(parse_body(req.body), "source");
      auto parsed = parse({text, "<request>"});
      if (!parsed.ok()) {
        return json_response(400, {{"error", "parse-error"},
                                   {"diagnostics", diagnostics_to_json(parsed.diagnostics, "<request>")}});
      }
      auto model = std::make_shared<const TwoLayerModel>(std::move(*parsed.model));
      std::string id;
      {
        std::lock_guard lock(state_->mutex);
        id = "m" + std::to_string(state_->next_model++);
        state_->models.emplace(id, model);
      }
      return json_response(201, {{"modelId", id}, {"diagnostics", diagnostics_to_json(parsed.diagnostics, "<request>")}});
    }

    if (req.method == "GET" && std::regex_match(req.path, match, model_re)) {
      return json_response(200, model_to_json(*find_model(match[1])));
    }

    if (req.method == "GET" && std::regex_match(req.path, match, dot_re)) {
      auto model = find_model(match[1]);
      auto it = req.query.find("layer");
      auto layer = parse_dot_layer(it == req.query.end() ? "hybrid" : it->second);
      if (!layer) throw HttpError{400, "bad-layer", "layer must be goal, net or hybrid"};
      return {200, export_dot(*model, *layer), "text/vnd.graphviz"};
    }

    if (req.method == "POST" && req.path == "/sessions") {
      const Json body = parse_body(req.body);
      auto session = std::make_shared<Session>();
      session->model_id = string_field(body, "modelId");
      session->model = find_model(session->model_id);
      const TwoLayerModel& m = *session->model;
      if (body.contains("scenario")) {
        session->scenario = string_field(body, "scenario");
        if (m.find_scenario(session->scenario) == nullptr) {
          throw HttpError{404, "unknown-scenario", "no scenario '" + session->scenario + "'"};
        }
      }
      if (body.contains("labels")) {
        for (const auto& [key, l] : body["labels"].items()) session->labels[element_id(m, key)] = label_value(l);
      }
      if (m.net) {
        Marking m0 = body.contains("marking") ? marking_value(m, body["marking"]) : m.initial_marking;
        session->stepper.emplace(m.goals, *m.net, m.binding, std::move(m0), m.round_transition);
      } else if (body.contains("marking")) {
        throw HttpError{400, "no-net", "the model has no Petri net layer"};
      }
      {
        std::lock_guard lock(state_->mutex);
        session->id = "s" + std::to_string(state_->next_session++);
        state_->sessions.emplace(session->id, session);
      }
      std::lock_guard lock(session->mutex);
      return json_response(201, session_json(*session));
    }

    if (req.method == "GET" && std::regex_match(req.path, match, session_re)) {
      auto session = find_session(match[1]);
      std::lock_guard lock(session->mutex);
      return json_response(200, session_json(*session));
    }

    if (req.method == "POST" && std::regex_match(req.path, match, session_action_re)) {
      auto session = find_session(match[1]);
      const std::string action = match[2];
      const Json body = parse_body(req.body);
      std::lock_guard lock(session->mutex);
      const TwoLayerModel& m = *session->model;

      if (action == "step") {
        if (!session->stepper) throw HttpError{409, "no-net", "the model has no Petri net layer"};
        const std::string t = string_field(body, "transition");
        std::vector<ContributionEvent> events;
        try {
          events = session->stepper->step(t);
        } catch (const Error& e) {
          throw HttpError{e.code() == "unknown-transition" ? 404 : 409, e.code(), e.what()};
        }
        Json ev = Json::array();
        for (const auto& e : events) {
          ev.push_back({{"round", e.round}, {"step", e.step}, {"softgoal", e.softgoal},
                        {"polarity", to_string(e.polarity)}, {"sourcePlace", e.source_place}});
        }
        return json_response(200, {{"marking", session->stepper->marking().tokens},
                                   {"enabled", enabled_json(m, session->stepper->marking())},
                                   {"events", ev}});
      }
      if (action == "evaluate") {
        if (body.contains("judgments")) session->supplied = judgments_value(m, body["judgments"]);
        if (body.contains("labels")) {
          session->labels.clear();
          for (const auto& [key, l] : body["labels"].items()) session->labels[element_id(m, key)] = label_value(l);
        }
        return json_response(200, evaluate(*session));
      }
      // judgments: one interactive answer, then resume
      if (!body.contains("point") || !body["point"].is_object()) {
        throw HttpError{400, "bad-request", "missing object field 'point'"};
      }
      const Json& point = body["point"];
      Judgment j;
      j.element = element_id(m, string_field(point, "element"));
      if (!point.contains("given") || !point["given"].is_array() || point["given"].empty()) {
        throw HttpError{400, "bad-request", "point needs a non-empty 'given' list"};
      }
      for (const auto& l : point["given"]) j.given.push_back(label_value(l));
      j.scenario = point.value("scenario", "");
      j.label = label_value(body.value("label", Json()));
      j.provenance = Provenance::interactive;
      session->answers.add(std::move(j));
      return json_response(200, evaluate(*session));
    }
    throw HttpError{404, "not-found", "no route for " + req.method + " " + req.path};
  } catch (const HttpError& e) {
    return json_response(e.status, {{"error", e.code}, {"message", e.message}});
  } catch (const Error& e) {
    return json_response(400, {{"error", e.code()}, {"message", e.what()}});
  }
}

namespace {
std::atomic<httplib::Server*> g_server{nullptr};
}

bool serve(Service& service, const std::string& host, int port, const std::function<void(int)>& on_ready) {
  httplib::Server server;
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.method, req.path, req.body, {}};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    auto out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  // httplib's default also sets SO_REUSEPORT, which lets a second server
  // share a busy port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} -> {}", req.method, req.path, res.status);
  });

  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
    if (bound < 0) return false;
  } else if (!server.bind_to_port(host, port)) {
    return false;
  }
  g_server = &server;
  spdlog::info("gorenet service listening on {}:{}", host, bound);
  std::thread ready;
  if (on_ready) {
    ready = std::thread([&] {
      server.wait_until_ready();
      on_ready(bound);
    });
  }
  const bool ok = server.listen_after_bind();
  if (ready.joinable()) ready.join();
  g_server = nullptr;
  return ok;
}

void stop_serving() {
  if (httplib::Server* s = g_server.load()) s->stop();
}

}  // namespace gorenet
