#include "gorenet/export.hpp"

namespace gorenet {

namespace {

Json label_list(const std::vector<QualLabel>& labels) {
  Json out = Json::array();
  for (auto l : labels) out.push_back(to_string(l));
  return out;
}

std::string name_of(const GoalModel& g, const std::string& id) {
  const Element* e = g.find_element(id);
  return e != nullptr ? e->name : id;
}

}  // namespace

Json report_to_json(const ValidationReport& report) {
  Json out = Json::array();
  for (const auto& v : report.violations) {
    out.push_back({{"severity", v.severity == Severity::error ? "error" : "warning"},
                   {"subject", v.subject},
                   {"rule", v.rule},
                   {"message", v.message}});
  }
  return out;
}

Json diagnostics_to_json(const std::vector<ParseDiagnostic>& diagnostics, std::string_view origin) {
  Json out = Json::array();
  for (const auto& d : diagnostics) {
    out.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"},
                   {"code", d.code},
                   {"message", d.message},
                   {"origin", origin},
                   {"line", d.span.line},
                   {"column", d.span.column},
                   {"length", d.span.length}});
  }
  return out;
}

Json judgment_point_to_json(const JudgmentPoint& p, const GoalModel& model) {
  return {{"element", p.element},
          {"name", name_of(model, p.element)},
          {"given", label_list(p.given)},
          {"scenario", p.scenario}};
}

Json trace_to_json(const HybridTrace& trace, const TwoLayerModel& model) {
  Json out = Json::object();
  Json places = Json::array();
  if (model.net) {
    for (const auto& p : model.net->places()) places.push_back(p.id);
  }
  out["places"] = std::move(places);
  Json markings = Json::array();
  for (const auto& m : trace.markings) markings.push_back(m.tokens);
  out["markings"] = std::move(markings);
  out["fired"] = trace.fired;
  Json events = Json::array();
  for (const auto& e : trace.events) {
    events.push_back({{"round", e.round},
                      {"step", e.step},
                      {"softgoal", e.softgoal},
                      {"polarity", to_string(e.polarity)},
                      {"sourcePlace", e.source_place}});
  }
  out["events"] = std::move(events);
  Json tallies = Json::array();
  for (const auto& [id, t] : trace.tallies) {
    tallies.push_back({{"softgoal", id}, {"name", name_of(model.goals, id)}, {"help", t.help}, {"hurt", t.hurt}});
  }
  out["tallies"] = std::move(tallies);
  out["roundsCompleted"] = trace.rounds_completed;
  out["status"] = to_string(trace.status);
  out["triggerState"] = to_string(trigger_state(trace));
  if (trace.error) {
    out["error"] = {{"step", trace.error->step}, {"transition", trace.error->transition}, {"message", trace.error->message}};
  } else {
    out["error"] = nullptr;
  }
  return out;
}

Json evaluation_to_json(const EvaluationResult& r, const GoalModel& model) {
  Json out = Json::object();
  out["scenario"] = r.scenario;
  out["status"] = r.status == EvaluationStatus::complete ? "complete" : "unresolved-judgments";
  Json labels = Json::object();
  for (const auto& [id, l] : r.labels) labels[id] = to_string(l);
  out["labels"] = std::move(labels);
  out["unlabeled"] = r.unlabeled;
  Json used = Json::array();
  for (const auto& j : r.judgments_used) {
    Json entry = {{"element", j.element}, {"given", label_list(j.given)}, {"label", to_string(j.label)},
                  {"scenario", j.scenario}, {"provenance", to_string(j.provenance)}};
    used.push_back(std::move(entry));
  }
  out["judgmentsUsed"] = std::move(used);
  Json pending = Json::array();
  for (const auto& p : r.pending) pending.push_back(judgment_point_to_json(p, model));
  out["pending"] = std::move(pending);
  Json audit = Json::array();
  for (const auto& a : r.audit) {
    audit.push_back({{"element", a.element}, {"label", to_string(a.label)}, {"rule", a.rule},
                     {"evidence", label_list(a.evidence)}});
  }
  out["audit"] = std::move(audit);
  out["warnings"] = r.warnings;
  return out;
}

Json backward_to_json(const BackwardResult& r, const GoalModel& model, std::string_view target,
                      QualLabel desired) {
  auto scenarios = [](const std::vector<Scenario>& list) {
    Json out = Json::array();
    for (const auto& s : list) {
      Json labels = Json::object();
      for (const auto& [id, l] : s.labels) labels[id] = to_string(l);
      out.push_back({{"name", s.name}, {"labels", labels}});
    }
    return out;
  };
  return {{"target", target},
          {"targetName", name_of(model, std::string(target))},
          {"desired", to_string(desired)},
          {"decisionPoints", r.decision_points},
          {"solutions", scenarios(r.solutions)},
          {"skipped", scenarios(r.skipped)}};
}

}  // namespace gorenet
