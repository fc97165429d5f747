#include "gorenet/export.hpp"

#include <map>
#include <sstream>

#include "gorenet/error.hpp"

namespace gorenet {

std::optional<DotLayer> parse_dot_layer(std::string_view text) {
  if (text == "goal") return DotLayer::goal;
  if (text == "net") return DotLayer::net;
  if (text == "hybrid") return DotLayer::hybrid;
  return std::nullopt;
}

Json model_to_json(const TwoLayerModel& m) {
  Json out = Json::object();
  Json actors = Json::array();
  for (const auto& a : m.goals.actors) {
    actors.push_back({{"id", a.id}, {"name", a.name}, {"kind", to_string(a.kind)}, {"plays", a.plays}});
  }
  out["actors"] = std::move(actors);

  Json elements = Json::array();
  for (const auto& e : m.goals.elements) {
    elements.push_back({{"id", e.id},
                        {"name", e.name},
                        {"kind", to_string(e.kind)},
                        {"owner", e.owner ? Json(*e.owner) : Json(nullptr)},
                        {"decision", e.decision}});
  }
  out["elements"] = std::move(elements);

  Json links = Json::array();
  for (const auto& l : m.goals.links) {
    Json j = {{"id", l.id}, {"kind", to_string(l.kind)}, {"source", l.source}, {"target", l.target}};
    if (l.polarity) j["polarity"] = to_string(*l.polarity);
    if (l.dependum) j["dependum"] = *l.dependum;
    links.push_back(std::move(j));
  }
  out["links"] = std::move(links);

  if (m.net) {
    Json net = Json::object();
    Json places = Json::array();
    for (const auto& p : m.net->places()) {
      Json j = {{"id", p.id}, {"label", p.label}};
      if (p.kind) j["kind"] = to_string(*p.kind);
      places.push_back(std::move(j));
    }
    net["places"] = std::move(places);
    Json transitions = Json::array();
    for (const auto& t : m.net->transitions()) transitions.push_back({{"id", t.id}, {"label", t.label}});
    net["transitions"] = std::move(transitions);
    Json arcs = Json::array();
    for (const auto& a : m.net->arcs()) arcs.push_back({{"from", a.from}, {"to", a.to}, {"weight", a.weight}});
    net["arcs"] = std::move(arcs);
    net["marking"] = m.initial_marking.tokens;
    if (m.round_transition) net["loop"] = *m.round_transition;
    if (!m.scripts.empty()) {
      Json scripts = Json::array();
      for (const auto& s : m.scripts) scripts.push_back({{"name", s.name}, {"steps", s.steps}});
      net["scripts"] = std::move(scripts);
    }
    if (!m.default_run.empty()) net["run"] = m.default_run;
    out["net"] = std::move(net);
  } else {
    out["net"] = nullptr;
  }

  Json bindings = Json::array();
  for (const auto& b : m.binding.entries) {
    Json j = {{"place", b.place}, {"element", b.element}, {"polarity", to_string(b.polarity)}};
    if (b.asserted_kind) j["kind"] = to_string(*b.asserted_kind);
    bindings.push_back(std::move(j));
  }
  out["bindings"] = std::move(bindings);

  if (m.binding.trigger) out["trigger"] = *m.binding.trigger;
  if (!m.baseline.empty()) {
    Json b = Json::object();
    for (const auto& [id, l] : m.baseline) b[id] = to_string(l);
    out["baseline"] = std::move(b);
  }
  if (!m.scenarios.empty()) {
    Json scenarios = Json::array();
    for (const auto& s : m.scenarios) {
      Json labels = Json::object();
      for (const auto& [id, l] : s.labels) labels[id] = to_string(l);
      scenarios.push_back({{"name", s.name}, {"extendsBaseline", s.extends_baseline}, {"labels", labels}});
    }
    out["scenarios"] = std::move(scenarios);
  }
  if (!m.judgments.empty()) {
    Json judgments = Json::array();
    for (const auto& j : m.judgments.entries()) {
      Json given = Json::array();
      for (auto l : j.given) given.push_back(to_string(l));
      Json entry = {{"element", j.element}, {"given", given}, {"label", to_string(j.label)}};
      if (!j.scenario.empty()) entry["scenario"] = j.scenario;
      entry["provenance"] = to_string(j.provenance);
      judgments.push_back(std::move(entry));
    }
    out["judgments"] = std::move(judgments);
  }
  return out;
}

std::string export_json(const TwoLayerModel& model) { return model_to_json(model).dump(); }

namespace {

std::string dq(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

std::string element_style(ElementKind kind) {
  switch (kind) {
    case ElementKind::goal: return "shape=box, style=rounded";
    case ElementKind::softgoal: return "shape=ellipse, style=dashed, istar=softgoal";
    case ElementKind::task: return "shape=hexagon";
    case ElementKind::resource: return "shape=box";
  }
  return "shape=circle";
}

std::string place_style(PlaceKind kind) {
  switch (kind) {
    case PlaceKind::goal: return element_style(ElementKind::goal);
    case PlaceKind::softgoal: return element_style(ElementKind::softgoal);
    case PlaceKind::task: return element_style(ElementKind::task);
    case PlaceKind::resource: return element_style(ElementKind::resource);
    case PlaceKind::agent: return "shape=doublecircle";
  }
  return "shape=circle";
}

void net_body(std::ostream& out, const TwoLayerModel& m, bool hybrid) {
  const PetriNet& net = *m.net;
  for (std::size_t i = 0; i < net.places().size(); ++i) {
    const Place& p = net.places()[i];
    std::string style = "shape=circle";
    std::string label = p.label;
    if (hybrid) {
      const BindingEntry* b = m.binding.for_place(p.id);
      const Element* e = b != nullptr ? m.goals.find_element(b->element) : nullptr;
      if (e != nullptr) {
        style = element_style(e->kind);
        label = e->name;
      } else if (p.kind) {
        style = place_style(*p.kind);
      }
    }
    std::string tokens;
    if (m.initial_marking.size() == net.places().size() && m.initial_marking[i] > 0) {
      tokens = ", tokens=" + std::to_string(m.initial_marking[i]);
    }
    out << "  " << dq(p.id) << " [" << style << ", label=" << dq(p.id) << ", xlabel=" << dq(label)
        << tokens << "];\n";
  }
  for (const auto& t : net.transitions()) {
    out << "  " << dq(t.id) << " [shape=box, width=0.1, height=0.5, style=filled, fillcolor=black, label=\"\", xlabel="
        << dq(t.label.empty() ? t.id : t.id + ": " + t.label) << "];\n";
  }
  for (const auto& a : net.arcs()) {
    out << "  " << dq(a.from) << " -> " << dq(a.to);
    if (a.weight != 1) out << " [label=" << dq(std::to_string(a.weight)) << "]";
    out << ";\n";
  }
}

void goal_body(std::ostream& out, const GoalModel& g) {
  for (std::size_t i = 0; i < g.actors.size(); ++i) {
    const Actor& a = g.actors[i];
    out << "  subgraph " << dq("cluster_" + a.id) << " {\n";
    out << "    label=" << dq(a.name + " (" + std::string(to_string(a.kind)) + ")") << ";\n";
    out << "    style=dashed;\n";
    for (const auto& e : g.elements) {
      if (e.owner != a.id) continue;
      out << "    " << dq(e.id) << " [" << element_style(e.kind) << ", label=" << dq(e.name)
          << (e.decision ? ", peripheries=2" : "") << "];\n";
    }
    out << "  }\n";
  }
  for (const auto& e : g.elements) {
    if (e.owner && g.find_actor(*e.owner) != nullptr) continue;
    out << "  " << dq(e.id) << " [" << element_style(e.kind) << ", label=" << dq(e.name) << "];\n";
  }
  for (const auto& a : g.actors) {
    for (const auto& role : a.plays) {
      out << "  // " << a.id << " plays " << role << "\n";
    }
  }
  for (const auto& l : g.links) {
    switch (l.kind) {
      case LinkKind::decomposition:
        out << "  " << dq(l.target) << " -> " << dq(l.source) << " [arrowhead=tee, label=\"and\"];\n";
        break;
      case LinkKind::means_end:
        out << "  " << dq(l.target) << " -> " << dq(l.source) << " [arrowhead=vee, label=\"me\"];\n";
        break;
      case LinkKind::contribution:
        out << "  " << dq(l.source) << " -> " << dq(l.target) << " [style=dotted, label="
            << dq(l.polarity == Polarity::hurt ? "-" : "+") << "];\n";
        break;
      case LinkKind::dependency:
        out << "  " << dq(l.source) << " -> " << dq(l.dependum.value_or("")) << " [arrowhead=none, label=\"D\"];\n";
        out << "  " << dq(l.dependum.value_or("")) << " -> " << dq(l.target) << " [label=\"D\"];\n";
        break;
    }
  }
}

}  // namespace

std::string export_dot(const TwoLayerModel& m, DotLayer layer) {
  std::ostringstream out;
  switch (layer) {
    case DotLayer::goal:
      out << "digraph goal {\n  rankdir=BT;\n  compound=true;\n";
      goal_body(out, m.goals);
      break;
    case DotLayer::net:
      if (!m.net) throw Error("no-net", "the model has no Petri net layer");
      out << "digraph net {\n  rankdir=LR;\n";
      net_body(out, m, false);
      break;
    case DotLayer::hybrid:
      if (!m.net) throw Error("no-net", "the model has no Petri net layer");
      if (m.binding.entries.empty()) throw Error("no-bindings", "the hybrid view needs place bindings");
      out << "digraph hybrid {\n  rankdir=LR;\n";
      net_body(out, m, true);
      break;
  }
  out << "}\n";
  return out.str();
}

}  // namespace gorenet
