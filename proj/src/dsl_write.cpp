#include <map>
#include <set>
#include <sstream>

#include "gorenet/dsl.hpp"

namespace gorenet {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

// References use the name unless another element shares it.
class Names {
 public:
  explicit Names(const GoalModel& g) : g_(g) {
    for (const auto& e : g.elements) ++element_names_[e.name];
    for (const auto& a : g.actors) ++actor_names_[a.name];
  }

  std::string element(const std::string& id) const {
    const Element* e = g_.find_element(id);
    if (e == nullptr || element_names_.at(e->name) > 1 || e->name.empty()) return "@" + id;
    return quote(e->name);
  }

  std::string actor(const std::string& id) const {
    const Actor* a = g_.find_actor(id);
    if (a == nullptr || actor_names_.at(a->name) > 1) return "@" + id;
    return quote(a->name);
  }

 private:
  const GoalModel& g_;
  std::map<std::string, int> element_names_;
  std::map<std::string, int> actor_names_;
};

std::string id_suffix(const std::string& id, const std::string& name) {
  return id == slugify(name) ? "" : " @" + id;
}

std::string element_decl(const Element& e) {
  std::string out = std::string(to_string(e.kind)) + " " + quote(e.name) + id_suffix(e.id, e.name);
  if (e.decision) out += " decision";
  return out;
}

std::string given_list(const std::vector<QualLabel>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ", ";
    out += to_string(labels[i]);
  }
  return out + "}";
}

std::string judgment_line(const Judgment& j, const Names& names) {
  std::string out = "judgment " + names.element(j.element) + " given " + given_list(j.given) + " => " +
                    std::string(to_string(j.label));
  if (!j.scenario.empty()) out += " in " + quote(j.scenario);
  return out;
}

void label_block(std::ostream& out, const LabelMap& labels, const Names& names) {
  out << "{\n";
  for (const auto& [id, label] : labels) out << "  " << names.element(id) << " = " << to_string(label) << "\n";
  out << "}\n";
}

}  // namespace

std::string format_judgment(const Judgment& judgment, const GoalModel& model) {
  return judgment_line(judgment, Names(model));
}

SourceDocument serialize(const TwoLayerModel& m) {
  const GoalModel& g = m.goals;
  const Names names(g);
  std::ostringstream out;
  out << "# gorenet model v1\n";

  for (const auto& a : g.actors) {
    out << "\n" << to_string(a.kind) << " " << quote(a.name) << id_suffix(a.id, a.name) << " {";
    bool any = false;
    for (const auto& role : a.plays) {
      out << "\n  plays " << names.actor(role);
      any = true;
    }
    for (const auto& e : g.elements) {
      if (e.owner == a.id) {
        out << "\n  " << element_decl(e);
        any = true;
      }
    }
    out << (any ? "\n}\n" : "}\n");
  }

  // Boundary-free elements are declared inline by their first dependency
  // when the syntax allows it, and as top-level declarations otherwise.
  std::set<std::string> inline_dependums;
  for (const auto& l : g.links) {
    if (l.kind != LinkKind::dependency || !l.dependum) continue;
    const Element* d = g.find_element(*l.dependum);
    if (d != nullptr && !d->owner && !d->decision && d->id == slugify(d->name)) {
      inline_dependums.insert(d->id);
    }
  }
  bool header = false;
  for (const auto& e : g.elements) {
    if (e.owner && g.find_actor(*e.owner) != nullptr) continue;
    if (inline_dependums.contains(e.id)) continue;
    if (!header) out << "\n";
    header = true;
    out << element_decl(e) << "\n";
  }

  if (!g.links.empty()) out << "\n";
  std::set<std::string> declared;
  for (const auto& l : g.links) {
    switch (l.kind) {
      case LinkKind::decomposition:
        out << names.element(l.source) << " and-of " << names.element(l.target) << "\n";
        break;
      case LinkKind::means_end:
        out << names.element(l.source) << " means-end " << names.element(l.target) << "\n";
        break;
      case LinkKind::contribution: {
        const auto p = l.polarity.value_or(Polarity::help);
        const char* verb = p == Polarity::help   ? "helps"
                           : p == Polarity::hurt ? "hurts"
                           : p == Polarity::make ? "makes"
                                                 : "breaks";
        out << names.element(l.source) << " " << verb << " " << names.element(l.target) << "\n";
        break;
      }
      case LinkKind::dependency: {
        out << "depend " << names.element(l.source) << " --(";
        const std::string& d = l.dependum.value_or("");
        const Element* e = g.find_element(d);
        if (e != nullptr && inline_dependums.contains(d) && declared.insert(d).second) {
          out << quote(e->name) << ": " << to_string(e->kind);
        } else {
          out << "@" << d;
        }
        out << ")--> " << names.element(l.target) << "\n";
        break;
      }
    }
  }

  if (m.net) {
    const PetriNet& net = *m.net;
    out << "\nnet {\n";
    for (const auto& p : net.places()) {
      out << "  place " << p.id << " " << quote(p.label);
      if (p.kind) out << " as " << to_string(*p.kind);
      out << "\n";
    }
    for (const auto& t : net.transitions()) {
      out << "  trans " << t.id;
      if (!t.label.empty()) out << " " << quote(t.label);
      out << "\n";
    }
    for (const auto& a : net.arcs()) {
      out << "  arc " << a.from << " -> " << a.to;
      if (a.weight != 1) out << " weight " << a.weight;
      out << "\n";
    }
    out << "  marking {";
    bool first = true;
    for (std::size_t i = 0; i < m.initial_marking.size(); ++i) {
      if (m.initial_marking[i] == 0) continue;
      out << (first ? " " : ", ") << net.places()[i].id << ": " << m.initial_marking[i];
      first = false;
    }
    out << (first ? "}\n" : " }\n");
    if (m.round_transition) out << "  loop " << *m.round_transition << "\n";
    for (const auto& s : m.scripts) {
      out << "  script " << s.name << " [";
      for (std::size_t i = 0; i < s.steps.size(); ++i) out << (i ? ", " : "") << s.steps[i];
      out << "]\n";
    }
    if (!m.default_run.empty()) {
      out << "  run [";
      for (std::size_t i = 0; i < m.default_run.size(); ++i) out << (i ? ", " : "") << m.default_run[i];
      out << "]\n";
    }
    out << "}\n";
  }

  if (!m.binding.entries.empty() || m.binding.trigger) out << "\n";
  for (const auto& b : m.binding.entries) {
    out << "bind " << b.place << " => "
        << (b.asserted_kind ? to_string(*b.asserted_kind) : std::string_view("element")) << " "
        << names.element(b.element);
    if (b.polarity != Polarity::help) out << " polarity " << to_string(b.polarity);
    out << "\n";
  }
  if (m.binding.trigger) out << "trigger element " << names.element(*m.binding.trigger) << "\n";

  if (!m.baseline.empty()) {
    out << "\nbaseline ";
    label_block(out, m.baseline, names);
  }
  for (const auto& s : m.scenarios) {
    out << "\nscenario " << quote(s.name) << (s.extends_baseline ? " extends baseline " : " ");
    label_block(out, s.labels, names);
  }
  if (!m.judgments.empty()) out << "\n";
  for (const auto& j : m.judgments.entries()) out << judgment_line(j, names) << "\n";

  return {out.str(), "<memory>"};
}

}  // namespace gorenet
