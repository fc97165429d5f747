#include "gorenet/goal_model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gorenet/error.hpp"

namespace gorenet {

std::string_view to_string(ActorKind kind) {
  switch (kind) {
    case ActorKind::actor: return "actor";
    case ActorKind::agent: return "agent";
    case ActorKind::role: return "role";
    case ActorKind::position: return "position";
  }
  return "?";
}

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::goal: return "goal";
    case ElementKind::softgoal: return "softgoal";
    case ElementKind::task: return "task";
    case ElementKind::resource: return "resource";
  }
  return "?";
}

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::decomposition: return "decomposition";
    case LinkKind::means_end: return "meansEnd";
    case LinkKind::contribution: return "contribution";
    case LinkKind::dependency: return "dependency";
  }
  return "?";
}

std::optional<ActorKind> parse_actor_kind(std::string_view text) {
  for (auto k : {ActorKind::actor, ActorKind::agent, ActorKind::role, ActorKind::position}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<ElementKind> parse_element_kind(std::string_view text) {
  for (auto k : {ElementKind::goal, ElementKind::softgoal, ElementKind::task,
                 ElementKind::resource}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<LinkKind> parse_link_kind(std::string_view text) {
  for (auto k : {LinkKind::decomposition, LinkKind::means_end, LinkKind::contribution,
                 LinkKind::dependency}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  auto it = std::lower_bound(items.begin(), items.end(), id,
                             [](const T& item, std::string_view key) { return item.id < key; });
  if (it != items.end() && it->id == id) return &*it;
  // Not sorted yet (builder phase): fall back to a scan.
  for (const auto& item : items) {
    if (item.id == id) return &item;
  }
  return nullptr;
}

}  // namespace

const Actor* GoalModel::find_actor(std::string_view id) const { return find_by_id(actors, id); }

const Element* GoalModel::find_element(std::string_view id) const {
  return find_by_id(elements, id);
}

const Element* GoalModel::find_element_by_name(std::string_view name) const {
  for (const auto& e : elements) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

bool ValidationReport::has_errors() const {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::error; });
}

void ValidationReport::add(std::string subject, std::string rule, std::string message,
                           Severity severity) {
  violations.push_back({std::move(subject), std::move(rule), std::move(message), severity});
}

void ValidationReport::sort() {
  std::stable_sort(violations.begin(), violations.end(), [](const Violation& a, const Violation& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.rule < b.rule;
  });
}

bool is_leaf(const GoalModel& model, std::string_view id) {
  return std::none_of(model.links.begin(), model.links.end(), [&](const Link& l) {
    return l.source == id &&
           (l.kind == LinkKind::decomposition || l.kind == LinkKind::means_end);
  });
}

ValidationReport validate(const GoalModel& model) {
  ValidationReport report;

  std::map<std::string, int> id_count;
  for (const auto& a : model.actors) ++id_count[a.id];
  for (const auto& e : model.elements) ++id_count[e.id];
  for (const auto& [id, n] : id_count) {
    if (n > 1) report.add(id, "duplicate-id", "id '" + id + "' is declared " + std::to_string(n) + " times");
  }

  for (const auto& a : model.actors) {
    for (const auto& r : a.plays) {
      const Actor* role = model.find_actor(r);
      if (role == nullptr) {
        report.add(a.id, "unknown-actor", "plays unknown actor '" + r + "'");
      } else if (a.kind != ActorKind::agent || role->kind != ActorKind::role) {
        report.add(a.id, "plays-agent-to-role", "plays edges must go from an agent to a role");
      }
    }
  }

  std::set<std::string> dependums;
  for (const auto& l : model.links) {
    if (l.kind == LinkKind::dependency && l.dependum) dependums.insert(*l.dependum);
  }

  for (const auto& e : model.elements) {
    if (e.owner) {
      if (model.find_actor(*e.owner) == nullptr) {
        report.add(e.id, "unknown-actor", "owner '" + *e.owner + "' is not an actor");
      }
    } else if (!dependums.contains(e.id)) {
      report.add(e.id, "owner-required", "only dependum elements may sit outside an actor boundary");
    }
    if (e.decision && !is_leaf(model, e.id)) {
      report.add(e.id, "decision-not-leaf", "decision points must not be refined further");
    }
  }

  std::map<std::string, int> link_ids;
  for (const auto& l : model.links) ++link_ids[l.id];

  std::map<std::string, std::set<LinkKind>> refinements;
  for (const auto& l : model.links) {
    if (link_ids[l.id] > 1) {
      report.add(l.id, "duplicate-id", "link id is declared more than once");
      link_ids[l.id] = 0;  // report once
    }
    const Element* src = model.find_element(l.source);
    const Element* dst = model.find_element(l.target);
    if (src == nullptr || dst == nullptr) {
      report.add(l.id, "dangling-link", "link endpoint does not resolve to an element");
      continue;
    }
    switch (l.kind) {
      case LinkKind::contribution:
        if (dst->kind != ElementKind::softgoal) {
          report.add(l.id, "contribution-target-softgoal", "contributions must target a softgoal");
        }
        if (!l.polarity) {
          report.add(l.id, "contribution-polarity", "contribution without polarity");
        } else if (*l.polarity == Polarity::make || *l.polarity == Polarity::brk) {
          report.add(l.id, "unsupported-contribution",
                     std::string(to_string(*l.polarity)) + " links are parsed but not evaluated; use help or hurt");
        }
        break;
      case LinkKind::decomposition:
      case LinkKind::means_end:
        if (src->owner != dst->owner || !src->owner) {
          report.add(l.id, "refinement-cross-boundary",
                     "refinement links must stay inside one actor boundary");
        }
        refinements[l.source].insert(l.kind);
        break;
      case LinkKind::dependency: {
        const Element* dum = l.dependum ? model.find_element(*l.dependum) : nullptr;
        if (dum == nullptr) {
          report.add(l.id, "dangling-link", "dependum does not resolve to an element");
        } else if (l.source == l.target || l.source == dum->id || l.target == dum->id) {
          report.add(l.id, "dependency-distinct", "depender, dependum and dependee must differ");
        }
        break;
      }
    }
    if (l.kind != LinkKind::contribution && l.polarity) {
      report.add(l.id, "contribution-polarity", "polarity is only meaningful on contributions");
    }
    if (l.kind != LinkKind::dependency && l.dependum) {
      report.add(l.id, "dangling-link", "dependum is only meaningful on dependencies");
    }
  }
  for (const auto& [id, kinds] : refinements) {
    if (kinds.size() > 1) {
      report.add(id, "mixed-refinement", "element is both AND-decomposed and refined by means-ends");
    }
  }

  report.sort();
  return report;
}

Neighborhood element_neighborhood(const GoalModel& model, std::string_view id) {
  if (model.find_element(id) == nullptr) {
    throw Error("unknown-id", "no element with id '" + std::string(id) + "'");
  }
  Neighborhood n;
  for (const auto& l : model.links) {
    if (l.target == id) n.incoming.push_back(l);
    if (l.source == id) n.outgoing.push_back(l);
  }
  return n;
}

std::vector<std::string> decision_points(const GoalModel& model) {
  std::vector<std::string> ids;
  for (const auto& e : model.elements) {
    if (e.decision && is_leaf(model, e.id)) ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string slugify(std::string_view name) {
  std::string out;
  bool dash = false;
  for (unsigned char c : name) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      if (dash && !out.empty()) out += '-';
      dash = false;
      out += static_cast<char>(c);
    } else if (c >= 'A' && c <= 'Z') {
      if (dash && !out.empty()) out += '-';
      dash = false;
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      dash = true;
    }
  }
  return out;
}

std::string link_id(LinkKind kind, std::string_view source, std::string_view target,
                    std::optional<Polarity> polarity, std::optional<std::string_view> dependum) {
  std::string prefix;
  switch (kind) {
    case LinkKind::decomposition: prefix = "and"; break;
    case LinkKind::means_end: prefix = "me"; break;
    case LinkKind::contribution: prefix = polarity ? std::string(to_string(*polarity)) : "contrib"; break;
    case LinkKind::dependency: prefix = "dep"; break;
  }
  std::string id = prefix + ":" + std::string(source) + ":";
  if (dependum) id += std::string(*dependum) + ":";
  id += target;
  return id;
}

void sort_model(GoalModel& model) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::stable_sort(model.actors.begin(), model.actors.end(), by_id);
  std::stable_sort(model.elements.begin(), model.elements.end(), by_id);
  std::stable_sort(model.links.begin(), model.links.end(), by_id);
  for (auto& a : model.actors) std::sort(a.plays.begin(), a.plays.end());
}

std::string GoalModelBuilder::actor(std::string name, ActorKind kind, std::optional<std::string> id) {
  Actor a{id.value_or(slugify(name)), std::move(name), kind, {}};
  model_.actors.push_back(a);
  return a.id;
}

void GoalModelBuilder::plays(const std::string& agent_id, const std::string& role_id) {
  for (auto& a : model_.actors) {
    if (a.id == agent_id) {
      a.plays.push_back(role_id);
      return;
    }
  }
  throw Error("unknown-id", "no actor with id '" + agent_id + "'");
}

std::string GoalModelBuilder::element(std::string name, ElementKind kind,
                                      std::optional<std::string> owner, bool decision,
                                      std::optional<std::string> id) {
  Element e{id.value_or(slugify(name)), std::move(name), kind, std::move(owner), decision};
  model_.elements.push_back(e);
  return e.id;
}

std::string GoalModelBuilder::decompose(const std::string& parent, const std::string& child) {
  Link l{link_id(LinkKind::decomposition, parent, child), LinkKind::decomposition, parent, child, {}, {}};
  model_.links.push_back(l);
  return l.id;
}

std::string GoalModelBuilder::means_end(const std::string& end, const std::string& means) {
  Link l{link_id(LinkKind::means_end, end, means), LinkKind::means_end, end, means, {}, {}};
  model_.links.push_back(l);
  return l.id;
}

std::string GoalModelBuilder::contribute(const std::string& source, const std::string& softgoal,
                                         Polarity polarity) {
  Link l{link_id(LinkKind::contribution, source, softgoal, polarity), LinkKind::contribution,
         source, softgoal, polarity, {}};
  model_.links.push_back(l);
  return l.id;
}

std::string GoalModelBuilder::depend(const std::string& depender, const std::string& dependum,
                                     const std::string& dependee) {
  Link l{link_id(LinkKind::dependency, depender, dependee, std::nullopt, dependum),
         LinkKind::dependency, depender, dependee, {}, dependum};
  model_.links.push_back(l);
  return l.id;
}

GoalModel GoalModelBuilder::build() && {
  sort_model(model_);
  return std::move(model_);
}

}  // namespace gorenet
