#include "gorenet/petri.hpp"

#include <deque>
#include <map>
#include <set>
#include <unordered_set>

#include "gorenet/error.hpp"

namespace gorenet {

std::string_view to_string(PlaceKind kind) {
  switch (kind) {
    case PlaceKind::goal: return "goal";
    case PlaceKind::softgoal: return "softgoal";
    case PlaceKind::task: return "task";
    case PlaceKind::resource: return "resource";
    case PlaceKind::agent: return "agent";
  }
  return "?";
}

std::optional<PlaceKind> parse_place_kind(std::string_view text) {
  for (auto k : {PlaceKind::goal, PlaceKind::softgoal, PlaceKind::task, PlaceKind::resource,
                 PlaceKind::agent}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string format_marking(const Marking& m) {
  std::string out = "<";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(m[i]);
  }
  out += '>';
  return out;
}

ValidationReport validate_net(const std::vector<Place>& places,
                              const std::vector<Transition>& transitions,
                              const std::vector<Arc>& arcs) {
  ValidationReport report;
  std::set<std::string> place_ids, transition_ids;
  for (const auto& p : places) {
    if (!place_ids.insert(p.id).second) report.add(p.id, "duplicate-id", "place declared twice");
  }
  for (const auto& t : transitions) {
    if (place_ids.contains(t.id) || !transition_ids.insert(t.id).second) {
      report.add(t.id, "duplicate-id", "transition id already in use");
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : arcs) {
    const std::string subject = a.from + "->" + a.to;
    const bool from_place = place_ids.contains(a.from);
    const bool to_place = place_ids.contains(a.to);
    const bool from_trans = transition_ids.contains(a.from);
    const bool to_trans = transition_ids.contains(a.to);
    if (!(from_place || from_trans)) {
      report.add(subject, "unknown-node", "arc source '" + a.from + "' is not a place or transition");
    } else if (!(to_place || to_trans)) {
      report.add(subject, "unknown-node", "arc target '" + a.to + "' is not a place or transition");
    } else if (from_place == to_place) {
      report.add(subject, "arc-bipartite", "arcs must connect a place and a transition");
    }
    if (a.weight < 1) report.add(subject, "arc-weight", "arc weights must be at least 1");
    if (!seen.insert({a.from, a.to}).second) {
      report.add(subject, "duplicate-arc", "arc declared twice");
    }
  }
  report.sort();
  return report;
}

PetriNet::PetriNet(std::vector<Place> places, std::vector<Transition> transitions, std::vector<Arc> arcs)
    : places_(std::move(places)), transitions_(std::move(transitions)), arcs_(std::move(arcs)) {
  auto report = validate_net(places_, transitions_, arcs_);
  if (report.has_errors()) {
    const auto& v = report.violations.front();
    throw Error("invalid-net", v.rule + " (" + v.subject + "): " + v.message);
  }
  pre_.assign(transitions_.size(), std::vector<std::uint32_t>(places_.size(), 0));
  post_.assign(transitions_.size(), std::vector<std::uint32_t>(places_.size(), 0));
  for (const auto& a : arcs_) {
    if (auto p = place_index(a.from)) {
      pre_[*transition_index(a.to)][*p] = a.weight;
    } else {
      post_[*transition_index(a.from)][*place_index(a.to)] = a.weight;
    }
  }
}

std::optional<std::size_t> PetriNet::place_index(std::string_view id) const {
  for (std::size_t i = 0; i < places_.size(); ++i) {
    if (places_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> PetriNet::transition_index(std::string_view id) const {
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (transitions_[i].id == id) return i;
  }
  return std::nullopt;
}

namespace {

void check_dimension(const PetriNet& net, const Marking& m) {
  if (m.size() != net.places().size()) {
    throw Error("dimension-mismatch", "marking has " + std::to_string(m.size()) +
                                          " entries but the net has " +
                                          std::to_string(net.places().size()) + " places");
  }
}

std::size_t require_transition(const PetriNet& net, std::string_view id) {
  auto t = net.transition_index(id);
  if (!t) throw Error("unknown-transition", "no transition '" + std::string(id) + "'");
  return *t;
}

}  // namespace

bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t) {
  const auto& pre = net.input_weights(t);
  for (std::size_t p = 0; p < pre.size(); ++p) {
    if (m[p] < pre[p]) return false;
  }
  return true;
}

std::vector<std::string> enabled(const PetriNet& net, const Marking& m) {
  check_dimension(net, m);
  std::vector<std::string> out;
  for (std::size_t t = 0; t < net.transitions().size(); ++t) {
    if (is_enabled(net, m, t)) out.push_back(net.transitions()[t].id);
  }
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, std::size_t t) {
  check_dimension(net, m);
  const auto& pre = net.input_weights(t);
  const auto& post = net.output_weights(t);
  for (std::size_t p = 0; p < pre.size(); ++p) {
    if (m[p] < pre[p]) {
      throw Error("not-enabled", "transition " + net.transitions()[t].id + " needs " +
                                     std::to_string(pre[p]) + " token(s) in " +
                                     net.places()[p].id + " but it holds " +
                                     std::to_string(m[p]));
    }
  }
  Marking next = m;
  for (std::size_t p = 0; p < pre.size(); ++p) {
    next.tokens[p] = next.tokens[p] - pre[p] + post[p];
  }
  return next;
}

Marking fire(const PetriNet& net, const Marking& m, std::string_view transition) {
  return fire(net, m, require_transition(net, transition));
}

RunResult run(const PetriNet& net, const Marking& m0, const FiringScript& script) {
  check_dimension(net, m0);
  RunResult result;
  result.trace.push_back(m0);
  for (std::size_t k = 0; k < script.size(); ++k) {
    try {
      result.trace.push_back(fire(net, result.trace.back(), script[k]));
    } catch (const Error& e) {
      result.error = StepError{k, script[k], "not-enabled-at-step " + std::to_string(k) + ": " + e.what()};
      break;
    }
  }
  return result;
}

namespace {

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto v : m.tokens) {
      h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

Reachability reachable(const PetriNet& net, const Marking& m0, std::size_t bound) {
  check_dimension(net, m0);
  if (bound < 1) throw Error("invalid-bound", "reachability bound must be at least 1");
  Reachability r;
  std::unordered_set<Marking, MarkingHash> seen{m0};
  r.states.push_back(m0);
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const Marking current = r.states[frontier.front()];
    frontier.pop_front();
    for (std::size_t t = 0; t < net.transitions().size(); ++t) {
      if (!is_enabled(net, current, t)) continue;
      Marking next = fire(net, current, t);
      if (seen.contains(next)) continue;
      if (r.states.size() >= bound) {
        r.truncated = true;
        return r;
      }
      seen.insert(next);
      r.states.push_back(std::move(next));
      frontier.push_back(r.states.size() - 1);
    }
  }
  return r;
}

}  // namespace gorenet
