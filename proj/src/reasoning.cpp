#include "gorenet/reasoning.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "gorenet/error.hpp"

namespace gorenet {

std::string_view to_string(Provenance p) {
  return p == Provenance::interactive ? "interactive" : "file";
}

void JudgmentTable::add(Judgment judgment) {
  judgment.given = canonical_multiset(std::move(judgment.given));
  for (auto& j : entries_) {
    if (j.element == judgment.element && j.given == judgment.given && j.scenario == judgment.scenario) {
      j = std::move(judgment);
      return;
    }
  }
  entries_.push_back(std::move(judgment));
}

void JudgmentTable::merge(const JudgmentTable& other) {
  for (const auto& j : other.entries_) add(j);
}

const Judgment* JudgmentTable::lookup(std::string_view element, const std::vector<QualLabel>& given,
                                      std::string_view scenario) const {
  const Judgment* unscoped = nullptr;
  for (const auto& j : entries_) {
    if (j.element != element || j.given != given) continue;
    if (!j.scenario.empty() && j.scenario == scenario) return &j;
    if (j.scenario.empty()) unscoped = &j;
  }
  return unscoped;
}

std::optional<QualLabel> EvaluationResult::label(std::string_view id) const {
  auto it = labels.find(std::string(id));
  if (it == labels.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Inputs {
  std::vector<std::string> hard_children;
  std::vector<std::string> quality_children;
  std::vector<std::string> means;
  std::vector<std::string> dependums;  // this element is the depender
  std::vector<std::string> dependees;  // this element is the dependum
  std::vector<std::pair<std::string, Polarity>> contributions;

  std::vector<std::string> sources() const {
    std::vector<std::string> all;
    for (const auto* v : {&hard_children, &quality_children, &means, &dependums, &dependees}) {
      all.insert(all.end(), v->begin(), v->end());
    }
    for (const auto& [s, _] : contributions) all.push_back(s);
    return all;
  }
};

class Propagator {
 public:
  Propagator(const GoalModel& model, const Scenario& scenario, const JudgmentTable& judgments,
             const EvaluationOptions& options)
      : model_(model), scenario_(scenario), judgments_(judgments), options_(options) {
    for (const auto& e : model.elements) inputs_[e.id];
    for (const auto& l : model.links) {
      switch (l.kind) {
        case LinkKind::decomposition: {
          const Element* child = model.find_element(l.target);
          if (child != nullptr && child->kind == ElementKind::softgoal) {
            inputs_[l.source].quality_children.push_back(l.target);
          } else {
            inputs_[l.source].hard_children.push_back(l.target);
          }
          break;
        }
        case LinkKind::means_end:
          inputs_[l.source].means.push_back(l.target);
          break;
        case LinkKind::contribution:
          inputs_[l.target].contributions.emplace_back(l.source, l.polarity.value_or(Polarity::help));
          break;
        case LinkKind::dependency:
          if (l.dependum) {
            inputs_[l.source].dependums.push_back(*l.dependum);
            inputs_[*l.dependum].dependees.push_back(l.target);
          }
          break;
      }
    }
  }

  EvaluationResult run(const LabelMap& initial) {
    result_.scenario = scenario_.name;
    for (const auto& [id, label] : initial) {
      labels_[id] = label;
      fixed_.insert(id);
      result_.audit.push_back({id, label, "initial", {}});
    }
    for (const auto& component : components()) evaluate_component(component);

    result_.labels = labels_;
    for (const auto& e : model_.elements) {
      if (!labels_.contains(e.id)) result_.unlabeled.push_back(e.id);
    }
    for (const auto& [id, point] : pending_) result_.pending.push_back(point);
    result_.status = result_.pending.empty() ? EvaluationStatus::complete
                                             : EvaluationStatus::unresolved_judgments;
    return std::move(result_);
  }

 private:
  // Strongly connected components of the evidence graph, sources first.
  std::vector<std::vector<std::string>> components() {
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> out;
    int counter = 0;

    std::map<std::string, std::vector<std::string>> successors;
    for (const auto& [id, in] : inputs_) {
      for (const auto& s : in.sources()) successors[s].push_back(id);
    }
    for (auto& [_, v] : successors) std::sort(v.begin(), v.end());

    std::function<void(const std::string&)> connect = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const auto& w : successors[v]) {
        if (!index.contains(w)) {
          connect(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.contains(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<std::string> component;
        std::string w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        out.push_back(std::move(component));
      }
    };
    for (const auto& [id, _] : inputs_) {
      if (!index.contains(id)) connect(id);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  bool self_loop(const std::string& id) {
    auto s = inputs_[id].sources();
    return std::find(s.begin(), s.end(), id) != s.end();
  }

  void evaluate_component(const std::vector<std::string>& component) {
    if (component.size() == 1 && !self_loop(component.front())) {
      evaluate(component.front());
      return;
    }
    for (int sweep = 0; sweep < options_.max_sweeps; ++sweep) {
      bool changed = false;
      for (const auto& id : component) changed = evaluate(id) || changed;
      if (!changed) return;
    }
    std::string names;
    for (const auto& id : component) names += (names.empty() ? "" : ", ") + id;
    throw Error("non-convergent", "labels did not settle after " +
                                      std::to_string(options_.max_sweeps) +
                                      " sweeps over the cycle: " + names);
  }

  std::optional<QualLabel> judge(const std::string& id, std::vector<QualLabel> given) {
    given = canonical_multiset(std::move(given));
    if (const Judgment* j = judgments_.lookup(id, given, scenario_.name)) {
      note_used(*j);
      return j->label;
    }
    JudgmentPoint point{id, given, scenario_.name};
    for (const auto& [p, label] : answered_) {
      if (p == point) return label;
    }
    if (options_.resolver != nullptr && *options_.resolver) {
      if (auto answer = (*options_.resolver)(point)) {
        answered_.emplace_back(point, *answer);
        note_used({id, given, scenario_.name, *answer, Provenance::interactive});
        return answer;
      }
    }
    pending_[id] = point;
    return std::nullopt;
  }

  void note_used(const Judgment& j) {
    if (std::find(result_.judgments_used.begin(), result_.judgments_used.end(), j) ==
        result_.judgments_used.end()) {
      result_.judgments_used.push_back(j);
    }
  }

  // Returns true when the element's label changed.
  bool evaluate(const std::string& id) {
    if (fixed_.contains(id)) return false;
    const auto before = labels_.find(id) == labels_.end() ? std::optional<QualLabel>{} : labels_[id];
    pending_.erase(id);
    blocked_.erase(id);

    const Inputs& in = inputs_[id];
    for (const auto& s : in.sources()) {
      if (blocked_.contains(s)) return block(id, before);
    }
    auto labelled = [&](const std::vector<std::string>& ids) {
      std::vector<QualLabel> out;
      for (const auto& s : ids) {
        if (auto it = labels_.find(s); it != labels_.end()) out.push_back(it->second);
      }
      return out;
    };

    bool used_judgment = false;
    std::vector<QualLabel> and_side = labelled(in.hard_children);
    for (auto l : labelled(in.dependums)) and_side.push_back(l);
    for (auto l : labelled(in.dependees)) and_side.push_back(l);

    if (auto or_side = labelled(in.means); !or_side.empty()) {
      auto c = label_max(or_side);
      if (c.needs_judgment()) {
        c.label = judge(id, or_side);
        if (!c.label) return block(id, before);
        used_judgment = true;
      }
      and_side.push_back(*c.label);
    }

    std::vector<QualLabel> bag;
    if (!and_side.empty()) {
      auto c = label_min(and_side);
      if (c.needs_judgment()) {
        c.label = judge(id, and_side);
        if (!c.label) return block(id, before);
        used_judgment = true;
      }
      bag.push_back(*c.label);
    }
    for (auto l : labelled(in.quality_children)) bag.push_back(l);
    for (const auto& [source, polarity] : in.contributions) {
      if (auto it = labels_.find(source); it != labels_.end()) {
        bag.push_back(apply_contribution(polarity, it->second));
      }
    }

    if (bag.empty()) {
      labels_.erase(id);
      return before.has_value();
    }
    auto c = combine_evidence(bag);
    if (c.needs_judgment()) {
      c.label = judge(id, bag);
      if (!c.label) return block(id, before);
      used_judgment = true;
    }
    labels_[id] = *c.label;
    result_.audit.push_back({id, *c.label, used_judgment ? "judgment" : "derived", canonical_multiset(bag)});
    return before != c.label;
  }

  bool block(const std::string& id, std::optional<QualLabel> before) {
    blocked_.insert(id);
    labels_.erase(id);
    return before.has_value();
  }

  const GoalModel& model_;
  const Scenario& scenario_;
  const JudgmentTable& judgments_;
  const EvaluationOptions& options_;
  std::map<std::string, Inputs> inputs_;
  LabelMap labels_;
  std::set<std::string> fixed_;
  std::set<std::string> blocked_;
  std::map<std::string, JudgmentPoint> pending_;
  std::vector<std::pair<JudgmentPoint, QualLabel>> answered_;
  EvaluationResult result_;
};

}  // namespace

EvaluationResult propagate_forward(const GoalModel& model, const Scenario& scenario,
                                   const LabelMap& baseline, const JudgmentTable& judgments,
                                   const EvaluationOptions& options) {
  LabelMap initial;
  if (scenario.extends_baseline) initial = baseline;
  std::vector<std::string> warnings;
  const auto decisions = decision_points(model);
  for (const auto& [id, label] : scenario.labels) {
    const Element* e = model.find_element(id);
    if (e == nullptr) throw Error("unknown-element", "scenario '" + scenario.name + "' labels unknown element '" + id + "'");
    if (!std::binary_search(decisions.begin(), decisions.end(), id)) {
      warnings.push_back("scenario '" + scenario.name + "' labels '" + e->name +
                         "', which is not a decision point");
    }
    initial[id] = label;
  }
  for (const auto& [id, _] : initial) {
    if (model.find_element(id) == nullptr) throw Error("unknown-element", "baseline labels unknown element '" + id + "'");
  }
  Propagator propagator(model, scenario, judgments, options);
  auto result = propagator.run(initial);
  result.warnings = std::move(warnings);
  return result;
}

BackwardResult backward_search(const GoalModel& model, const LabelMap& baseline,
                               std::string_view target, QualLabel desired,
                               const JudgmentTable& judgments) {
  if (model.find_element(target) == nullptr) {
    throw Error("unknown-element", "no element '" + std::string(target) + "'");
  }
  BackwardResult out;
  out.decision_points = decision_points(model);
  const std::size_t k = out.decision_points.size();
  if (k == 0) throw Error("no-decision-points", "the model has no decision points to search over");
  if (k > kMaxDecisionPoints) {
    throw Error("too-many-decision-points", std::to_string(k) + " decision points exceed the limit of " +
                                                std::to_string(kMaxDecisionPoints));
  }
  // Bit i set means decision point i is denied; D sorts before S, so
  // counting down from all-S... is reversed below by sorting.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    Scenario s;
    s.extends_baseline = true;
    std::string name = "backward";
    for (std::size_t i = 0; i < k; ++i) {
      const QualLabel l = (mask >> (k - 1 - i)) & 1 ? QualLabel::S : QualLabel::D;
      s.labels[out.decision_points[i]] = l;
      name += (i ? "," : ":") + out.decision_points[i] + "=" + std::string(to_string(l));
    }
    s.name = name;
    auto result = propagate_forward(model, s, baseline, judgments);
    auto label = result.label(target);
    if (!label) {
      if (!result.pending.empty()) out.skipped.push_back(std::move(s));
      continue;
    }
    if (*label == desired) out.solutions.push_back(std::move(s));
  }
  auto by_assignment = [&](const Scenario& a, const Scenario& b) {
    for (const auto& id : out.decision_points) {
      auto la = to_string(a.labels.at(id));
      auto lb = to_string(b.labels.at(id));
      if (la != lb) return la < lb;
    }
    return false;
  };
  std::sort(out.solutions.begin(), out.solutions.end(), by_assignment);
  std::sort(out.skipped.begin(), out.skipped.end(), by_assignment);
  return out;
}

}  // namespace gorenet
