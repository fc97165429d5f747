#include "gorenet/layering.hpp"

#include <algorithm>
#include <map>

#include "gorenet/error.hpp"

namespace gorenet {

const BindingEntry* LayerBinding::for_place(std::string_view place) const {
  for (const auto& e : entries) {
    if (e.place == place) return &e;
  }
  return nullptr;
}

const BindingEntry* LayerBinding::for_element(std::string_view element) const {
  for (const auto& e : entries) {
    if (e.element == element) return &e;
  }
  return nullptr;
}

std::string_view to_string(HybridStatus status) {
  switch (status) {
    case HybridStatus::rounds_exhausted: return "rounds-exhausted";
    case HybridStatus::script_exhausted: return "script-exhausted";
    case HybridStatus::failed: return "failed";
  }
  return "?";
}

std::string_view to_string(TriggerState state) {
  return state == TriggerState::dynamics_active ? "dynamicsActive" : "baseOnly";
}

namespace {

std::optional<PlaceKind> as_place_kind(ElementKind kind) {
  switch (kind) {
    case ElementKind::goal: return PlaceKind::goal;
    case ElementKind::softgoal: return PlaceKind::softgoal;
    case ElementKind::task: return PlaceKind::task;
    case ElementKind::resource: return PlaceKind::resource;
  }
  return std::nullopt;
}

}  // namespace

ValidationReport bind_and_check(const GoalModel& model, const PetriNet& net, const LayerBinding& binding) {
  ValidationReport report;
  std::map<std::string, std::vector<std::string>> places_per_element;
  std::map<std::string, int> entries_per_place;

  for (const auto& b : binding.entries) {
    ++entries_per_place[b.place];
    auto p = net.place_index(b.place);
    const Element* e = model.find_element(b.element);
    if (!p) {
      report.add(b.place, "dangling-binding", "bound place does not exist");
      continue;
    }
    if (e == nullptr) {
      report.add(b.place, "dangling-binding", "bound element '" + b.element + "' does not exist");
      continue;
    }
    places_per_element[e->id].push_back(b.place);
    if (b.asserted_kind && *b.asserted_kind != e->kind) {
      report.add(b.place, "kind-mismatch",
                 "binding expects a " + std::string(to_string(*b.asserted_kind)) + " but '" +
                     e->name + "' is a " + std::string(to_string(e->kind)));
    }
    const auto& declared = net.places()[*p].kind;
    if (declared && declared != as_place_kind(e->kind)) {
      report.add(b.place, "kind-mismatch",
                 "place is declared as " + std::string(to_string(*declared)) + " but binds a " +
                     std::string(to_string(e->kind)));
    }
    if (b.polarity != Polarity::help && b.polarity != Polarity::hurt) {
      report.add(b.place, "binding-polarity", "binding polarity must be help or hurt");
    } else if (b.polarity == Polarity::hurt && e->kind != ElementKind::softgoal) {
      report.add(b.place, "binding-polarity", "only softgoal bindings carry a polarity");
    }
  }
  for (const auto& [place, n] : entries_per_place) {
    if (n > 1) report.add(place, "non-injective", "place is bound more than once");
  }
  for (const auto& [element, places] : places_per_element) {
    if (places.size() > 1) {
      for (const auto& p : places) {
        report.add(p, "non-injective", "element '" + element + "' is bound to several places");
      }
    }
  }

  if (binding.trigger) {
    if (model.find_element(*binding.trigger) == nullptr) {
      report.add(*binding.trigger, "dangling-trigger", "trigger element does not exist");
    } else if (binding.for_element(*binding.trigger) == nullptr) {
      report.add(*binding.trigger, "trigger-unreachable",
                 "no place is bound to the trigger, so the dynamics layer never activates",
                 Severity::warning);
    }
  } else if (binding.entries.empty()) {
    report.add("trigger", "trigger-unreachable", "no bindings and no trigger declared",
               Severity::warning);
  }
  report.sort();
  return report;
}

HybridStepper::HybridStepper(const GoalModel& model, const PetriNet& net, const LayerBinding& binding,
                             Marking m0, std::optional<std::string> round_transition)
    : net_(net) {
  if (m0.size() != net.places().size()) {
    throw Error("dimension-mismatch", "initial marking does not match the net");
  }
  if (round_transition) {
    round_transition_ = net.transition_index(*round_transition);
    if (!round_transition_) {
      throw Error("unknown-transition", "round transition '" + *round_transition + "' is not in the net");
    }
  }
  for (const auto& b : binding.entries) {
    const Element* e = model.find_element(b.element);
    auto p = net.place_index(b.place);
    if (e == nullptr || !p) continue;
    if (e->kind == ElementKind::softgoal) {
      observed_[*p] = {e->id, b.polarity};
      trace_.tallies[e->id];
    }
    if (binding.trigger && *binding.trigger == e->id) trace_.trigger_place = *p;
  }
  trace_.markings.push_back(std::move(m0));
}

std::vector<ContributionEvent> HybridStepper::step(std::string_view transition) {
  auto t = net_.transition_index(transition);
  if (!t) throw Error("unknown-transition", "no transition '" + std::string(transition) + "'");
  Marking next = fire(net_, marking(), *t);

  std::vector<ContributionEvent> events;
  const auto& post = net_.output_weights(*t);
  const std::size_t step_index = trace_.fired.size();
  for (const auto& [place, target] : observed_) {
    for (std::uint32_t k = 0; k < post[place]; ++k) {
      events.push_back({trace_.rounds_completed, step_index, target.first, target.second,
                        net_.places()[place].id});
      auto& tally = trace_.tallies[target.first];
      (target.second == Polarity::hurt ? tally.hurt : tally.help) += 1;
    }
  }
  trace_.markings.push_back(std::move(next));
  trace_.fired.emplace_back(transition);
  trace_.events.insert(trace_.events.end(), events.begin(), events.end());
  if (round_transition_ && *round_transition_ == *t) ++trace_.rounds_completed;
  return events;
}

HybridTrace hybrid_simulate(const GoalModel& model, const PetriNet& net, const LayerBinding& binding,
                            const Marking& m0, const HybridOptions& options) {
  auto report = bind_and_check(model, net, binding);
  if (report.has_errors()) {
    const auto& v = report.violations.front();
    throw Error("invalid-binding", v.rule + " (" + v.subject + "): " + v.message);
  }
  HybridStepper stepper(model, net, binding, m0, options.round_transition);
  auto& trace = stepper.trace();

  if (options.rounds == 0) {
    trace.status = HybridStatus::rounds_exhausted;
    return std::move(trace);
  }
  auto fire_script = [&](const FiringScript& script) {
    for (const auto& tid : script) {
      try {
        stepper.step(tid);
      } catch (const Error& e) {
        trace.status = HybridStatus::failed;
        trace.error = StepError{trace.fired.size(), tid,
                                "not-enabled-at-step " + std::to_string(trace.fired.size()) + ": " + e.what()};
        return false;
      }
      if (options.round_transition && trace.rounds_completed >= options.rounds) {
        trace.status = HybridStatus::rounds_exhausted;
        return false;
      }
    }
    return true;
  };

  trace.status = HybridStatus::script_exhausted;
  if (!options.round_transition) {
    for (const auto& script : options.scripts) {
      if (!fire_script(script)) break;
    }
    return std::move(trace);
  }
  for (std::size_t round = 0; !options.scripts.empty(); ++round) {
    const std::size_t before = trace.rounds_completed;
    if (!fire_script(options.scripts[std::min(round, options.scripts.size() - 1)])) break;
    // A replayed script that never closes a round would loop forever.
    if (trace.rounds_completed == before) break;
  }
  return std::move(trace);
}

TriggerState trigger_state(const HybridTrace& trace) {
  if (!trace.trigger_place) return TriggerState::base_only;
  for (const auto& m : trace.markings) {
    if (m[*trace.trigger_place] > 0) return TriggerState::dynamics_active;
  }
  return TriggerState::base_only;
}

}  // namespace gorenet
