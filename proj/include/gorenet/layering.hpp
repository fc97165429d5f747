#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gorenet/goal_model.hpp"
#include "gorenet/petri.hpp"

namespace gorenet {

struct BindingEntry {
  std::string place;
  std::string element;
  Polarity polarity = Polarity::help;
  /// Kind asserted at the binding site (`bind p => softgoal "X"`).
  std::optional<ElementKind> asserted_kind;

  bool operator==(const BindingEntry&) const = default;
};

struct LayerBinding {
  std::vector<BindingEntry> entries;
  std::optional<std::string> trigger;

  const BindingEntry* for_place(std::string_view place) const;
  const BindingEntry* for_element(std::string_view element) const;

  bool operator==(const LayerBinding&) const = default;
};

ValidationReport bind_and_check(const GoalModel& model, const PetriNet& net, const LayerBinding& binding);

struct ContributionEvent {
  std::size_t round = 0;  // rounds completed before the producing firing
  std::size_t step = 0;   // firing index within the whole trace
  std::string softgoal;
  Polarity polarity = Polarity::help;
  std::string source_place;

  bool operator==(const ContributionEvent&) const = default;
};

struct Tally {
  std::uint64_t help = 0;
  std::uint64_t hurt = 0;

  bool operator==(const Tally&) const = default;
};

enum class HybridStatus : std::uint8_t { rounds_exhausted, script_exhausted, failed };
enum class TriggerState : std::uint8_t { base_only, dynamics_active };

std::string_view to_string(HybridStatus status);
std::string_view to_string(TriggerState state);

struct HybridTrace {
  std::vector<Marking> markings;
  std::vector<std::string> fired;
  std::vector<ContributionEvent> events;
  std::map<std::string, Tally> tallies;  // every softgoal bound to a place
  std::size_t rounds_completed = 0;
  HybridStatus status = HybridStatus::script_exhausted;
  std::optional<StepError> error;
  std::optional<std::size_t> trigger_place;  // index of the trigger-bound place
};

struct HybridOptions {
  /// Script k drives round k; the last script is replayed for later rounds.
  std::vector<FiringScript> scripts;
  /// Transition whose firing completes a round. Without it every script
  /// runs once.
  std::optional<std::string> round_transition;
  std::size_t rounds = 1;
};

/// Steps a net one transition at a time while observing contribution
/// events on softgoal-bound places. Shared by batch simulation and the
/// service's interactive sessions.
class HybridStepper {
 public:
  HybridStepper(const GoalModel& model, const PetriNet& net, const LayerBinding& binding,
                Marking m0, std::optional<std::string> round_transition);

  /// Fires and returns the events it produced; throws like petri::fire.
  std::vector<ContributionEvent> step(std::string_view transition);

  const Marking& marking() const { return trace_.markings.back(); }
  const HybridTrace& trace() const { return trace_; }
  HybridTrace& trace() { return trace_; }

 private:
  const PetriNet& net_;
  std::optional<std::size_t> round_transition_;
  // place index -> (softgoal id, polarity)
  std::map<std::size_t, std::pair<std::string, Polarity>> observed_;
  HybridTrace trace_;
};

/// Throws "invalid-binding" when bind_and_check reports errors.
HybridTrace hybrid_simulate(const GoalModel& model, const PetriNet& net, const LayerBinding& binding,
                            const Marking& m0, const HybridOptions& options);

TriggerState trigger_state(const HybridTrace& trace);

}  // namespace gorenet
