#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gorenet/goal_model.hpp"

namespace gorenet {

/// i* symbol a place may be declared to stand for, independent of any
/// binding. `agent` has no intentional-element counterpart.
enum class PlaceKind : std::uint8_t { goal, softgoal, task, resource, agent };

std::string_view to_string(PlaceKind kind);
std::optional<PlaceKind> parse_place_kind(std::string_view text);

struct Place {
  std::string id;
  std::string label;
  std::optional<PlaceKind> kind;

  bool operator==(const Place&) const = default;
};

struct Transition {
  std::string id;
  std::string label;

  bool operator==(const Transition&) const = default;
};

struct Arc {
  std::string from;
  std::string to;
  std::uint32_t weight = 1;

  bool operator==(const Arc&) const = default;
};

/// Token vector indexed by place order.
struct Marking {
  std::vector<std::uint64_t> tokens;

  std::size_t size() const { return tokens.size(); }
  std::uint64_t operator[](std::size_t i) const { return tokens[i]; }
  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking&) const = default;
};

std::string format_marking(const Marking& m);  // "<1,0,0>"

using FiringScript = std::vector<std::string>;

/// Reports structural problems: unknown endpoints, place-place or
/// transition-transition arcs, duplicate arcs, zero weights, duplicate ids.
ValidationReport validate_net(const std::vector<Place>& places,
                              const std::vector<Transition>& transitions,
                              const std::vector<Arc>& arcs);

/// Immutable place/transition net. Construction validates and throws
/// "invalid-net" with the first violation.
class PetriNet {
 public:
  PetriNet(std::vector<Place> places, std::vector<Transition> transitions, std::vector<Arc> arcs);

  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  std::optional<std::size_t> place_index(std::string_view id) const;
  std::optional<std::size_t> transition_index(std::string_view id) const;

  /// w(p,t) for every place, indexed by place.
  const std::vector<std::uint32_t>& input_weights(std::size_t t) const { return pre_[t]; }
  /// w(t,p) for every place, indexed by place.
  const std::vector<std::uint32_t>& output_weights(std::size_t t) const { return post_[t]; }

  Marking empty_marking() const { return Marking{std::vector<std::uint64_t>(places_.size(), 0)}; }

  bool operator==(const PetriNet& other) const {
    return places_ == other.places_ && transitions_ == other.transitions_ && arcs_ == other.arcs_;
  }

 private:
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::uint32_t>> pre_;
  std::vector<std::vector<std::uint32_t>> post_;
};

/// Enabled transition ids in net order. Throws "dimension-mismatch".
std::vector<std::string> enabled(const PetriNet& net, const Marking& m);
bool is_enabled(const PetriNet& net, const Marking& m, std::size_t t);

/// Fires `transition`; throws "not-enabled" naming the first deficient
/// place, "unknown-transition", or "dimension-mismatch".
Marking fire(const PetriNet& net, const Marking& m, std::string_view transition);
Marking fire(const PetriNet& net, const Marking& m, std::size_t t);

struct StepError {
  std::size_t step = 0;
  std::string transition;
  std::string message;

  bool operator==(const StepError&) const = default;
};

struct RunResult {
  std::vector<Marking> trace;  // trace[0] is the initial marking
  std::optional<StepError> error;

  bool ok() const { return !error.has_value(); }
};

/// Fires the script step by step, stopping at the first disabled step.
RunResult run(const PetriNet& net, const Marking& m0, const FiringScript& script);

struct Reachability {
  std::vector<Marking> states;  // discovery order, states[0] == m0
  bool truncated = false;
};

/// Breadth-first closure over enabled transitions in net order. Stops with
/// truncated=true when a new state is found after `bound` states are known.
Reachability reachable(const PetriNet& net, const Marking& m0, std::size_t bound);

}  // namespace gorenet
