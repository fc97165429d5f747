#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gorenet/label.hpp"

namespace gorenet {

enum class ActorKind : std::uint8_t { actor, agent, role, position };
enum class ElementKind : std::uint8_t { goal, softgoal, task, resource };

// Refinement links (decomposition, meansEnd) point from the refined element
// (parent / end) to its refinement (child / means). Contributions point from
// the contributor to the softgoal. Dependencies point from the depender to
// the dependee and name the dependum separately.
enum class LinkKind : std::uint8_t { decomposition, means_end, contribution, dependency };

std::string_view to_string(ActorKind kind);
std::string_view to_string(ElementKind kind);
std::string_view to_string(LinkKind kind);
std::optional<ActorKind> parse_actor_kind(std::string_view text);
std::optional<ElementKind> parse_element_kind(std::string_view text);
std::optional<LinkKind> parse_link_kind(std::string_view text);

struct Actor {
  std::string id;
  std::string name;
  ActorKind kind = ActorKind::actor;
  std::vector<std::string> plays;  // role ids, sorted

  bool operator==(const Actor&) const = default;
};

struct Element {
  std::string id;
  std::string name;
  ElementKind kind = ElementKind::goal;
  std::optional<std::string> owner;
  bool decision = false;

  bool operator==(const Element&) const = default;
};

struct Link {
  std::string id;
  LinkKind kind = LinkKind::decomposition;
  std::string source;
  std::string target;
  std::optional<Polarity> polarity;  // contribution only
  std::optional<std::string> dependum;  // dependency only

  bool operator==(const Link&) const = default;
};

/// Goal layer. Collections are kept sorted by id once built.
struct GoalModel {
  std::vector<Actor> actors;
  std::vector<Element> elements;
  std::vector<Link> links;

  const Actor* find_actor(std::string_view id) const;
  const Element* find_element(std::string_view id) const;
  const Element* find_element_by_name(std::string_view name) const;

  bool operator==(const GoalModel&) const = default;
};

enum class Severity : std::uint8_t { error, warning };

struct Violation {
  std::string subject;  // element, link, actor, place or binding id
  std::string rule;
  std::string message;
  Severity severity = Severity::error;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  bool has_errors() const;
  void add(std::string subject, std::string rule, std::string message,
           Severity severity = Severity::error);
  /// Orders violations by subject, then rule.
  void sort();

  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate(const GoalModel& model);

struct Neighborhood {
  std::vector<Link> incoming;
  std::vector<Link> outgoing;
};

/// Links whose target (incoming) or source (outgoing) is `id`, in model
/// order. Throws "unknown-id".
Neighborhood element_neighborhood(const GoalModel& model, std::string_view id);

/// Ids of decision-flagged leaf elements, sorted.
std::vector<std::string> decision_points(const GoalModel& model);

/// True when no refinement link leaves the element.
bool is_leaf(const GoalModel& model, std::string_view id);

/// Lowercase ASCII letters and digits, non-ASCII bytes kept, everything else
/// collapsed into single dashes.
std::string slugify(std::string_view name);

/// Single-owner construction phase for goal models. Ids default to slugs.
class GoalModelBuilder {
 public:
  std::string actor(std::string name, ActorKind kind = ActorKind::actor,
                    std::optional<std::string> id = std::nullopt);
  void plays(const std::string& agent_id, const std::string& role_id);
  std::string element(std::string name, ElementKind kind,
                      std::optional<std::string> owner,
                      bool decision = false,
                      std::optional<std::string> id = std::nullopt);
  std::string decompose(const std::string& parent, const std::string& child);
  std::string means_end(const std::string& end, const std::string& means);
  std::string contribute(const std::string& source, const std::string& softgoal,
                         Polarity polarity);
  std::string depend(const std::string& depender, const std::string& dependum,
                     const std::string& dependee);

  /// Sorts collections and hands the model over.
  GoalModel build() &&;
  const GoalModel& peek() const { return model_; }

 private:
  GoalModel model_;
};

/// Deterministic link id derived from the link's endpoints.
std::string link_id(LinkKind kind, std::string_view source, std::string_view target,
                    std::optional<Polarity> polarity = std::nullopt,
                    std::optional<std::string_view> dependum = std::nullopt);

void sort_model(GoalModel& model);

}  // namespace gorenet
