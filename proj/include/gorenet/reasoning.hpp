#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gorenet/goal_model.hpp"
#include "gorenet/label.hpp"

namespace gorenet {

using LabelMap = std::map<std::string, QualLabel>;

/// Initial labels for one what-if question. When `extends_baseline` is set
/// the model's baseline labels apply underneath `labels`.
struct Scenario {
  std::string name;
  bool extends_baseline = false;
  LabelMap labels;

  bool operator==(const Scenario&) const = default;
};

enum class Provenance : std::uint8_t { file, interactive };

std::string_view to_string(Provenance p);

/// A human judgment: for `element` receiving exactly the `given` multiset,
/// answer `label`. A non-empty `scenario` restricts the entry to that
/// scenario and takes precedence over unscoped entries.
struct Judgment {
  std::string element;
  std::vector<QualLabel> given;  // canonical order
  std::string scenario;
  QualLabel label = QualLabel::U;
  Provenance provenance = Provenance::file;

  bool operator==(const Judgment&) const = default;
};

class JudgmentTable {
 public:
  /// Inserts or replaces the entry with the same (element, given, scenario).
  void add(Judgment judgment);
  void merge(const JudgmentTable& other);
  const Judgment* lookup(std::string_view element, const std::vector<QualLabel>& given,
                         std::string_view scenario) const;

  const std::vector<Judgment>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const JudgmentTable&) const = default;

 private:
  std::vector<Judgment> entries_;
};

/// An element whose evidence cannot be combined automatically.
struct JudgmentPoint {
  std::string element;
  std::vector<QualLabel> given;
  std::string scenario;

  bool operator==(const JudgmentPoint&) const = default;
};

/// Synchronous request/answer contract. Returning nullopt leaves the point
/// pending.
using JudgmentResolver = std::function<std::optional<QualLabel>(const JudgmentPoint&)>;

struct AuditEntry {
  std::string element;
  QualLabel label = QualLabel::U;
  std::string rule;  // "initial", "derived" or "judgment"
  std::vector<QualLabel> evidence;  // canonical bag the rule consumed

  bool operator==(const AuditEntry&) const = default;
};

enum class EvaluationStatus : std::uint8_t { complete, unresolved_judgments };

struct EvaluationResult {
  std::string scenario;
  LabelMap labels;
  std::vector<std::string> unlabeled;  // sorted element ids
  std::vector<Judgment> judgments_used;
  std::vector<JudgmentPoint> pending;
  std::vector<AuditEntry> audit;  // evaluation order
  std::vector<std::string> warnings;
  EvaluationStatus status = EvaluationStatus::complete;

  std::optional<QualLabel> label(std::string_view id) const;
};

struct EvaluationOptions {
  const JudgmentResolver* resolver = nullptr;
  int max_sweeps = 100;
};

/// Forward propagation from the scenario's initial labels.
///
/// Evidence reaching an element:
///  - AND-decomposed hard children combine by minimum; softgoal children
///    of a decomposition enter the evidence bag unchanged;
///  - means-ends refinements combine by maximum;
///  - each dependum label joins the AND side (dependum <- dependee copies);
///  - each help/hurt contribution enters the bag through the mapping.
/// The bag is resolved by combine_evidence; anything it cannot resolve is
/// answered from `judgments` (scenario-scoped entries first), then from the
/// resolver, or left pending. Elements downstream of a pending point stay
/// unlabeled. Cycles are swept at most `max_sweeps` times; failure to
/// settle throws "non-convergent" naming the cycle.
EvaluationResult propagate_forward(const GoalModel& model, const Scenario& scenario,
                                   const LabelMap& baseline, const JudgmentTable& judgments,
                                   const EvaluationOptions& options = {});

struct BackwardResult {
  std::vector<Scenario> solutions;  // sorted by assignment
  std::vector<Scenario> skipped;    // target blocked by pending judgments
  std::vector<std::string> decision_points;
};

/// Exhaustive search over {S, D} assignments to the decision points, on top
/// of the baseline labels. Throws "too-many-decision-points" above 20 and
/// "no-decision-points" when there are none.
BackwardResult backward_search(const GoalModel& model, const LabelMap& baseline,
                               std::string_view target, QualLabel desired,
                               const JudgmentTable& judgments);

inline constexpr std::size_t kMaxDecisionPoints = 20;

}  // namespace gorenet
