#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gorenet/goal_model.hpp"
#include "gorenet/layering.hpp"
#include "gorenet/petri.hpp"
#include "gorenet/reasoning.hpp"

namespace gorenet {

struct NamedScript {
  std::string name;
  FiringScript steps;

  bool operator==(const NamedScript&) const = default;
};

/// Everything one `.gnet` document can describe.
struct TwoLayerModel {
  GoalModel goals;
  std::optional<PetriNet> net;
  Marking initial_marking;
  std::optional<std::string> round_transition;
  std::vector<NamedScript> scripts;
  /// Script names driving `simulate` when none are given: script k drives
  /// round k, the last one repeats.
  std::vector<std::string> default_run;
  LayerBinding binding;
  LabelMap baseline;
  std::vector<Scenario> scenarios;
  JudgmentTable judgments;

  const Scenario* find_scenario(std::string_view name) const;
  const NamedScript* find_script(std::string_view name) const;

  bool operator==(const TwoLayerModel&) const = default;
};

struct SourceDocument {
  std::string text;
  std::string origin = "<memory>";
};

/// 1-based line and column; column and length count bytes.
struct Span {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;

  bool operator==(const Span&) const = default;
};

struct ParseDiagnostic {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  Span span;

  bool operator==(const ParseDiagnostic&) const = default;
};

struct ParseResult {
  std::optional<TwoLayerModel> model;  // absent whenever an error was reported
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

ParseResult parse(const SourceDocument& doc);

/// Parses a document holding only `judgment` statements whose element
/// references resolve against `model`.
struct JudgmentParseResult {
  std::optional<JudgmentTable> table;
  std::vector<ParseDiagnostic> diagnostics;
};
JudgmentParseResult parse_judgments(const SourceDocument& doc, const GoalModel& model);

/// Canonical text: header comment, actors, free elements, links, net,
/// bindings, baseline, scenarios, judgments.
SourceDocument serialize(const TwoLayerModel& model);

/// One judgment statement, in the same syntax the parser reads.
std::string format_judgment(const Judgment& judgment, const GoalModel& model);

/// "origin:line:col: error: message [code]"
std::string format_diagnostic(const ParseDiagnostic& d, std::string_view origin);

/// Reads a file; throws Error("io", ...) when it cannot be read.
SourceDocument read_document(const std::filesystem::path& path);

}  // namespace gorenet
