#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "gorenet/dsl.hpp"

namespace gorenet {

using Json = nlohmann::ordered_json;

enum class DotLayer : std::uint8_t { goal, net, hybrid };

std::optional<DotLayer> parse_dot_layer(std::string_view text);

/// Model interchange document (see schema/model.v1.json). Optional parts
/// (trigger, baseline, scenarios, judgments) appear only when present.
Json model_to_json(const TwoLayerModel& model);
/// Compact rendering of model_to_json.
std::string export_json(const TwoLayerModel& model);

/// Graphviz text for one layer. The hybrid layer draws each place with the
/// i* shape of its bound element (or of its declared kind) and throws
/// "no-bindings" when the model binds nothing; the net layer needs a net
/// ("no-net").
std::string export_dot(const TwoLayerModel& model, DotLayer layer);

Json report_to_json(const ValidationReport& report);
Json diagnostics_to_json(const std::vector<ParseDiagnostic>& diagnostics, std::string_view origin);
Json judgment_point_to_json(const JudgmentPoint& point, const GoalModel& model);
/// Trace document (see schema/trace.v1.json).
Json trace_to_json(const HybridTrace& trace, const TwoLayerModel& model);
/// Evaluation document (see schema/evaluation.v1.json).
Json evaluation_to_json(const EvaluationResult& result, const GoalModel& model);
Json backward_to_json(const BackwardResult& result, const GoalModel& model, std::string_view target,
                      QualLabel desired);

}  // namespace gorenet
