#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gorenet {

/// Six-valued qualitative satisfaction label. The enumerator order is the
/// total order used by AND/OR evaluation: D < PD < U < C < PS < S.
enum class QualLabel : std::uint8_t { D, PD, U, C, PS, S };

inline constexpr QualLabel kAllLabels[] = {QualLabel::S,  QualLabel::PS,
                                           QualLabel::C,  QualLabel::U,
                                           QualLabel::PD, QualLabel::D};

std::string_view to_string(QualLabel label);
std::optional<QualLabel> parse_label(std::string_view text);

enum class Polarity : std::uint8_t { help, hurt, make, brk };

std::string_view to_string(Polarity polarity);
std::optional<Polarity> parse_polarity(std::string_view text);

/// Label carried across a help or hurt contribution link. Make and break
/// links are rejected by validation and throw here ("unsupported-contribution").
QualLabel apply_contribution(Polarity polarity, QualLabel source);

enum class SatLevel : std::uint8_t { F, P, N };

std::string_view to_string(SatLevel level);

struct SatDen {
  SatLevel sat;
  SatLevel den;
  bool operator==(const SatDen&) const = default;
};

SatDen to_sat_den(QualLabel label);
/// Inverse of to_sat_den on its six-pair image; throws "unrepresentable".
QualLabel from_sat_den(SatDen pair);

/// Outcome of an automatic combination step. An empty label means the
/// inputs cannot be combined without a human judgment.
struct Combination {
  std::optional<QualLabel> label;
  bool needs_judgment() const { return !label.has_value(); }
};

/// AND semantics. Raises a judgment when the result would hinge on the
/// incomparable U/C pair.
Combination label_min(std::span<const QualLabel> labels);
/// OR semantics, with the same U/C escape hatch as label_min.
Combination label_max(std::span<const QualLabel> labels);

/// Resolves a bag of evidence arriving at one element:
///  - a single label passes through;
///  - same-sign bags containing a full label resolve to it (S for {S, PS},
///    D for {D, PD});
///  - bags of identical full or neutral labels (S, D, U, C) pass through;
///  - everything else, including several partial labels of one sign,
///    needs a human judgment.
Combination combine_evidence(std::span<const QualLabel> bag);

/// Sorts labels into the display order S, PS, C, U, PD, D.
std::vector<QualLabel> canonical_multiset(std::vector<QualLabel> labels);

std::string format_multiset(std::span<const QualLabel> labels);

}  // namespace gorenet
