#include "gorenet/label.hpp"

#include <algorithm>

#include "gorenet/error.hpp"

namespace gorenet {

std::string_view to_string(QualLabel label) {
  switch (label) {
    case QualLabel::S: return "S";
    case QualLabel::PS: return "PS";
    case QualLabel::C: return "C";
    case QualLabel::U: return "U";
    case QualLabel::PD: return "PD";
    case QualLabel::D: return "D";
  }
  return "?";
}

std::optional<QualLabel> parse_label(std::string_view text) {
  for (QualLabel l : kAllLabels) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

std::string_view to_string(Polarity polarity) {
  switch (polarity) {
    case Polarity::help: return "help";
    case Polarity::hurt: return "hurt";
    case Polarity::make: return "make";
    case Polarity::brk: return "break";
  }
  return "?";
}

std::optional<Polarity> parse_polarity(std::string_view text) {
  if (text == "help") return Polarity::help;
  if (text == "hurt") return Polarity::hurt;
  if (text == "make") return Polarity::make;
  if (text == "break") return Polarity::brk;
  return std::nullopt;
}

QualLabel apply_contribution(Polarity polarity, QualLabel source) {
  if (polarity != Polarity::help && polarity != Polarity::hurt) {
    throw Error("unsupported-contribution",
                "only help and hurt contributions carry labels");
  }
  const bool help = polarity == Polarity::help;
  switch (source) {
    case QualLabel::S:
    case QualLabel::PS:
      return help ? QualLabel::PS : QualLabel::PD;
    case QualLabel::D:
    case QualLabel::PD:
      return help ? QualLabel::PD : QualLabel::PS;
    case QualLabel::U:
    case QualLabel::C:
      return source;
  }
  return source;
}

std::string_view to_string(SatLevel level) {
  switch (level) {
    case SatLevel::F: return "F";
    case SatLevel::P: return "P";
    case SatLevel::N: return "N";
  }
  return "?";
}

SatDen to_sat_den(QualLabel label) {
  using enum SatLevel;
  switch (label) {
    case QualLabel::S: return {F, N};
    case QualLabel::PS: return {P, N};
    case QualLabel::C: return {P, P};
    case QualLabel::U: return {N, N};
    case QualLabel::PD: return {N, P};
    case QualLabel::D: return {N, F};
  }
  return {N, N};
}

QualLabel from_sat_den(SatDen pair) {
  for (QualLabel l : kAllLabels) {
    if (to_sat_den(l) == pair) return l;
  }
  throw Error("unrepresentable", "(" + std::string(to_string(pair.sat)) + "," +
                                     std::string(to_string(pair.den)) +
                                     ") has no qualitative label");
}

namespace {

bool has_unknown_and_conflict(std::span<const QualLabel> labels) {
  bool u = false, c = false;
  for (QualLabel l : labels) {
    u = u || l == QualLabel::U;
    c = c || l == QualLabel::C;
  }
  return u && c;
}

bool is_undecided(QualLabel l) { return l == QualLabel::U || l == QualLabel::C; }

}  // namespace

Combination label_min(std::span<const QualLabel> labels) {
  if (labels.empty()) return {};
  QualLabel m = *std::min_element(labels.begin(), labels.end());
  if (is_undecided(m) && has_unknown_and_conflict(labels)) return {};
  return {m};
}

Combination label_max(std::span<const QualLabel> labels) {
  if (labels.empty()) return {};
  QualLabel m = *std::max_element(labels.begin(), labels.end());
  if (is_undecided(m) && has_unknown_and_conflict(labels)) return {};
  return {m};
}

Combination combine_evidence(std::span<const QualLabel> bag) {
  if (bag.empty()) return {};
  if (bag.size() == 1) return {bag.front()};

  const auto all = [&](auto pred) { return std::all_of(bag.begin(), bag.end(), pred); };
  const auto any = [&](QualLabel x) { return std::find(bag.begin(), bag.end(), x) != bag.end(); };

  if (all([](QualLabel l) { return l == QualLabel::S || l == QualLabel::PS; }) &&
      any(QualLabel::S)) {
    return {QualLabel::S};
  }
  if (all([](QualLabel l) { return l == QualLabel::D || l == QualLabel::PD; }) &&
      any(QualLabel::D)) {
    return {QualLabel::D};
  }
  const QualLabel first = bag.front();
  if (is_undecided(first) && all([&](QualLabel l) { return l == first; })) {
    return {first};
  }
  return {};
}

std::vector<QualLabel> canonical_multiset(std::vector<QualLabel> labels) {
  std::sort(labels.begin(), labels.end(), std::greater<>());
  return labels;
}

std::string format_multiset(std::span<const QualLabel> labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ", ";
    out += to_string(labels[i]);
  }
  out += "}";
  return out;
}

}  // namespace gorenet
