#include <gtest/gtest.h>

#include <map>

#include "gorenet/error.hpp"
#include "gorenet/label.hpp"

using namespace gorenet;
using L = QualLabel;

namespace {

// Written out by hand; the implementation is never consulted.
const std::map<L, L> kHelp = {{L::S, L::PS}, {L::PS, L::PS}, {L::PD, L::PD},
                              {L::D, L::PD}, {L::U, L::U},   {L::C, L::C}};
const std::map<L, L> kHurt = {{L::S, L::PD}, {L::PS, L::PD}, {L::PD, L::PS},
                              {L::D, L::PS}, {L::U, L::U},   {L::C, L::C}};
const std::map<L, SatDen> kSatDen = {
    {L::S, {SatLevel::F, SatLevel::N}},  {L::PS, {SatLevel::P, SatLevel::N}},
    {L::PD, {SatLevel::N, SatLevel::P}}, {L::D, {SatLevel::N, SatLevel::F}},
    {L::U, {SatLevel::N, SatLevel::N}},  {L::C, {SatLevel::P, SatLevel::P}}};
const std::map<L, int> kRank = {{L::D, 0}, {L::PD, 1}, {L::U, 2}, {L::C, 3}, {L::PS, 4}, {L::S, 5}};

std::vector<std::vector<L>> bags_up_to(std::size_t n) {
  std::vector<std::vector<L>> out = {{}};
  std::vector<std::vector<L>> frontier = {{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<L>> next;
    for (const auto& b : frontier) {
      for (L l : kAllLabels) {
        auto c = b;
        c.push_back(l);
        next.push_back(c);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

bool contains(const std::vector<L>& bag, L l) { return std::find(bag.begin(), bag.end(), l) != bag.end(); }

}  // namespace

TEST(Label, TextRoundTrip) {
  for (L l : kAllLabels) EXPECT_EQ(parse_label(to_string(l)), l);
  EXPECT_EQ(to_string(L::PS), "PS");
  EXPECT_FALSE(parse_label("X").has_value());
  EXPECT_FALSE(parse_label("ps").has_value());
  EXPECT_FALSE(parse_label("").has_value());
}

TEST(Label, HelpAndHurtExhaustive) {
  for (L from : kAllLabels) {
    for (L to : kAllLabels) {
      EXPECT_EQ(apply_contribution(Polarity::help, from) == to, kHelp.at(from) == to)
          << "help " << to_string(from) << " -> " << to_string(to);
      EXPECT_EQ(apply_contribution(Polarity::hurt, from) == to, kHurt.at(from) == to)
          << "hurt " << to_string(from) << " -> " << to_string(to);
    }
  }
}

TEST(Label, ContributionNeverYieldsFullLabels) {
  for (L from : kAllLabels) {
    for (auto p : {Polarity::help, Polarity::hurt}) {
      L out = apply_contribution(p, from);
      EXPECT_NE(out, L::S);
      EXPECT_NE(out, L::D);
    }
  }
}

TEST(Label, MakeAndBreakAreRejected) {
  for (L from : kAllLabels) {
    for (auto p : {Polarity::make, Polarity::brk}) {
      try {
        apply_contribution(p, from);
        FAIL() << "expected throw";
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), "unsupported-contribution");
      }
    }
  }
}

TEST(Label, SatDenTable) {
  for (L l : kAllLabels) EXPECT_EQ(to_sat_den(l), kSatDen.at(l)) << to_string(l);
  EXPECT_EQ(to_sat_den(L::C), (SatDen{SatLevel::P, SatLevel::P}));
}

TEST(Label, SatDenBijectionOnImage) {
  const SatLevel levels[] = {SatLevel::F, SatLevel::P, SatLevel::N};
  int image = 0;
  for (SatLevel s : levels) {
    for (SatLevel d : levels) {
      const SatDen pair{s, d};
      std::optional<L> expected;
      for (const auto& [l, sd] : kSatDen) {
        if (sd == pair) expected = l;
      }
      if (expected) {
        ++image;
        EXPECT_EQ(from_sat_den(pair), *expected);
        EXPECT_EQ(to_sat_den(from_sat_den(pair)), pair);
      } else {
        try {
          from_sat_den(pair);
          FAIL() << to_string(s) << "," << to_string(d) << " should be unrepresentable";
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), "unrepresentable");
        }
      }
    }
  }
  EXPECT_EQ(image, 6);
  for (L l : kAllLabels) EXPECT_EQ(from_sat_den(to_sat_den(l)), l);
}

TEST(Label, TotalOrder) {
  for (L a : kAllLabels) {
    for (L b : kAllLabels) EXPECT_EQ(a < b, kRank.at(a) < kRank.at(b));
  }
}

TEST(Label, MinMaxAgainstRankOracle) {
  for (const auto& bag : bags_up_to(4)) {
    const auto min = label_min(bag);
    const auto max = label_max(bag);
    if (bag.empty()) {
      EXPECT_TRUE(min.needs_judgment());
      EXPECT_TRUE(max.needs_judgment());
      continue;
    }
    L lo = bag[0], hi = bag[0];
    for (L l : bag) {
      if (kRank.at(l) < kRank.at(lo)) lo = l;
      if (kRank.at(l) > kRank.at(hi)) hi = l;
    }
    const bool uc = contains(bag, L::U) && contains(bag, L::C);
    if (uc && (lo == L::U || lo == L::C)) {
      EXPECT_TRUE(min.needs_judgment()) << format_multiset(bag);
    } else {
      EXPECT_EQ(min.label, lo) << format_multiset(bag);
    }
    if (uc && (hi == L::U || hi == L::C)) {
      EXPECT_TRUE(max.needs_judgment()) << format_multiset(bag);
    } else {
      EXPECT_EQ(max.label, hi) << format_multiset(bag);
    }
  }
}

TEST(Label, CombineEvidenceAgainstOracle) {
  for (const auto& bag : bags_up_to(4)) {
    std::optional<L> expected;
    auto only = [&](std::initializer_list<L> allowed) {
      return std::all_of(bag.begin(), bag.end(),
                         [&](L l) { return std::find(allowed.begin(), allowed.end(), l) != allowed.end(); });
    };
    if (bag.size() == 1) {
      expected = bag[0];
    } else if (!bag.empty() && only({L::S, L::PS}) && contains(bag, L::S)) {
      expected = L::S;
    } else if (!bag.empty() && only({L::D, L::PD}) && contains(bag, L::D)) {
      expected = L::D;
    } else if (!bag.empty() && (only({L::U}) || only({L::C}))) {
      expected = bag[0];
    }
    EXPECT_EQ(combine_evidence(bag).label, expected) << format_multiset(bag);
  }
}

TEST(Label, PartialBagsNeedJudgment) {
  EXPECT_TRUE(combine_evidence(std::vector{L::PS, L::PS}).needs_judgment());
  EXPECT_TRUE(combine_evidence(std::vector{L::PS, L::PD, L::PS}).needs_judgment());
  EXPECT_EQ(combine_evidence(std::vector{L::PS}).label, L::PS);
  EXPECT_EQ(combine_evidence(std::vector{L::S, L::PS, L::PS}).label, L::S);
}

TEST(Label, CanonicalMultiset) {
  EXPECT_EQ(canonical_multiset({L::D, L::U, L::PS, L::S, L::C, L::PD, L::PS}),
            (std::vector{L::S, L::PS, L::PS, L::C, L::U, L::PD, L::D}));
  EXPECT_EQ(format_multiset(std::vector{L::PS, L::PD, L::PS}), "{PS, PD, PS}");
  EXPECT_EQ(format_multiset(std::vector<L>{}), "{}");
}

TEST(Label, PolarityText) {
  for (auto p : {Polarity::help, Polarity::hurt, Polarity::make, Polarity::brk}) {
    EXPECT_EQ(parse_polarity(to_string(p)), p);
  }
  EXPECT_FALSE(parse_polarity("neutral").has_value());
}
