#include <gtest/gtest.h>

#include <random>

#include "gorenet/corpus.hpp"
#include "gorenet/error.hpp"

using namespace gorenet;
using L = QualLabel;

namespace {

const CorpusEntry& corpus() {
  static const CorpusEntry entry = load_corpus("osn-case-study");
  return entry;
}

EvaluationResult evaluate_corpus(const std::string& scenario, const JudgmentTable& table,
                                 const EvaluationOptions& options = {}) {
  const auto& m = corpus().model;
  return propagate_forward(m.goals, *m.find_scenario(scenario), m.baseline, table, options);
}

L min_of(const std::vector<L>& v) { return *std::min_element(v.begin(), v.end()); }
L max_of(const std::vector<L>& v) { return *std::max_element(v.begin(), v.end()); }

// Checks every final label against one local application of the rules,
// using only the final labels of its inputs. Returns the offending ids.
std::vector<std::string> local_inconsistencies(const GoalModel& g, const LabelMap& initial,
                                               const EvaluationResult& r) {
  std::vector<std::string> bad;
  auto lbl = [&](const std::string& id) { return r.label(id); };
  std::set<std::pair<std::string, std::vector<L>>> judged;
  for (const auto& j : r.judgments_used) judged.insert({j.element, canonical_multiset(j.given)});

  for (const auto& e : g.elements) {
    if (initial.contains(e.id)) {
      if (lbl(e.id) != initial.at(e.id)) bad.push_back(e.id);
      continue;
    }
    std::vector<L> hard, quality, means, bag;
    for (const auto& l : g.links) {
      if (l.kind == LinkKind::decomposition && l.source == e.id) {
        const auto* child = g.find_element(l.target);
        if (auto x = lbl(l.target)) (child->kind == ElementKind::softgoal ? quality : hard).push_back(*x);
      } else if (l.kind == LinkKind::means_end && l.source == e.id) {
        if (auto x = lbl(l.target)) means.push_back(*x);
      } else if (l.kind == LinkKind::dependency && l.source == e.id) {
        if (auto x = lbl(*l.dependum)) hard.push_back(*x);
      } else if (l.kind == LinkKind::dependency && *l.dependum == e.id) {
        if (auto x = lbl(l.target)) hard.push_back(*x);
      } else if (l.kind == LinkKind::contribution && l.target == e.id) {
        if (auto x = lbl(l.source)) bag.push_back(apply_contribution(*l.polarity, *x));
      }
    }
    // A stage either resolves by rank or was answered by a judgment.
    bool ok = true;
    auto stage = [&](const std::vector<L>& in, std::optional<L> automatic) -> std::optional<L> {
      if (automatic) return automatic;
      if (!judged.contains({e.id, canonical_multiset(in)})) ok = false;
      return std::nullopt;
    };
    const bool has_uc_tie = [&](const std::vector<L>& v, L pick) {
      return (pick == L::U || pick == L::C) && std::count(v.begin(), v.end(), L::U) && std::count(v.begin(), v.end(), L::C);
    }(means, means.empty() ? L::S : max_of(means));
    std::optional<L> or_label;
    if (!means.empty()) or_label = stage(means, has_uc_tie ? std::nullopt : std::optional(max_of(means)));
    std::vector<L> and_side = hard;
    if (!means.empty()) {
      if (!or_label) {
        // A judged OR stage hides the value it fed forward.
        if (!ok && lbl(e.id)) bad.push_back(e.id);
        continue;
      }
      and_side.push_back(*or_label);
    }
    std::vector<L> full_bag = quality;
    full_bag.insert(full_bag.end(), bag.begin(), bag.end());
    if (!and_side.empty()) {
      const L lo = min_of(and_side);
      const bool tie = (lo == L::U || lo == L::C) && std::count(and_side.begin(), and_side.end(), L::U) &&
                       std::count(and_side.begin(), and_side.end(), L::C);
      auto a = stage(and_side, tie ? std::nullopt : std::optional(lo));
      if (!a) {
        if (!ok && lbl(e.id)) bad.push_back(e.id);
        continue;
      }
      full_bag.insert(full_bag.begin(), *a);
    }
    if (full_bag.empty()) {
      if (lbl(e.id)) bad.push_back(e.id);
      continue;
    }
    auto c = combine_evidence(full_bag);
    if (c.label) {
      if (lbl(e.id) && lbl(e.id) != c.label) bad.push_back(e.id);
    } else if (lbl(e.id)) {
      const bool answered = std::any_of(r.judgments_used.begin(), r.judgments_used.end(), [&](const Judgment& j) {
        return j.element == e.id && canonical_multiset(j.given) == canonical_multiset(full_bag) && j.label == *lbl(e.id);
      });
      if (!answered) bad.push_back(e.id);
    }
  }
  return bad;
}

LabelMap initial_labels(const TwoLayerModel& m, const Scenario& s) {
  LabelMap out = s.extends_baseline ? m.baseline : LabelMap{};
  for (const auto& [k, v] : s.labels) out[k] = v;
  return out;
}

GoalModel and_tree() {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto root = b.element("Root", ElementKind::goal, a);
  auto x = b.element("X", ElementKind::task, a, true);
  auto y = b.element("Y", ElementKind::task, a, true);
  auto z = b.element("Z", ElementKind::task, a, true);
  b.decompose(root, x);
  b.decompose(root, y);
  b.decompose(root, z);
  return std::move(b).build();
}

}  // namespace

TEST(Judgments, LookupPrefersScopedEntries) {
  JudgmentTable t;
  t.add({"e", {L::PS, L::PD}, "", L::PD, Provenance::file});
  t.add({"e", {L::PS, L::PD}, "reply", L::PS, Provenance::file});
  EXPECT_EQ(t.lookup("e", {L::PS, L::PD}, "reply")->label, L::PS);
  EXPECT_EQ(t.lookup("e", {L::PS, L::PD}, "other")->label, L::PD);
  EXPECT_EQ(t.lookup("e", {L::PS, L::PD}, "")->label, L::PD);
  EXPECT_EQ(t.lookup("e", {L::PS}, ""), nullptr);
  t.add({"e", {L::PS, L::PD}, "", L::U, Provenance::interactive});
  EXPECT_EQ(t.entries().size(), 2u);
  EXPECT_EQ(t.lookup("e", {L::PS, L::PD}, "")->label, L::U);
}

TEST(Forward, AndTreeOfSatisfiedLeaves) {
  const auto g = and_tree();
  const auto r = propagate_forward(g, {"all", false, {{"x", L::S}, {"y", L::S}, {"z", L::S}}}, {}, {});
  EXPECT_EQ(r.label("root"), L::S);
  EXPECT_TRUE(r.judgments_used.empty());
  EXPECT_EQ(r.status, EvaluationStatus::complete);
  EXPECT_TRUE(r.unlabeled.empty());
}

TEST(Forward, AndTakesMinimum) {
  const auto r = propagate_forward(and_tree(), {"m", false, {{"x", L::S}, {"y", L::PD}, {"z", L::PS}}}, {}, {});
  EXPECT_EQ(r.label("root"), L::PD);
}

TEST(Forward, SingleHelpFromSatisfied) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto t = b.element("T", ElementKind::task, a, true);
  auto s = b.element("Soft", ElementKind::softgoal, a);
  b.contribute(t, s, Polarity::help);
  const auto r = propagate_forward(std::move(b).build(), {"x", false, {{t, L::S}}}, {}, {});
  EXPECT_EQ(r.label(s), L::PS);
}

TEST(Forward, MeansEndTakesMaximum) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto g = b.element("G", ElementKind::goal, a);
  auto x = b.element("X", ElementKind::task, a, true);
  auto y = b.element("Y", ElementKind::task, a, true);
  b.means_end(g, x);
  b.means_end(g, y);
  const auto r = propagate_forward(std::move(b).build(), {"x", false, {{x, L::D}, {y, L::PS}}}, {}, {});
  EXPECT_EQ(r.label(g), L::PS);
}

TEST(Forward, DependencyCopiesThroughDependum) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto c = b.actor("C");
  auto depender = b.element("Needs", ElementKind::task, a);
  auto dependee = b.element("Gives", ElementKind::task, c, true);
  auto dum = b.element("Thing", ElementKind::resource, std::nullopt);
  b.depend(depender, dum, dependee);
  const auto r = propagate_forward(std::move(b).build(), {"x", false, {{dependee, L::PD}}}, {}, {});
  EXPECT_EQ(r.label(dum), L::PD);
  EXPECT_EQ(r.label(depender), L::PD);
}

TEST(Forward, MixedEvidenceRaisesJudgment) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto x = b.element("X", ElementKind::task, a, true);
  auto y = b.element("Y", ElementKind::task, a, true);
  auto s = b.element("Soft", ElementKind::softgoal, a);
  auto top = b.element("Top", ElementKind::goal, a);
  b.contribute(x, s, Polarity::help);
  b.contribute(y, s, Polarity::hurt);
  b.decompose(top, s);
  const auto g = std::move(b).build();
  const Scenario sc{"x", false, {{x, L::S}, {y, L::S}}};

  auto r = propagate_forward(g, sc, {}, {});
  EXPECT_EQ(r.status, EvaluationStatus::unresolved_judgments);
  ASSERT_EQ(r.pending.size(), 1u);
  EXPECT_EQ(r.pending[0], (JudgmentPoint{s, {L::PS, L::PD}, "x"}));
  EXPECT_FALSE(r.label(s));
  EXPECT_FALSE(r.label(top));  // downstream of a pending point

  JudgmentTable t;
  t.add({s, {L::PS, L::PD}, "", L::C, Provenance::file});
  r = propagate_forward(g, sc, {}, t);
  EXPECT_EQ(r.status, EvaluationStatus::complete);
  EXPECT_EQ(r.label(s), L::C);
  EXPECT_EQ(r.label(top), L::C);
  ASSERT_EQ(r.judgments_used.size(), 1u);
  EXPECT_EQ(r.judgments_used[0].provenance, Provenance::file);

  int asked = 0;
  JudgmentResolver resolver = [&](const JudgmentPoint& p) -> std::optional<L> {
    ++asked;
    EXPECT_EQ(p.given, (std::vector<L>{L::PS, L::PD}));
    return L::PS;
  };
  EvaluationOptions o;
  o.resolver = &resolver;
  r = propagate_forward(g, sc, {}, {}, o);
  EXPECT_EQ(asked, 1);
  EXPECT_EQ(r.label(s), L::PS);
  ASSERT_EQ(r.judgments_used.size(), 1u);
  EXPECT_EQ(r.judgments_used[0].provenance, Provenance::interactive);
}

TEST(Forward, ContributionOnlyEvidenceIsCapped) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto s = b.element("Soft", ElementKind::softgoal, a);
  std::vector<std::string> sources;
  for (int i = 0; i < 3; ++i) {
    sources.push_back(b.element("Src" + std::to_string(i), ElementKind::task, a, true));
    b.contribute(sources.back(), s, i == 2 ? Polarity::hurt : Polarity::help);
  }
  const auto g = std::move(b).build();
  for (L x : kAllLabels) {
    for (L y : kAllLabels) {
      for (L z : kAllLabels) {
        const auto r = propagate_forward(g, {"c", false, {{sources[0], x}, {sources[1], y}, {sources[2], z}}}, {}, {});
        if (auto l = r.label(s)) {
          EXPECT_NE(*l, L::S);
          EXPECT_NE(*l, L::D);
        }
      }
    }
  }
}

TEST(Forward, NonConvergentCycleNamesTheCycle) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto top = b.element("Top", ElementKind::goal, a);
  auto c = b.element("Seed", ElementKind::task, a, true);
  auto soft = b.element("Loop", ElementKind::softgoal, a);
  b.decompose(top, c);
  b.decompose(top, soft);
  b.contribute(top, soft, Polarity::hurt);
  const auto g = std::move(b).build();
  JudgmentTable t;
  t.add({top, {L::S, L::PD}, "", L::PD, Provenance::file});
  try {
    propagate_forward(g, {"osc", false, {{c, L::S}}}, {}, t);
    FAIL() << "expected non-convergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "non-convergent");
    EXPECT_NE(std::string(e.what()).find(top), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find(soft), std::string::npos) << e.what();
  }
}

TEST(Forward, ScenarioKeysOutsideDecisionPointsWarn) {
  const auto g = and_tree();
  const auto r = propagate_forward(g, {"w", false, {{"root", L::S}}}, {}, {});
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("Root"), std::string::npos) << r.warnings[0];
  EXPECT_EQ(r.label("root"), L::S);
}

TEST(Forward, UnknownScenarioKeyThrows) {
  try {
    propagate_forward(and_tree(), {"w", false, {{"nope", L::S}}}, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown-element");
  }
}

TEST(Forward, ScenarioWithoutLabelsLeavesEverythingUnlabeled) {
  const auto& m = corpus().model;
  const auto r = propagate_forward(m.goals, {"empty", false, {}}, {}, corpus().judgments);
  EXPECT_TRUE(r.labels.empty());
  EXPECT_EQ(r.unlabeled.size(), m.goals.elements.size());
}

TEST(Forward, InitialLabelsAreNeverOverwritten) {
  const auto& m = corpus().model;
  for (const auto& s : m.scenarios) {
    const auto r = evaluate_corpus(s.name, corpus().judgments);
    for (const auto& [id, l] : initial_labels(m, s)) EXPECT_EQ(r.label(id), l) << s.name << " " << id;
  }
}

TEST(Forward, CorpusResultsAreLocallyConsistent) {
  const auto& m = corpus().model;
  for (const auto& s : m.scenarios) {
    for (const JudgmentTable& t : {corpus().judgments, JudgmentTable{}}) {
      const auto r = evaluate_corpus(s.name, t);
      EXPECT_EQ(local_inconsistencies(m.goals, initial_labels(m, s), r), std::vector<std::string>{}) << s.name;
    }
  }
}

TEST(Forward, ConsistencyOracleNoticesTampering) {
  const auto& m = corpus().model;
  const auto& s = *m.find_scenario("reply");
  for (const char* id : {"gather-eti", "encourage-dynamics", "use-osn-passively"}) {
    auto r = evaluate_corpus("reply", corpus().judgments);
    r.labels[id] = r.labels.at(id) == L::S ? L::PD : L::S;
    const auto bad = local_inconsistencies(m.goals, initial_labels(m, s), r);
    EXPECT_NE(std::find(bad.begin(), bad.end(), id), bad.end()) << id;
  }
}

TEST(Forward, AuditReplay) {
  const auto& m = corpus().model;
  for (const auto& s : m.scenarios) {
    const auto r = evaluate_corpus(s.name, corpus().judgments);
    EXPECT_EQ(r.status, EvaluationStatus::complete) << s.name;
    const auto init = initial_labels(m, s);
    std::map<std::string, L> last;
    for (const auto& a : r.audit) {
      if (a.rule == "initial") {
        EXPECT_EQ(init.at(a.element), a.label);
      } else if (a.rule == "derived") {
        EXPECT_EQ(combine_evidence(a.evidence).label, a.label) << a.element;
      } else {
        EXPECT_EQ(a.rule, "judgment");
        const bool found = std::any_of(r.judgments_used.begin(), r.judgments_used.end(),
                                       [&](const Judgment& j) { return j.element == a.element; });
        EXPECT_TRUE(found) << a.element;
      }
      last[a.element] = a.label;
    }
    for (const auto& [id, l] : r.labels) EXPECT_EQ(last.at(id), l) << id;
  }
}

TEST(Forward, Deterministic) {
  const auto a = evaluate_corpus("reply", corpus().judgments);
  const auto b = evaluate_corpus("reply", corpus().judgments);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.audit, b.audit);
  EXPECT_EQ(a.judgments_used, b.judgments_used);
}

TEST(Forward, CaseStudyHeadlineLabels) {
  auto r = evaluate_corpus("reply", corpus().judgments);
  EXPECT_EQ(r.label("mitigate-information-overload"), L::D);
  EXPECT_EQ(r.label("generate-more-content"), L::S);
  EXPECT_EQ(r.label("encourage-dynamics"), L::S);
  EXPECT_EQ(r.label("maintain-desire-to-use-osn"), L::PS);
  r = evaluate_corpus("no-reply", corpus().judgments);
  EXPECT_EQ(r.label("gather-reply-eti"), L::D);
  EXPECT_EQ(r.label("encourage-dynamics"), L::PD);
  EXPECT_EQ(r.label("generate-reply-eti"), L::D);
  r = evaluate_corpus("not-notify", corpus().judgments);
  EXPECT_EQ(r.label("encourage-dynamics"), L::D);
}

TEST(Backward, EncourageDynamicsIncludesReplyAssignment) {
  const auto& m = corpus().model;
  const auto r = backward_search(m.goals, m.baseline, "encourage-dynamics", L::S, corpus().judgments);
  EXPECT_EQ(r.decision_points.size(), 4u);
  const LabelMap reply = {{"decide-to-notify", L::S},
                          {"decide-to-not-notify", L::D},
                          {"react-to-user-s-eti", L::S},
                          {"do-not-react-to-user-s-eti", L::D}};
  EXPECT_TRUE(std::any_of(r.solutions.begin(), r.solutions.end(), [&](const Scenario& s) { return s.labels == reply; }));
}

TEST(Backward, SolutionsReproduceAndEnumerationIsComplete) {
  const auto& m = corpus().model;
  const auto points = decision_points(m.goals);
  for (const char* target : {"encourage-dynamics", "generate-more-content", "refine-user-profile",
                             "mitigate-information-overload"}) {
    for (L want : {L::S, L::PS, L::PD, L::D}) {
      const auto r = backward_search(m.goals, m.baseline, target, want, corpus().judgments);
      for (const auto& s : r.solutions) {
        const auto f = propagate_forward(m.goals, s, m.baseline, corpus().judgments);
        EXPECT_EQ(f.label(target), want) << s.name;
      }
      EXPECT_TRUE(std::is_sorted(r.solutions.begin(), r.solutions.end(),
                                 [](const Scenario& a, const Scenario& b) { return a.name < b.name; }));
      // Independent enumeration of all 2^k assignments.
      std::size_t hits = 0, blocked = 0;
      for (unsigned mask = 0; mask < (1u << points.size()); ++mask) {
        Scenario s{"enum", true, {}};
        for (std::size_t i = 0; i < points.size(); ++i) s.labels[points[i]] = (mask >> i) & 1 ? L::S : L::D;
        const auto f = propagate_forward(m.goals, s, m.baseline, corpus().judgments);
        if (f.label(target) == want) ++hits;
        if (!f.label(target) && !f.pending.empty()) ++blocked;
      }
      EXPECT_EQ(r.solutions.size(), hits) << target << " " << to_string(want);
      EXPECT_EQ(r.skipped.size(), blocked) << target << " " << to_string(want);
    }
  }
}

TEST(Backward, UnreachableLabelGivesNothing) {
  const auto& m = corpus().model;
  const auto r = backward_search(m.goals, m.baseline, "allow-users-to-post-profile-ets", L::D, corpus().judgments);
  EXPECT_TRUE(r.solutions.empty());
}

TEST(Backward, ForcedLabelAcceptsEveryAssignment) {
  GoalModelBuilder b;
  auto a = b.actor("A");
  auto root = b.element("Root", ElementKind::goal, a);
  auto fixed = b.element("Fixed", ElementKind::task, a);
  b.element("X", ElementKind::task, a, true);
  b.element("Y", ElementKind::task, a, true);
  b.decompose(root, fixed);
  const auto g = std::move(b).build();
  const auto r = backward_search(g, {{fixed, L::S}}, root, L::S, {});
  EXPECT_EQ(r.solutions.size(), 4u);
}

TEST(Backward, Guards) {
  GoalModelBuilder none;
  auto a = none.actor("A");
  none.element("G", ElementKind::goal, a);
  try {
    backward_search(std::move(none).build(), {}, "g", L::S, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "no-decision-points");
  }
  GoalModelBuilder many;
  auto c = many.actor("C");
  auto g = many.element("G", ElementKind::goal, c);
  for (int i = 0; i < 21; ++i) many.element("D" + std::to_string(i), ElementKind::task, c, true);
  try {
    backward_search(std::move(many).build(), {}, g, L::S, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "too-many-decision-points");
  }
}
