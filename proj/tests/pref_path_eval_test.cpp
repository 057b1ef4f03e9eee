#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "prefq/dataguide.hpp"
#include "prefq/doc_model.hpp"
#include "prefq/pref_path_eval.hpp"
#include "prefq/query.hpp"
#include "prefq/random_gen.hpp"
#include "prefq/rewriter.hpp"

using namespace prefq;

namespace {

AnnotatedDataGuide guide_of(const std::string& xml) {
  return build_dataguide(parse_document(xml));
}

PrefPathQuery pref_path(std::vector<std::string> steps, bool pref = true) {
  PrefPathQuery p;
  p.steps = std::move(steps);
  p.last_is_preference = pref;
  return p;
}

std::string render_list(const OccurrenceList& list) {
  std::string out;
  for (const Occurrence& o : list) {
    if (!out.empty()) out += " ";
    out += render_occurrence(o);
  }
  return out;
}

Occurrence stamp(uint32_t s, uint32_t e, RegionLabel owner) {
  Occurrence o;
  o.kind = OccKind::Pseudo;
  o.region = {s, e, owner.level + 1};
  o.owner = owner;
  o.has_owner = true;
  return o;
}

Occurrence real(RegionLabel r) {
  Occurrence o;
  o.kind = OccKind::Real;
  o.region = r;
  return o;
}

// The sixteen-element document used throughout: three A contexts, two of
// which contain a B.
const char* kMixedDoc =
    "<A><D><E/></D><A><C/><B><C/></B><D><E/></D></A><C/><D><E/></D>"
    "<A><C/><C/><B/></A></A>";

}  // namespace

TEST_CASE("next pointers expose the region bounds") {
  Occurrence o = real({4, 9, 2});
  CHECK(next_l(o) == 4);
  CHECK(next_r(o) == 9);
  Occurrence p = stamp(1, 6, {1, 32, 1});
  CHECK(next_l(p) == 1);
  CHECK(next_r(p) == 6);
}

TEST_CASE("a present preference child yields stamps around the real node") {
  AnnotatedDataGuide dg = guide_of("<A><B/></A>");
  OccurrenceList list = eval_pref_path(dg, pref_path({"A", "B"}));
  REQUIRE(list.size() == 3);
  CHECK(list[0].kind == OccKind::Pseudo);
  CHECK(list[0].region.start == 1);
  CHECK(list[0].region.end == 2);
  CHECK(list[0].region.level == 2);
  CHECK(list[0].owner == RegionLabel{1, 4, 1});
  CHECK(list[0].has_owner);
  CHECK(list[1].kind == OccKind::Real);
  CHECK(list[1].region == RegionLabel{2, 3, 2});
  CHECK(list[2].kind == OccKind::Pseudo);
  CHECK(list[2].region.start == 3);
  CHECK(list[2].region.end == 4);
  CHECK(render_list(list) == "eps(1,2)@(1,4,1) (2,3,2) eps(3,4)@(1,4,1)");
}

TEST_CASE("an absent preference child yields one stamp spanning the parent") {
  AnnotatedDataGuide dg = guide_of("<A><C/></A>");
  OccurrenceList list = eval_pref_path(dg, pref_path({"A", "B"}));
  REQUIRE(list.size() == 1);
  CHECK(list[0].kind == OccKind::Pseudo);
  CHECK(list[0].region.start == 1);
  CHECK(list[0].region.end == 4);
  CHECK(list[0].owner == RegionLabel{1, 4, 1});
}

TEST_CASE("no parent context means no occurrences at all") {
  AnnotatedDataGuide dg = guide_of("<X/>");
  CHECK(eval_pref_path(dg, pref_path({"A", "B"})).empty());
  // A single-step preference has no strict prefix to anchor to.
  CHECK(eval_pref_path(dg, pref_path({"B"})).empty());
}

TEST_CASE("paths without a preference step behave like strict lookups") {
  AnnotatedDataGuide dg = guide_of("<A><B/></A>");
  OccurrenceList hit = eval_pref_path(dg, pref_path({"A", "B"}, false));
  REQUIRE(hit.size() == 1);
  CHECK(hit[0].kind == OccKind::Real);
  CHECK(hit[0].region == RegionLabel{2, 3, 2});
  CHECK(eval_pref_path(guide_of("<A><C/></A>"), pref_path({"A", "B"}, false))
            .empty());
}

TEST_CASE("a document-level owner covers the whole span") {
  OccurrenceList list =
      build_gap_stamps({}, {}, true, 8, StampMode::KeepAll);
  REQUIRE(list.size() == 1);
  CHECK(list[0].kind == OccKind::Pseudo);
  CHECK(list[0].region.start == 0);
  CHECK(list[0].region.end == 9);
  CHECK(list[0].region.level == 1);
  CHECK_FALSE(list[0].has_owner);
  CHECK(render_occurrence(list[0]) == "eps(0,9)@document");
}

TEST_CASE("degenerate stamps are dropped only when the owner has wider ones") {
  RegionLabel a{1, 6, 1};
  RegionLabel b{2, 3, 2};
  OccurrenceList keep =
      build_gap_stamps({a}, {b}, false, 0, StampMode::KeepAll);
  REQUIRE(keep.size() == 2);
  CHECK(keep[0].region.start == 1);
  CHECK(keep[0].region.end == 2);
  CHECK(keep[1].region.start == 3);
  CHECK(keep[1].region.end == 6);

  OccurrenceList dropped =
      build_gap_stamps({a}, {b}, false, 0, StampMode::DropDegenerate);
  REQUIRE(dropped.size() == 1);
  CHECK(dropped[0].region.start == 3);
  CHECK(dropped[0].region.end == 6);

  // When every stamp of an owner is narrow, all of them survive: dropping
  // them would erase the owner's absent case entirely.
  RegionLabel tight{1, 4, 1};
  OccurrenceList all_narrow = build_gap_stamps({tight}, {{2, 3, 2}}, false, 0,
                                               StampMode::DropDegenerate);
  REQUIRE(all_narrow.size() == 2);
  CHECK(all_narrow[0].region.start == 1);
  CHECK(all_narrow[1].region.start == 3);
}

TEST_CASE("coverage checking accepts a sound list") {
  DocTree doc = parse_document("<A><B/><C/></A>");
  AnnotatedDataGuide dg = build_dataguide(doc);
  OccurrenceSeq alpha = eval_strict_path(dg, {"A"});
  OccurrenceSeq beta = eval_strict_path(dg, {"A", "B"});
  OccurrenceList list = eval_pref_path(dg, pref_path({"A", "B"}));
  CHECK(verify_pseudo_coverage(doc, alpha, beta, list).empty());
}

TEST_CASE("coverage checking flags uncovered children and greedy stamps") {
  DocTree doc = parse_document("<A><B/><C/></A>");
  AnnotatedDataGuide dg = build_dataguide(doc);
  OccurrenceSeq alpha = eval_strict_path(dg, {"A"});
  OccurrenceSeq beta = eval_strict_path(dg, {"A", "B"});
  RegionLabel a{1, 6, 1};
  RegionLabel b{2, 3, 2};

  // Dropping the stamp after B leaves the C child orphaned.
  OccurrenceList missing = {stamp(1, 2, a), real(b)};
  auto v1 = verify_pseudo_coverage(doc, alpha, beta, missing);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0].find("covered by 0 stamps") != std::string::npos);

  // A stamp spanning the whole parent strictly contains the real B.
  OccurrenceList greedy = {stamp(1, 6, a), real(b)};
  auto v2 = verify_pseudo_coverage(doc, alpha, beta, greedy);
  REQUIRE_FALSE(v2.empty());
  CHECK(v2[0].find("swallows real occurrence") != std::string::npos);

  // Unordered or overlapping stamps are reported as such.
  OccurrenceList unordered = {stamp(3, 6, a), stamp(1, 2, a), real(b)};
  bool saw_order = false;
  for (const std::string& v : verify_pseudo_coverage(doc, alpha, beta, unordered))
    if (v.find("out of order") != std::string::npos) saw_order = true;
  CHECK(saw_order);

  OccurrenceList overlapping = {stamp(1, 4, a), stamp(3, 6, a), real(b)};
  bool saw_overlap = false;
  for (const std::string& v :
       verify_pseudo_coverage(doc, alpha, beta, overlapping))
    if (v.find("overlapping stamps") != std::string::npos) saw_overlap = true;
  CHECK(saw_overlap);
}

TEST_CASE("list assignment covers every tag of a rewritten query") {
  AnnotatedDataGuide dg = guide_of(kMixedDoc);
  PrefPathTree t = rewrite(flatten_query(parse_query("/A[B!/C]/D/E")));
  EvaluatedTree et = assign_lists(dg, t);
  REQUIRE(et.nodes.size() == 4);

  const EvaluatedNode& a = et.nodes[0];
  CHECK_FALSE(a.is_pref);
  REQUIRE(a.reals.size() == 3);
  CHECK(a.reals[0] == RegionLabel{1, 32, 1});
  CHECK(a.reals[1] == RegionLabel{6, 17, 2});
  CHECK(a.reals[2] == RegionLabel{24, 31, 2});
  CHECK(a.artifact.size() == 3);

  const EvaluatedNode& b = et.nodes[1];
  CHECK(b.is_pref);
  CHECK(b.strict_steps == 0);
  REQUIRE(b.reals.size() == 2);
  CHECK(b.reals[0] == RegionLabel{9, 12, 3});
  CHECK(b.reals[1] == RegionLabel{29, 30, 3});
  REQUIRE(b.owners.size() == 3);
  for (const PseudoOwner& o : b.owners) CHECK(o.rel == OwnerRel::Parent);
  CHECK(b.owners[0].region == RegionLabel{1, 32, 1});
  CHECK(b.owners[1].region == RegionLabel{6, 17, 2});
  CHECK(b.owners[2].region == RegionLabel{24, 31, 2});
  CHECK(render_list(b.artifact) ==
        "eps(1,6)@(1,32,1) eps(6,9)@(6,17,2) (9,12,3) eps(12,17)@(6,17,2) "
        "eps(17,24)@(1,32,1) eps(24,29)@(24,31,2) (29,30,3)");

  const EvaluatedNode& c = et.nodes[2];
  CHECK(c.src->is_relative);
  CHECK(c.edge == EdgeKind::ParentChild);
  CHECK(c.chains.size() == 2);  // under B and, for the absent case, under A
  REQUIRE(c.reals.size() == 5);
  CHECK(c.reals[0] == RegionLabel{7, 8, 3});
  CHECK(c.reals[1] == RegionLabel{10, 11, 4});
  CHECK(c.reals[2] == RegionLabel{18, 19, 2});
  CHECK(c.reals[3] == RegionLabel{25, 26, 3});
  CHECK(c.reals[4] == RegionLabel{27, 28, 3});

  const EvaluatedNode& de = et.nodes[3];
  CHECK_FALSE(de.is_pref);
  CHECK(de.strict_steps == 2);
  REQUIRE(de.reals.size() == 3);
  CHECK(de.reals[0] == RegionLabel{3, 4, 3});
  CHECK(de.reals[1] == RegionLabel{14, 15, 4});
  CHECK(de.reals[2] == RegionLabel{21, 22, 3});
}

TEST_CASE("descendant tags evaluate as bare suffixes") {
  AnnotatedDataGuide dg = guide_of(kMixedDoc);
  PrefPathTree t = rewrite(flatten_query(parse_query("A//B")));
  EvaluatedTree et = assign_lists(dg, t);
  REQUIRE(et.nodes.size() == 2);
  CHECK(et.nodes[1].edge == EdgeKind::AncestorDescendant);
  CHECK(et.nodes[1].reals == eval_suffix_path(dg, {"B"}));
}

TEST_CASE("a preference root is owned by the document itself") {
  AnnotatedDataGuide dg = guide_of("<A><B/></A>");
  PrefPathTree t = rewrite(flatten_query(parse_query("X!")));
  EvaluatedTree et = assign_lists(dg, t);
  REQUIRE(et.nodes.size() == 1);
  const EvaluatedNode& x = et.nodes[0];
  CHECK(x.is_pref);
  CHECK(x.reals.empty());
  REQUIRE(x.owners.size() == 1);
  CHECK(x.owners[0].rel == OwnerRel::WholeDocument);
  // Two elements tick the counter to 4, so the document span is (0,5).
  REQUIRE(x.artifact.size() == 1);
  CHECK(render_occurrence(x.artifact[0]) == "eps(0,5)@document");
}

TEST_CASE("random preference paths always satisfy the coverage rules") {
  std::mt19937_64 rng(20260816);
  GenLimits limits;
  limits.max_doc_nodes = 120;
  int checked = 0;
  for (int round = 0; round < 60; ++round) {
    DocTree doc = parse_document(random_document(rng, limits));
    AnnotatedDataGuide dg = build_dataguide(doc);
    for (const auto& [key, occs] : dg.entries) {
      if (key.size() < 2) continue;
      if (rng() % 3 != 0) continue;
      PrefPathQuery p = pref_path(std::vector<std::string>(key));
      OccurrenceList list = eval_pref_path(dg, p);
      PathKey prefix(key.begin(), key.end() - 1);
      OccurrenceSeq alpha = eval_strict_path(dg, prefix);
      auto violations = verify_pseudo_coverage(doc, alpha, occs, list);
      if (!violations.empty()) {
        CAPTURE(path_to_string(key));
        CAPTURE(violations[0]);
        REQUIRE(violations.empty());
      }
      // Pseudo entries never overlap and the merged list is start-sorted.
      uint32_t prev_start = 0;
      for (const Occurrence& o : list) {
        CHECK(o.region.start >= prev_start);
        prev_start = o.region.start;
      }
      ++checked;
    }
  }
  CHECK(checked > 40);
}
