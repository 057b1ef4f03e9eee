#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "prefq/dataguide.hpp"
#include "prefq/doc_model.hpp"
#include "prefq/holistic.hpp"
#include "prefq/oracle.hpp"
#include "prefq/pref_path_eval.hpp"
#include "prefq/query.hpp"
#include "prefq/random_gen.hpp"
#include "prefq/rewriter.hpp"

using namespace prefq;

namespace {

const char* kMixedDoc =
    "<A><D><E/></D><A><C/><B><C/></B><D><E/></D></A><C/><D><E/></D>"
    "<A><C/><C/><B/></A></A>";

std::pair<PreferenceTable, MatchStats> run_match(const std::string& xml,
                                                 const std::string& query) {
  DocTree doc = parse_document(xml);
  AnnotatedDataGuide dg = build_dataguide(doc);
  FlatQuery fq = flatten_query(parse_query(query));
  EvaluatedTree et = assign_lists(dg, rewrite(fq));
  DocAtlas atlas(dg);
  MatchStats stats;
  PreferenceTable table = holistic_match(
      et, fq, atlas, static_cast<uint32_t>(dg.node_count) * 2, &stats);
  return {std::move(table), stats};
}

RegionLabel at(uint32_t s, uint32_t e, uint32_t l) { return {s, e, l}; }

void expect_row(const CandidateRow& row,
                const std::vector<std::optional<RegionLabel>>& want) {
  REQUIRE(row.bindings.size() == want.size());
  for (size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(row.bindings[i] == want[i]);
  }
}

EffEntry real_entry(RegionLabel r, RegionLabel first_step) {
  EffEntry e;
  e.s = r.start;
  e.e = r.end;
  e.real = true;
  e.region = r;
  e.first_step = first_step;
  e.has_first_step = true;
  return e;
}

EffEntry context_entry(RegionLabel owner, OwnerRel rel) {
  EffEntry e;
  e.s = owner.start;
  e.e = owner.end;
  e.region = owner;
  e.rel = rel;
  return e;
}

EffEntry whole_doc_entry(uint32_t doc_span_end) {
  EffEntry e;
  e.whole_doc = true;
  e.s = 0;
  e.e = doc_span_end + 1;
  e.region = {0, doc_span_end + 1, 0};
  e.rel = OwnerRel::WholeDocument;
  return e;
}

}  // namespace

TEST_CASE("edge checks relate real bindings through first steps") {
  EvaluatedNode plain;  // one strict step
  plain.strict_steps = 1;
  RegionLabel a{1, 6, 1}, b{2, 5, 2}, c{3, 4, 3};

  EffEntry p = real_entry(a, a);
  CHECK(check_edge(plain, p, plain, real_entry(b, b), EdgeKind::ParentChild));
  CHECK_FALSE(
      check_edge(plain, p, plain, real_entry(c, c), EdgeKind::ParentChild));
  CHECK(check_edge(plain, p, plain, real_entry(c, c),
                   EdgeKind::AncestorDescendant));
  // A two-step child tag is judged by where its first step binds.
  CHECK(check_edge(plain, p, plain, real_entry(c, b), EdgeKind::ParentChild));
}

TEST_CASE("edge checks compose through absent preference steps") {
  EvaluatedNode plain;
  plain.strict_steps = 1;
  EvaluatedNode pure_pref;  // a lone preference step
  pure_pref.is_pref = true;
  pure_pref.strict_steps = 0;
  RegionLabel a{1, 6, 1}, b{2, 5, 2}, c{3, 4, 3};

  // Parent entry is an absence context: parent-of composes with the edge,
  // ancestor-of swallows it.
  EffEntry ctx_parent = context_entry(a, OwnerRel::Parent);
  EffEntry ctx_anc = context_entry(a, OwnerRel::Ancestor);
  CHECK(check_edge(pure_pref, ctx_parent, plain, real_entry(b, b),
                   EdgeKind::ParentChild));
  CHECK_FALSE(check_edge(pure_pref, ctx_parent, plain, real_entry(c, c),
                         EdgeKind::ParentChild));
  CHECK(check_edge(pure_pref, ctx_anc, plain, real_entry(c, c),
                   EdgeKind::ParentChild));
  CHECK(check_edge(pure_pref, ctx_parent, plain, real_entry(c, c),
                   EdgeKind::AncestorDescendant));

  // A document-owned context accepts any concrete child.
  EffEntry whole = whole_doc_entry(6);
  CHECK(check_edge(pure_pref, whole, plain, real_entry(a, a),
                   EdgeKind::ParentChild));

  // A pure-context child must inherit exactly the owner the parent entry
  // stands on.
  EffEntry child_ctx = context_entry(a, OwnerRel::Parent);
  CHECK(check_edge(plain, real_entry(a, a), pure_pref, child_ctx,
                   EdgeKind::ParentChild));
  CHECK_FALSE(check_edge(plain, real_entry(b, b), pure_pref, child_ctx,
                         EdgeKind::ParentChild));
  CHECK_FALSE(check_edge(pure_pref, whole, pure_pref, child_ctx,
                         EdgeKind::ParentChild));
  CHECK(check_edge(pure_pref, whole, pure_pref, whole_doc_entry(6),
                   EdgeKind::ParentChild));
  CHECK_FALSE(check_edge(plain, real_entry(a, a), pure_pref, whole_doc_entry(6),
                         EdgeKind::ParentChild));

  // A pseudo entry of a tag with strict steps still has a concrete first
  // step and is judged like a real binding.
  EvaluatedNode strict_then_pref;
  strict_then_pref.is_pref = true;
  strict_then_pref.strict_steps = 1;
  EffEntry owner_b = context_entry(b, OwnerRel::Parent);
  owner_b.first_step = b;
  owner_b.has_first_step = true;
  CHECK(check_edge(plain, real_entry(a, a), strict_then_pref, owner_b,
                   EdgeKind::ParentChild));
}

TEST_CASE("streams interleave real bindings with absence contexts") {
  DocTree doc = parse_document(kMixedDoc);
  AnnotatedDataGuide dg = build_dataguide(doc);
  FlatQuery fq = flatten_query(parse_query("/A[B!/C]/D/E"));
  EvaluatedTree et = assign_lists(dg, rewrite(fq));
  DocAtlas atlas(dg);
  auto streams = build_streams(et, atlas, 32);
  REQUIRE(streams.size() == 4);

  CHECK(streams[0].entries.size() == 3);  // three A contexts
  REQUIRE(streams[1].entries.size() == 5);  // two real B, three owners
  CHECK_FALSE(streams[1].entries[0].real);
  CHECK(streams[1].entries[0].region == at(1, 32, 1));
  CHECK_FALSE(streams[1].entries[1].real);
  CHECK(streams[1].entries[1].region == at(6, 17, 2));
  CHECK(streams[1].entries[2].real);
  CHECK(streams[1].entries[2].region == at(9, 12, 3));
  CHECK_FALSE(streams[1].entries[3].real);
  CHECK(streams[1].entries[4].real);
  CHECK(streams[1].entries[4].region == at(29, 30, 3));

  CHECK(streams[2].entries.size() == 5);  // every C reachable either way

  // The two-step tag D/E binds E but sorts and joins through its D head.
  REQUIRE(streams[3].entries.size() == 3);
  CHECK(streams[3].entries[0].region == at(3, 4, 3));
  CHECK(streams[3].entries[0].first_step == at(2, 5, 2));
  CHECK(streams[3].entries[1].first_step == at(13, 16, 3));
  CHECK(streams[3].entries[2].first_step == at(20, 23, 2));
}

TEST_CASE("the full pipeline finds every candidate of the running example") {
  auto [table, stats] = run_match(kMixedDoc, "/A[B!/C]/D/E");
  REQUIRE(table.pref_columns == std::vector<int>{1});
  REQUIRE(table.rows.size() == 4);

  expect_row(table.rows[0], {at(1, 32, 1), std::nullopt, at(18, 19, 2),
                             at(2, 5, 2), at(3, 4, 3)});
  expect_row(table.rows[1], {at(1, 32, 1), std::nullopt, at(18, 19, 2),
                             at(20, 23, 2), at(21, 22, 3)});
  expect_row(table.rows[2], {at(6, 17, 2), at(9, 12, 3), at(10, 11, 4),
                             at(13, 16, 3), at(14, 15, 4)});
  expect_row(table.rows[3], {at(6, 17, 2), std::nullopt, at(7, 8, 3),
                             at(13, 16, 3), at(14, 15, 4)});

  std::vector<bool> flags;
  for (const CandidateRow& row : table.rows)
    flags.push_back(row_flags(table, row)[0]);
  CHECK(flags == std::vector<bool>{false, false, true, false});

  CHECK(stats.effective_entries == 16);
  CHECK(stats.artifact_entries == 18);
  // Five path matches reach the preference leaf and three reach the E leaf,
  // but the two under the childless third A context are pruned before the
  // join ever sees them: by then the E stream is exhausted.
  CHECK(stats.path_solutions == 6);
  CHECK(stats.advances > 0);
  CHECK(stats.advances <= stats.effective_entries);
}

TEST_CASE("an absent preference step hands its place to the child") {
  auto [table, stats] = run_match("<A><C/></A>", "A[B!/C]");
  REQUIRE(table.rows.size() == 1);
  expect_row(table.rows[0], {at(1, 4, 1), std::nullopt, at(2, 3, 2)});
  CHECK(row_flags(table, table.rows[0]) == std::vector<bool>{false});
}

TEST_CASE("branches must join on a common ancestor binding") {
  auto [table, stats] =
      run_match("<X><A><B/></A><A><C/></A></X>", "A[B][C]");
  CHECK(table.rows.empty());
  CHECK(table.pref_columns.empty());

  auto [joined, stats2] =
      run_match("<X><A><B/><C/></A><A><C/></A></X>", "A[B][C]");
  REQUIRE(joined.rows.size() == 1);
  expect_row(joined.rows[0], {at(2, 7, 2), at(3, 4, 3), at(5, 6, 3)});
}

TEST_CASE("queries without preference steps agree with a structural join") {
  DocTree doc = parse_document(kMixedDoc);
  AnnotatedDataGuide dg = build_dataguide(doc);
  for (std::string q : {"A", "A/D/E", "A[C]/D", "A//C", "A[B/C][D/E]",
                        "A//B/C", "D[E]", "A[C][B]//E"}) {
    CAPTURE(q);
    FlatQuery fq = flatten_query(parse_query(q));
    EvaluatedTree et = assign_lists(dg, rewrite(fq));
    DocAtlas atlas(dg);
    PreferenceTable table = holistic_match(et, fq, atlas, 32, nullptr);
    std::vector<CandidateRow> ref = structural_rows(doc, fq);
    REQUIRE(table.rows.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i) CHECK(table.rows[i] == ref[i]);
  }
}

TEST_CASE("random documents and queries agree with the reference evaluator") {
  std::mt19937_64 rng(424242);
  GenLimits limits;
  limits.max_doc_nodes = 60;
  limits.max_query_nodes = 6;
  int nonempty = 0;
  for (int trial = 0; trial < 150; ++trial) {
    std::string xml = random_document(rng, limits);
    std::string qtext = random_query(rng, limits);
    CAPTURE(xml);
    CAPTURE(qtext);
    DocTree doc = parse_document(xml);
    AnnotatedDataGuide dg = build_dataguide(doc);
    FlatQuery fq = flatten_query(parse_query(qtext));
    EvaluatedTree et = assign_lists(dg, rewrite(fq));
    DocAtlas atlas(dg);
    PreferenceTable got = holistic_match(
        et, fq, atlas, static_cast<uint32_t>(dg.node_count) * 2, nullptr);
    PreferenceTable want = oracle_candidates(doc, fq);
    REQUIRE(got.rows.size() == want.rows.size());
    for (size_t i = 0; i < got.rows.size(); ++i) {
      CAPTURE(i);
      CHECK(got.rows[i] == want.rows[i]);
    }
    if (!got.rows.empty()) ++nonempty;
  }
  CHECK(nonempty > 20);
}
