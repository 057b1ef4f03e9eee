#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <sstream>
#include <string>

#include "prefq/dataguide.hpp"
#include "prefq/doc_model.hpp"
#include "prefq/random_gen.hpp"

using namespace prefq;

namespace {

AnnotatedDataGuide guide_of(const std::string& xml) {
  return build_dataguide(parse_document(xml));
}

// Exhaustive label-path walk, the independent reference for build_dataguide.
std::map<PathKey, OccurrenceSeq> walk_paths(const DocTree& doc) {
  std::map<PathKey, OccurrenceSeq> out;
  for (size_t i = 0; i < doc.nodes.size(); ++i) {
    PathKey key;
    std::vector<int> chain;
    for (int cur = static_cast<int>(i); cur >= 0;
         cur = doc.nodes[static_cast<size_t>(cur)].parent)
      chain.push_back(cur);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      key.push_back(doc.nodes[static_cast<size_t>(*it)].label);
    out[key].push_back(doc.nodes[i].region);
  }
  return out;
}

}  // namespace

TEST_CASE("one entry per distinct path, occurrences in start order") {
  AnnotatedDataGuide dg = guide_of("<A><B/><C/></A>");
  REQUIRE(dg.entries.size() == 3);
  CHECK(dg.entries.at({"A"}) == OccurrenceSeq{{1, 6, 1}});
  CHECK(dg.entries.at({"A", "B"}) == OccurrenceSeq{{2, 3, 2}});
  CHECK(dg.entries.at({"A", "C"}) == OccurrenceSeq{{4, 5, 2}});
  CHECK(dg.root_label == "A");
  CHECK(dg.node_count == 3);
}

TEST_CASE("repeated paths collect all occurrences") {
  AnnotatedDataGuide dg = guide_of("<A><B/><B/><A><B/></A></A>");
  REQUIRE(dg.entries.size() == 4);
  CHECK(dg.entries.at({"A"}) == OccurrenceSeq{{1, 10, 1}});
  CHECK(dg.entries.at({"A", "B"}) == OccurrenceSeq{{{2, 3, 2}, {4, 5, 2}}});
  CHECK(dg.entries.at({"A", "A"}) == OccurrenceSeq{{6, 9, 2}});
  CHECK(dg.entries.at({"A", "A", "B"}) == OccurrenceSeq{{7, 8, 3}});
}

TEST_CASE("single-node document") {
  AnnotatedDataGuide dg = guide_of("<A/>");
  REQUIRE(dg.entries.size() == 1);
  CHECK(dg.entries.at({"A"}) == OccurrenceSeq{{1, 2, 1}});
}

TEST_CASE("strict path lookup returns the entry or nothing") {
  AnnotatedDataGuide dg = guide_of("<A><B/><B/><A><B/></A></A>");
  CHECK(eval_strict_path(dg, {"A", "B"}) ==
        OccurrenceSeq{{{2, 3, 2}, {4, 5, 2}}});
  CHECK(eval_strict_path(dg, {"A", "X"}).empty());
  CHECK(eval_strict_path(guide_of("<A><B/><C/></A>"), {"A"}) ==
        OccurrenceSeq{{1, 6, 1}});
}

TEST_CASE("suffix lookup merges every key ending with the suffix") {
  AnnotatedDataGuide dg = guide_of("<A><B/><B/><A><B/></A></A>");
  CHECK(eval_suffix_path(dg, {"B"}) ==
        OccurrenceSeq{{{2, 3, 2}, {4, 5, 2}, {7, 8, 3}}});
  // A/B is a suffix of both A/B and A/A/B.
  CHECK(eval_suffix_path(dg, {"A", "B"}) ==
        OccurrenceSeq{{{2, 3, 2}, {4, 5, 2}, {7, 8, 3}}});
  CHECK(eval_suffix_path(dg, {"Z"}).empty());
}

TEST_CASE("index file format is stable and readable") {
  AnnotatedDataGuide dg = guide_of("<A><B/><C/></A>");
  std::ostringstream out;
  save_index(dg, out);
  CHECK(out.str() ==
        "PREFQ-IDX v1 root=A nodes=3\n"
        "A\t1,6,1\n"
        "A/B\t2,3,2\n"
        "A/C\t4,5,2\n");
}

TEST_CASE("save and load round-trip is the identity") {
  AnnotatedDataGuide dg = guide_of("<A><B/><B/><A><B/></A></A>");
  std::ostringstream out;
  save_index(dg, out);
  std::istringstream in(out.str());
  AnnotatedDataGuide back = load_index(in);
  CHECK(back == dg);
}

TEST_CASE("load failures carry distinct error kinds") {
  auto kind_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      load_index(in);
    } catch (const IndexError& e) {
      return e.kind;
    }
    FAIL("expected an index error");
    return IndexErrorKind::EmptyIndex;
  };
  CHECK(kind_of("") == IndexErrorKind::EmptyIndex);
  CHECK(kind_of("SOMETHING v1 root=A nodes=1\nA\t1,2,1\n") ==
        IndexErrorKind::VersionMismatch);
  CHECK(kind_of("PREFQ-IDX v2 root=A nodes=1\nA\t1,2,1\n") ==
        IndexErrorKind::VersionMismatch);
  CHECK(kind_of("PREFQ-IDX v1 root=A nodes=2\nA\t1,4,1\n") ==
        IndexErrorKind::Truncated);
  CHECK(kind_of("PREFQ-IDX v1 root=A nodes=1\nA 1,2,1\n") ==
        IndexErrorKind::MalformedLine);
  CHECK(kind_of("PREFQ-IDX v1 root=A nodes=1\nA\tbogus\n") ==
        IndexErrorKind::MalformedLine);
  CHECK(kind_of("PREFQ-IDX v1 root=A nodes=3\nA\t1,6,1\nA/B\t4,5,2;2,3,2\n") ==
        IndexErrorKind::UnsortedOccurrences);
}

TEST_CASE("guide agrees with exhaustive path walking on random documents") {
  std::mt19937_64 rng(20260816);
  GenLimits lim;
  lim.max_doc_nodes = 500;
  for (int round = 0; round < 60; ++round) {
    DocTree doc = parse_document(random_document(rng, lim));
    AnnotatedDataGuide dg = build_dataguide(doc);
    std::map<PathKey, OccurrenceSeq> expected = walk_paths(doc);
    CHECK(dg.entries == expected);
    size_t total = 0;
    bool sorted = true;
    for (const auto& [key, occs] : dg.entries) {
      total += occs.size();
      for (size_t i = 0; i + 1 < occs.size(); ++i)
        if (occs[i].start >= occs[i + 1].start) sorted = false;
      for (const auto& r : occs)
        if (r.level != key.size()) sorted = false;
    }
    CHECK(sorted);
    CHECK(total == doc.node_count());

    std::ostringstream out;
    save_index(dg, out);
    std::istringstream in(out.str());
    CHECK(load_index(in) == dg);
  }
}

TEST_CASE("atlas recovers parents from the occurrence union") {
  AnnotatedDataGuide dg = guide_of("<A><B/><B/><A><B/></A></A>");
  DocAtlas atlas(dg);
  RegionLabel up;
  REQUIRE(atlas.parent_of({7, 8, 3}, up));
  CHECK(up == RegionLabel{6, 9, 2});
  REQUIRE(atlas.parent_of({6, 9, 2}, up));
  CHECK(up == RegionLabel{1, 10, 1});
  CHECK_FALSE(atlas.parent_of({1, 10, 1}, up));
  CHECK(atlas.ancestor_at({7, 8, 3}, 0) == RegionLabel{7, 8, 3});
  CHECK(atlas.ancestor_at({7, 8, 3}, 2) == RegionLabel{1, 10, 1});
  CHECK_THROWS_AS(atlas.ancestor_at({7, 8, 3}, 3), std::out_of_range);
  CHECK_THROWS_AS(atlas.ancestor_at({100, 101, 1}, 1), std::out_of_range);
}
