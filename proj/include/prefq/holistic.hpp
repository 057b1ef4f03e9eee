#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prefq/dataguide.hpp"
#include "prefq/pref_path_eval.hpp"
#include "prefq/query.hpp"

namespace prefq {

// Stream entry as the matcher sees it.  Real entries keep their own region;
// a pseudo entry stands for "the preference step is absent below this owner"
// and spans the owner's whole interval, so stack containment still works.
struct EffEntry {
  uint32_t s = 0;
  uint32_t e = 0;
  bool real = false;
  bool whole_doc = false;  // pseudo owned by the document itself
  RegionLabel region;      // real binding, or the owner region
  OwnerRel rel = OwnerRel::Parent;  // pseudo only
  RegionLabel first_step;  // binding of the tag's first step, when one exists
  bool has_first_step = false;
};

struct EffectiveStream {
  std::vector<EffEntry> entries;  // sorted by (s asc, e desc, real first)
};

// Structural test for one rewritten-tree edge between a parent-stream entry
// and a child-stream entry.  Handles every real/pseudo combination,
// composing edges through absent preference steps.
bool check_edge(const EvaluatedNode& parent_node, const EffEntry& p,
                const EvaluatedNode& child_node, const EffEntry& t,
                EdgeKind kind);

std::vector<EffectiveStream> build_streams(const EvaluatedTree& tree,
                                           const DocAtlas& atlas,
                                           uint32_t doc_span_end);

// Root-to-leaf matches found by the stack phase.
struct PathSolutions {
  std::vector<int> leaf_nodes;                 // tree node ids, left to right
  std::vector<std::vector<int>> node_path;     // per leaf: root..leaf node ids
  std::vector<std::vector<std::vector<int>>> sols;  // per leaf: entry indices
};

struct MatchStats {
  uint64_t advances = 0;           // stream cursor moves in the stack phase
  uint64_t effective_entries = 0;  // total stream length
  uint64_t artifact_entries = 0;   // total display-list length
  uint64_t path_solutions = 0;
};

PathSolutions enumerate_path_solutions(const EvaluatedTree& tree,
                                       const std::vector<EffectiveStream>& streams,
                                       MatchStats& stats);

// One candidate answer: a document binding per strict query node, an
// optional one per preference node.
struct CandidateRow {
  std::vector<std::optional<RegionLabel>> bindings;  // by query preorder id

  friend bool operator==(const CandidateRow&, const CandidateRow&) = default;
};

struct PreferenceTable {
  std::vector<int> pref_columns;  // preference node ids, query preorder
  std::vector<CandidateRow> rows;
};

std::vector<bool> row_flags(const PreferenceTable& table, const CandidateRow& row);

// Joins per-leaf path solutions on their shared prefixes, expands each full
// solution into query-node bindings, deduplicates, and orders rows by the
// binding start values in query preorder (absent preference bindings sort
// last).
PreferenceTable merge_path_solutions(const EvaluatedTree& tree,
                                     const std::vector<EffectiveStream>& streams,
                                     const PathSolutions& paths,
                                     const FlatQuery& fq, const DocAtlas& atlas);

PreferenceTable holistic_match(const EvaluatedTree& tree, const FlatQuery& fq,
                               const DocAtlas& atlas, uint32_t doc_span_end,
                               MatchStats* stats);

}  // namespace prefq
