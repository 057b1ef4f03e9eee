#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefq/dataguide.hpp"
#include "prefq/holistic.hpp"
#include "prefq/pref_path_eval.hpp"
#include "prefq/query.hpp"
#include "prefq/skyline.hpp"

namespace prefq {

struct EngineOptions {
  DominanceMode mode = DominanceMode::FlagVector;
  bool with_lists = false;
  bool inject_bug = false;  // testing hook: forget absence contexts so the
                            // selftest has a real defect to catch
};

struct ListView {
  std::string tag;
  bool relative = false;
  std::vector<std::string> entries;
};

struct PhaseTimings {
  double rewrite_ms = 0;
  double lists_ms = 0;
  double match_ms = 0;
  double skyline_ms = 0;
};

struct QueryRun {
  FlatQuery flat;                     // original query, preorder ids
  std::vector<std::string> warnings;  // advisory validation notes
  std::string rewritten;              // rendered rewritten tree
  PreferenceTable candidates;         // full table, ordered and deduped
  std::vector<CandidateRow> answers;  // skyline survivors, table order
  MatchStats stats;
  std::vector<ListView> lists;  // built when with_lists is set
  PhaseTimings timings;
};

// Full pipeline over a prebuilt index: parse, rewrite, build runtime lists,
// match, filter.  Throws QueryError for unparseable queries and
// InternalError when a pipeline invariant breaks.
QueryRun run_query(const AnnotatedDataGuide& dg, const std::string& query_text,
                   const EngineOptions& opt = {});

// Readable one-line rendering of a row, for diagnostics.
std::string render_row(const FlatQuery& fq, const CandidateRow& row);

struct SelftestOutcome {
  int trials_run = 0;
  bool ok = true;
  std::string doc_xml;     // minimized counterexample, when !ok
  std::string query_text;  // minimized counterexample, when !ok
  std::string detail;      // what diverged
};

// Randomized equivalence suite: engine versus the reference evaluator on
// generated documents and queries.  Stops at the first divergence and
// greedily minimizes it.
SelftestOutcome run_selftest(uint64_t seed, int trials, bool inject_bug = false);

}  // namespace prefq
