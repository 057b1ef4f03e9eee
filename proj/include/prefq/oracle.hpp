#pragma once

#include <vector>

#include "prefq/doc_model.hpp"
#include "prefq/holistic.hpp"
#include "prefq/query.hpp"
#include "prefq/skyline.hpp"

namespace prefq {

// Reference evaluator: walks the document tree directly (no index, no
// rewriting) and enumerates every consistent assignment.  A preference node
// may bind or stay absent; an absent node passes its positional constraint
// through to its children, widening parent-of to ancestor-of across any
// descendant edge.  Rows come back deduplicated and in the same order the
// engine uses.
PreferenceTable oracle_candidates(const DocTree& doc, const FlatQuery& fq);

// Reference skyline, written as a plain all-pairs scan so it shares no code
// with the production filter.
std::vector<CandidateRow> oracle_skyline(const PreferenceTable& table,
                                         DominanceMode mode);

// Second reference evaluator for queries without preference nodes: a
// memoized bottom-up structural join.  Throws std::invalid_argument when
// the query has preference nodes.
std::vector<CandidateRow> structural_rows(const DocTree& doc,
                                          const FlatQuery& fq);

}  // namespace prefq
