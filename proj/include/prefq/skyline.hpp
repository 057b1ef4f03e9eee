#pragma once

#include <vector>

#include "prefq/holistic.hpp"

namespace prefq {

enum class DominanceMode {
  FlagVector,         // componentwise flag comparison only
  StrictFieldsEqual,  // flags, but only between rows that agree on every
                      // non-preference binding
};

// True when `a` beats `b`: a's presence flags are componentwise at least
// b's and strictly better somewhere (plus equal strict bindings in
// StrictFieldsEqual mode).  Rows of different widths cannot be compared.
bool dominates(const PreferenceTable& table, const CandidateRow& a,
               const CandidateRow& b, DominanceMode mode);

// Block-nested-loop skyline: keeps exactly the rows no other row dominates,
// in their original order.
std::vector<CandidateRow> skyline_filter(const PreferenceTable& table,
                                         DominanceMode mode);

}  // namespace prefq
