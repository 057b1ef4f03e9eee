#include "prefq/skyline.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace prefq {

bool dominates(const PreferenceTable& table, const CandidateRow& a,
               const CandidateRow& b, DominanceMode mode) {
  if (a.bindings.size() != b.bindings.size())
    throw std::invalid_argument("cannot compare rows of different widths");
  if (mode == DominanceMode::StrictFieldsEqual) {
    std::set<int> pref(table.pref_columns.begin(), table.pref_columns.end());
    for (size_t q = 0; q < a.bindings.size(); ++q) {
      if (pref.count(static_cast<int>(q))) continue;
      if (a.bindings[q] != b.bindings[q]) return false;
    }
  }
  bool strictly_better = false;
  for (int qid : table.pref_columns) {
    bool fa = a.bindings[static_cast<size_t>(qid)].has_value();
    bool fb = b.bindings[static_cast<size_t>(qid)].has_value();
    if (fb && !fa) return false;
    if (fa && !fb) strictly_better = true;
  }
  return strictly_better;
}

namespace {

// Dominance never crosses rows that disagree on a strict column, and within
// such a group it reads nothing but the presence flags.  Rows therefore fall
// into at most 2^|prefs| classes per group, and a row survives exactly when
// no other class in its group beats its flag pattern.
struct RowClass {
  std::vector<uint32_t> key;  // strict-column bindings (empty in flag mode)
  std::vector<bool> pattern;  // presence flag per preference column
};

RowClass classify(const PreferenceTable& table, const CandidateRow& row,
                  const std::vector<bool>& is_pref, DominanceMode mode) {
  RowClass c;
  if (mode == DominanceMode::StrictFieldsEqual) {
    for (size_t q = 0; q < row.bindings.size(); ++q) {
      if (is_pref[q]) continue;
      const std::optional<RegionLabel>& b = row.bindings[q];
      c.key.push_back(b.has_value() ? 1u : 0u);
      c.key.push_back(b ? b->start : 0u);
      c.key.push_back(b ? b->end : 0u);
      c.key.push_back(b ? b->level : 0u);
    }
  }
  for (int qid : table.pref_columns)
    c.pattern.push_back(row.bindings[static_cast<size_t>(qid)].has_value());
  return c;
}

bool pattern_beats(const std::vector<bool>& a, const std::vector<bool>& b) {
  bool strictly_better = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (b[i] && !a[i]) return false;
    if (a[i] && !b[i]) strictly_better = true;
  }
  return strictly_better;
}

}  // namespace

std::vector<CandidateRow> skyline_filter(const PreferenceTable& table,
                                         DominanceMode mode) {
  if (table.rows.empty()) return {};
  size_t width = table.rows[0].bindings.size();
  for (const CandidateRow& r : table.rows)
    if (r.bindings.size() != width)
      throw std::invalid_argument("cannot compare rows of different widths");

  std::vector<bool> is_pref(width, false);
  for (int qid : table.pref_columns) is_pref[static_cast<size_t>(qid)] = true;

  std::map<std::vector<uint32_t>, std::set<std::vector<bool>>> groups;
  for (const CandidateRow& r : table.rows) {
    RowClass c = classify(table, r, is_pref, mode);
    groups[std::move(c.key)].insert(std::move(c.pattern));
  }

  std::map<std::vector<uint32_t>, std::set<std::vector<bool>>> winners;
  for (const auto& [key, patterns] : groups) {
    std::set<std::vector<bool>>& top = winners[key];
    for (const std::vector<bool>& p : patterns) {
      bool beaten = false;
      for (const std::vector<bool>& q : patterns)
        if (pattern_beats(q, p)) {
          beaten = true;
          break;
        }
      if (!beaten) top.insert(p);
    }
  }

  std::vector<CandidateRow> out;
  for (const CandidateRow& r : table.rows) {
    RowClass c = classify(table, r, is_pref, mode);
    if (winners[c.key].count(c.pattern)) out.push_back(r);
  }
  return out;
}

}  // namespace prefq
