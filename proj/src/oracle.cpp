#include "prefq/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "prefq/region.hpp"

namespace prefq {

namespace {

enum class Rel { Anywhere, ChildOf, DescendantOf };

struct Constraint {
  Rel rel = Rel::Anywhere;
  int anchor = -1;  // document node index
};

Constraint bind_constraint(int doc_node, EdgeKind edge) {
  return {edge == EdgeKind::ParentChild ? Rel::ChildOf : Rel::DescendantOf,
          doc_node};
}

// Constraint seen by the children of an absent node: child-of survives a
// parent-child hop, anything else widens to descendant-of.
Constraint skip_constraint(const Constraint& c, EdgeKind edge) {
  if (c.rel == Rel::Anywhere) return c;
  if (c.rel == Rel::ChildOf && edge == EdgeKind::ParentChild) return c;
  return {Rel::DescendantOf, c.anchor};
}

struct Task {
  int qnode;
  Constraint constraint;
};

class Enumerator {
 public:
  Enumerator(const DocTree& doc, const FlatQuery& fq) : doc_(doc), fq_(fq) {}

  std::vector<CandidateRow> run() {
    CandidateRow row;
    row.bindings.resize(fq_.nodes.size());
    std::vector<Task> tasks{{0, {Rel::Anywhere, -1}}};
    solve(tasks, 0, row);
    return std::move(rows_);
  }

 private:
  bool satisfies(const Constraint& c, int v) const {
    switch (c.rel) {
      case Rel::Anywhere:
        return true;
      case Rel::ChildOf:
        return doc_.nodes[v].parent == c.anchor;
      case Rel::DescendantOf:
        return is_ancestor(doc_.nodes[c.anchor].region, doc_.nodes[v].region);
    }
    return false;
  }

  void solve(std::vector<Task>& tasks, size_t k, CandidateRow& row) {
    if (k == tasks.size()) {
      rows_.push_back(row);
      return;
    }
    Task task = tasks[k];
    const FlatQueryNode& q = fq_.nodes[task.qnode];
    for (size_t v = 0; v < doc_.nodes.size(); ++v) {
      if (doc_.nodes[v].label != q.label) continue;
      if (!satisfies(task.constraint, static_cast<int>(v))) continue;
      row.bindings[task.qnode] = doc_.nodes[v].region;
      size_t base = tasks.size();
      for (int child : q.children)
        tasks.push_back({child, bind_constraint(static_cast<int>(v),
                                                fq_.nodes[child].edge)});
      solve(tasks, k + 1, row);
      tasks.resize(base);
      row.bindings[task.qnode].reset();
    }
    if (q.is_preference) {
      size_t base = tasks.size();
      for (int child : q.children)
        tasks.push_back(
            {child, skip_constraint(task.constraint, fq_.nodes[child].edge)});
      solve(tasks, k + 1, row);
      tasks.resize(base);
    }
  }

  const DocTree& doc_;
  const FlatQuery& fq_;
  std::vector<CandidateRow> rows_;
};

void dedup_and_order(std::vector<CandidateRow>& rows) {
  constexpr uint64_t kAbsent = std::numeric_limits<uint64_t>::max();
  std::set<std::vector<uint32_t>> seen;
  std::vector<std::pair<std::vector<uint64_t>, CandidateRow>> keyed;
  for (auto& row : rows) {
    std::vector<uint32_t> id;
    std::vector<uint64_t> key;
    for (const auto& b : row.bindings) {
      id.push_back(b ? b->start : 0);
      key.push_back(b ? b->start : kAbsent);
    }
    if (!seen.insert(id).second) continue;
    keyed.emplace_back(std::move(key), std::move(row));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  rows.clear();
  for (auto& kv : keyed) rows.push_back(std::move(kv.second));
}

}  // namespace

PreferenceTable oracle_candidates(const DocTree& doc, const FlatQuery& fq) {
  PreferenceTable table;
  table.pref_columns = fq.preference_ids;
  table.rows = Enumerator(doc, fq).run();
  dedup_and_order(table.rows);
  return table;
}

std::vector<CandidateRow> oracle_skyline(const PreferenceTable& table,
                                         DominanceMode mode) {
  auto flag = [&](const CandidateRow& r) {
    std::vector<bool> f;
    for (int qid : table.pref_columns)
      f.push_back(r.bindings[static_cast<size_t>(qid)].has_value());
    return f;
  };
  auto strict_equal = [&](const CandidateRow& a, const CandidateRow& b) {
    std::set<int> pref(table.pref_columns.begin(), table.pref_columns.end());
    for (size_t q = 0; q < a.bindings.size(); ++q)
      if (!pref.count(static_cast<int>(q)) && a.bindings[q] != b.bindings[q])
        return false;
    return true;
  };
  auto dom = [&](const CandidateRow& a, const CandidateRow& b) {
    if (mode == DominanceMode::StrictFieldsEqual && !strict_equal(a, b))
      return false;
    std::vector<bool> fa = flag(a), fb = flag(b);
    bool better = false;
    for (size_t i = 0; i < fa.size(); ++i) {
      if (fb[i] && !fa[i]) return false;
      if (fa[i] && !fb[i]) better = true;
    }
    return better;
  };
  // dom(j, i) reads row j only through its strict-column bindings and its
  // presence flags, and never relates rows with different strict bindings.
  // One representative per (strict key, flag pattern) class in row i's own
  // key group therefore stands in for every other row: a class mate of i
  // itself can never dominate it, so keeping that representative is harmless.
  auto strict_key = [&](const CandidateRow& r) {
    std::set<int> pref(table.pref_columns.begin(), table.pref_columns.end());
    std::vector<uint32_t> key;
    if (mode != DominanceMode::StrictFieldsEqual) return key;
    for (size_t q = 0; q < r.bindings.size(); ++q) {
      if (pref.count(static_cast<int>(q))) continue;
      const std::optional<RegionLabel>& b = r.bindings[q];
      key.push_back(b.has_value() ? 1u : 0u);
      key.push_back(b ? b->start : 0u);
      key.push_back(b ? b->end : 0u);
      key.push_back(b ? b->level : 0u);
    }
    return key;
  };
  std::map<std::vector<uint32_t>, std::map<std::vector<bool>, size_t>> reps;
  for (size_t i = 0; i < table.rows.size(); ++i)
    reps[strict_key(table.rows[i])].emplace(flag(table.rows[i]), i);

  std::vector<CandidateRow> out;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    bool dominated = false;
    for (const auto& [pattern, j] : reps[strict_key(table.rows[i])])
      if (dom(table.rows[j], table.rows[i])) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(table.rows[i]);
  }
  return out;
}

std::vector<CandidateRow> structural_rows(const DocTree& doc,
                                          const FlatQuery& fq) {
  for (const auto& q : fq.nodes)
    if (q.is_preference)
      throw std::invalid_argument(
          "structural_rows only handles queries without preference nodes");

  size_t nq = fq.nodes.size(), nd = doc.nodes.size();
  // matchable[q][v]: the query subtree at q embeds below document node v.
  std::vector<std::vector<char>> ok(nq, std::vector<char>(nd, 0));
  // Query nodes in reverse preorder see children before parents.
  for (size_t qi = nq; qi-- > 0;) {
    const FlatQueryNode& q = fq.nodes[qi];
    for (size_t v = 0; v < nd; ++v) {
      if (doc.nodes[v].label != q.label) continue;
      bool all = true;
      for (int child : q.children) {
        bool found = false;
        if (fq.nodes[child].edge == EdgeKind::ParentChild) {
          for (int w : doc.nodes[v].children)
            if (ok[child][w]) {
              found = true;
              break;
            }
        } else {
          for (size_t w = 0; w < nd && !found; ++w)
            if (ok[child][w] &&
                is_ancestor(doc.nodes[v].region, doc.nodes[w].region))
              found = true;
        }
        if (!found) {
          all = false;
          break;
        }
      }
      if (all) ok[qi][v] = 1;
    }
  }

  std::vector<CandidateRow> rows;
  CandidateRow row;
  row.bindings.resize(nq);
  // Enumerate assignments, pruning with the memo table.
  auto assign = [&](auto&& self, std::vector<std::pair<int, int>>& work,
                    size_t k) -> void {
    if (k == work.size()) {
      rows.push_back(row);
      return;
    }
    auto [qn, parent_doc] = work[k];
    const FlatQueryNode& q = fq.nodes[qn];
    for (size_t v = 0; v < nd; ++v) {
      if (!ok[qn][v]) continue;
      if (parent_doc >= 0) {
        if (q.edge == EdgeKind::ParentChild) {
          if (doc.nodes[v].parent != parent_doc) continue;
        } else if (!is_ancestor(doc.nodes[parent_doc].region,
                                doc.nodes[v].region)) {
          continue;
        }
      }
      row.bindings[qn] = doc.nodes[v].region;
      size_t base = work.size();
      for (int child : q.children) work.push_back({child, static_cast<int>(v)});
      self(self, work, k + 1);
      work.resize(base);
      row.bindings[qn].reset();
    }
  };
  std::vector<std::pair<int, int>> work{{0, -1}};
  assign(assign, work, 0);
  dedup_and_order(rows);
  return rows;
}

}  // namespace prefq
