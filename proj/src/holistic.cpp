#include "prefq/holistic.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "prefq/region.hpp"
#include "prefq/rewriter.hpp"

namespace prefq {

namespace {

constexpr uint64_t kDone = std::numeric_limits<uint64_t>::max();

bool stream_less(const EffEntry& a, const EffEntry& b) {
  if (a.s != b.s) return a.s < b.s;
  if (a.e != b.e) return a.e > b.e;  // wider (enclosing) first
  if (a.real != b.real) return a.real;
  return a.region.start < b.region.start;
}

}  // namespace

std::vector<EffectiveStream> build_streams(const EvaluatedTree& tree,
                                           const DocAtlas& atlas,
                                           uint32_t doc_span_end) {
  std::vector<EffectiveStream> streams(tree.nodes.size());
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const EvaluatedNode& en = tree.nodes[i];
    EffectiveStream& st = streams[i];
    size_t local_len = en.src->local.size();
    for (const RegionLabel& r : en.reals) {
      EffEntry e;
      e.s = r.start;
      e.e = r.end;
      e.real = true;
      e.region = r;
      e.first_step = atlas.ancestor_at(r, static_cast<uint32_t>(local_len - 1));
      e.has_first_step = true;
      st.entries.push_back(e);
    }
    for (const PseudoOwner& o : en.owners) {
      EffEntry e;
      e.real = false;
      e.rel = o.rel;
      if (o.rel == OwnerRel::WholeDocument) {
        e.whole_doc = true;
        e.s = 0;
        e.e = doc_span_end + 1;
        e.region = RegionLabel{0, doc_span_end + 1, 0};
      } else {
        e.s = o.region.start;
        e.e = o.region.end;
        e.region = o.region;
        if (en.strict_steps >= 1) {
          e.first_step = atlas.ancestor_at(
              o.region, static_cast<uint32_t>(en.strict_steps - 1));
          e.has_first_step = true;
        }
      }
      st.entries.push_back(e);
    }
    std::sort(st.entries.begin(), st.entries.end(), stream_less);
  }
  return streams;
}

bool check_edge(const EvaluatedNode& parent_node, const EffEntry& p,
                const EvaluatedNode& child_node, const EffEntry& t,
                EdgeKind kind) {
  bool ad = kind == EdgeKind::AncestorDescendant;
  if (t.real || child_node.strict_steps >= 1) {
    // The child tag has a concrete first-step binding; relate it to the
    // entry standing for the parent tag's last bound step.
    const RegionLabel& y = t.first_step;
    if (p.real)
      return ad ? is_ancestor(p.region, y) : is_parent(p.region, y);
    if (p.whole_doc) return true;
    if (parent_node.strict_steps >= 1)
      return ad ? is_ancestor(p.region, y) : is_parent(p.region, y);
    // The parent entry is pure context (single absent preference step): its
    // owner relation composes with the tree edge.
    if (p.rel == OwnerRel::Parent && !ad) return is_parent(p.region, y);
    return is_ancestor(p.region, y);
  }
  // The child tag is a single absent preference step: it binds nothing and
  // simply inherits its owner, which must be the exact node the parent
  // entry put there.
  if (t.whole_doc) return !p.real && p.whole_doc;
  if (p.whole_doc) return false;
  return p.region == t.region;
}

namespace {

class StackMatcher {
 public:
  StackMatcher(const EvaluatedTree& tree,
               const std::vector<EffectiveStream>& streams, MatchStats& stats)
      : tree_(tree), streams_(streams), stats_(stats),
        cursor_(tree.nodes.size(), 0), stacks_(tree.nodes.size()) {
    for (size_t i = 0; i < tree_.nodes.size(); ++i) {
      if (!tree_.nodes[i].children.empty()) continue;
      leaf_slot_[static_cast<int>(i)] = static_cast<int>(out_.leaf_nodes.size());
      out_.leaf_nodes.push_back(static_cast<int>(i));
      std::vector<int> path;
      for (int n = static_cast<int>(i); n >= 0; n = tree_.nodes[n].parent)
        path.push_back(n);
      std::reverse(path.begin(), path.end());
      out_.node_path.push_back(std::move(path));
    }
    out_.sols.resize(out_.leaf_nodes.size());
  }

  PathSolutions run() {
    for (;;) {
      int q = get_next(0);
      if (exhausted(q)) break;
      int par = tree_.nodes[q].parent;
      uint32_t start = streams_[q].entries[cursor_[q]].s;
      if (par >= 0) clean_stack(par, start);
      if (par < 0 || !stacks_[par].empty()) {
        clean_stack(q, start);
        if (!stacks_[q].empty()) {
          const EffEntry& below = streams_[q].entries[stacks_[q].back()];
          const EffEntry& cur = streams_[q].entries[cursor_[q]];
          if (!(below.s <= cur.s && cur.e <= below.e))
            throw InternalError("stack entries lost their nesting order");
        }
        stacks_[q].push_back(static_cast<int>(cursor_[q]));
        advance(q);
        if (tree_.nodes[q].children.empty()) {
          emit(q);
          stacks_[q].pop_back();
        }
      } else {
        advance(q);
      }
    }
    return std::move(out_);
  }

 private:
  bool exhausted(int q) const {
    return cursor_[q] >= streams_[q].entries.size();
  }
  uint64_t next_l(int q) const {
    return exhausted(q) ? kDone : streams_[q].entries[cursor_[q]].s;
  }
  uint64_t next_r(int q) const {
    return exhausted(q) ? kDone : streams_[q].entries[cursor_[q]].e;
  }
  void advance(int q) {
    ++cursor_[q];
    ++stats_.advances;
  }

  // Returns the highest node in q's subtree whose current entry must be
  // consumed next.  Ancestors win start ties so they reach their stacks
  // before any entry they may need to claim.
  int get_next(int q) {
    const auto& ch = tree_.nodes[q].children;
    if (ch.empty()) return q;
    uint64_t min_l = kDone, max_l = 0;
    int nmin = -1;
    for (int c : ch) {
      int n = get_next(c);
      if (n != c) return n;
      uint64_t l = next_l(c);
      if (l < min_l) {
        min_l = l;
        nmin = c;
      }
      if (l > max_l) max_l = l;
    }
    while (next_r(q) < max_l) advance(q);
    if (next_l(q) <= min_l) return q;
    return nmin;
  }

  void clean_stack(int q, uint32_t start) {
    auto& st = stacks_[q];
    while (!st.empty() && streams_[q].entries[st.back()].e < start)
      st.pop_back();
  }

  void emit(int leaf) {
    const std::vector<int>& path = out_.node_path[leaf_slot_[leaf]];
    std::vector<int> combo(path.size(), -1);
    combo.back() = stacks_[leaf].back();
    expand(path, combo, path.size() >= 2 ? path.size() - 2 : 0,
           out_.sols[leaf_slot_[leaf]]);
  }

  // Fills combo positions from the leaf upward, trying every stacked entry
  // and keeping chains whose consecutive pairs satisfy the edge test.
  void expand(const std::vector<int>& path, std::vector<int>& combo,
              size_t pos, std::vector<std::vector<int>>& sink) {
    if (path.size() == 1) {
      sink.push_back(combo);
      ++stats_.path_solutions;
      return;
    }
    int node = path[pos];
    int child = path[pos + 1];
    const EvaluatedNode& cn = tree_.nodes[child];
    const EffEntry& t = streams_[child].entries[combo[pos + 1]];
    for (int idx : stacks_[node]) {
      const EffEntry& p = streams_[node].entries[idx];
      if (!check_edge(tree_.nodes[node], p, cn, t, cn.edge)) continue;
      combo[pos] = idx;
      if (pos == 0) {
        sink.push_back(combo);
        ++stats_.path_solutions;
      } else {
        expand(path, combo, pos - 1, sink);
      }
    }
    combo[pos] = -1;
  }

  const EvaluatedTree& tree_;
  const std::vector<EffectiveStream>& streams_;
  MatchStats& stats_;
  std::vector<size_t> cursor_;
  std::vector<std::vector<int>> stacks_;
  std::map<int, int> leaf_slot_;
  PathSolutions out_;
};

}  // namespace

PathSolutions enumerate_path_solutions(const EvaluatedTree& tree,
                                       const std::vector<EffectiveStream>& streams,
                                       MatchStats& stats) {
  return StackMatcher(tree, streams, stats).run();
}

std::vector<bool> row_flags(const PreferenceTable& table,
                            const CandidateRow& row) {
  std::vector<bool> flags;
  flags.reserve(table.pref_columns.size());
  for (int qid : table.pref_columns)
    flags.push_back(row.bindings[static_cast<size_t>(qid)].has_value());
  return flags;
}

namespace {

void bind_entry(const EvaluatedNode& en, const EffEntry& entry,
                const DocAtlas& atlas, CandidateRow& row) {
  const std::vector<PathStep>& local = en.src->local;
  size_t bound;  // number of trailing-or-leading steps this entry binds
  RegionLabel base;
  if (entry.real) {
    bound = local.size();
    base = entry.region;
  } else if (en.strict_steps >= 1) {
    bound = static_cast<size_t>(en.strict_steps);
    base = entry.region;  // the owner binds the last strict step
  } else {
    return;  // pure context: the single preference step stays absent
  }
  RegionLabel cur = base;
  for (size_t j = bound; j-- > 0;) {
    row.bindings[static_cast<size_t>(local[j].qid)] = cur;
    if (j > 0) cur = atlas.ancestor_at(cur, 1);
  }
}

}  // namespace

PreferenceTable merge_path_solutions(const EvaluatedTree& tree,
                                     const std::vector<EffectiveStream>& streams,
                                     const PathSolutions& paths,
                                     const FlatQuery& fq,
                                     const DocAtlas& atlas) {
  PreferenceTable table;
  table.pref_columns = fq.preference_ids;

  size_t n = tree.nodes.size();
  std::vector<std::vector<int>> full;  // entry index per tree node
  std::vector<bool> filled(n, false);
  bool any_empty = false;
  for (const auto& sols : paths.sols)
    if (sols.empty()) any_empty = true;

  if (!any_empty && !paths.leaf_nodes.empty()) {
    for (size_t li = 0; li < paths.leaf_nodes.size(); ++li) {
      const std::vector<int>& path = paths.node_path[li];
      std::vector<size_t> shared, fresh;  // positions within this path
      for (size_t k = 0; k < path.size(); ++k)
        (filled[path[k]] ? shared : fresh).push_back(k);
      if (li == 0) {
        for (const auto& sol : paths.sols[li]) {
          std::vector<int> row(n, -1);
          for (size_t k = 0; k < path.size(); ++k) row[path[k]] = sol[k];
          full.push_back(std::move(row));
        }
      } else {
        std::map<std::vector<int>, std::vector<size_t>> by_key;
        for (size_t r = 0; r < full.size(); ++r) {
          std::vector<int> key;
          for (size_t k : shared) key.push_back(full[r][path[k]]);
          by_key[key].push_back(r);
        }
        std::vector<std::vector<int>> next;
        for (const auto& sol : paths.sols[li]) {
          std::vector<int> key;
          for (size_t k : shared) key.push_back(sol[k]);
          auto it = by_key.find(key);
          if (it == by_key.end()) continue;
          for (size_t r : it->second) {
            std::vector<int> row = full[r];
            for (size_t k : fresh) row[path[k]] = sol[k];
            next.push_back(std::move(row));
          }
        }
        full = std::move(next);
      }
      for (int node : path) filled[node] = true;
      if (full.empty()) break;
    }
  }

  std::set<std::vector<uint32_t>> seen;
  std::vector<std::pair<std::vector<uint64_t>, CandidateRow>> keyed;
  for (const auto& sol : full) {
    CandidateRow row;
    row.bindings.resize(fq.nodes.size());
    for (size_t i = 0; i < n; ++i)
      bind_entry(tree.nodes[i], streams[i].entries[sol[i]], atlas, row);
    std::vector<uint32_t> dedup_key;
    dedup_key.reserve(row.bindings.size());
    for (const auto& b : row.bindings)
      dedup_key.push_back(b ? b->start : 0);
    if (!seen.insert(dedup_key).second) continue;
    std::vector<uint64_t> order_key;
    order_key.reserve(row.bindings.size());
    for (const auto& b : row.bindings)
      order_key.push_back(b ? b->start : kDone);
    keyed.emplace_back(std::move(order_key), std::move(row));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  table.rows.reserve(keyed.size());
  for (auto& kv : keyed) table.rows.push_back(std::move(kv.second));
  return table;
}

PreferenceTable holistic_match(const EvaluatedTree& tree, const FlatQuery& fq,
                               const DocAtlas& atlas, uint32_t doc_span_end,
                               MatchStats* stats) {
  MatchStats local;
  MatchStats& st = stats ? *stats : local;
  std::vector<EffectiveStream> streams = build_streams(tree, atlas, doc_span_end);
  for (const auto& s : streams) st.effective_entries += s.entries.size();
  for (const auto& nodes : tree.nodes) st.artifact_entries += nodes.artifact.size();
  PathSolutions paths = enumerate_path_solutions(tree, streams, st);
  return merge_path_solutions(tree, streams, paths, fq, atlas);
}

}  // namespace prefq
