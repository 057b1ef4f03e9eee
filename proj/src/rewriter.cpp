#include "prefq/rewriter.hpp"

#include <algorithm>
#include <map>

namespace prefq {

namespace {

struct Cut {
  int child_qid;
  int attach_qid;
  int rel_pos;
  EdgeKind edge;
};

Subquery::Node build_prefix(int qid, const FlatQuery& fq, std::vector<Cut>& cuts) {
  const FlatQueryNode& info = fq.nodes[qid];
  bool cut_all = info.is_preference;
  for (int c : info.children)
    if (fq.nodes[c].edge == EdgeKind::AncestorDescendant) cut_all = true;

  Subquery::Node node;
  node.qid = qid;
  for (size_t i = 0; i < info.children.size(); ++i) {
    int c = info.children[i];
    if (cut_all)
      cuts.push_back({c, qid, static_cast<int>(i) + 1, fq.nodes[c].edge});
    else
      node.children.push_back(build_prefix(c, fq, cuts));
  }
  return node;
}

void collect_leaf_qids(const Subquery::Node& n, std::vector<int>& leaves) {
  if (n.children.empty()) {
    leaves.push_back(n.qid);
    return;
  }
  for (const Subquery::Node& c : n.children) collect_leaf_qids(c, leaves);
}

PartitionNode decompose_at(int qid, const FlatQuery& fq) {
  std::vector<Cut> cuts;
  PartitionNode pn;
  pn.sub.root = build_prefix(qid, fq, cuts);

  std::vector<int> leaves;
  collect_leaf_qids(pn.sub.root, leaves);
  std::map<int, int> leaf_num;  // qid -> 1-based position
  for (size_t i = 0; i < leaves.size(); ++i)
    leaf_num[leaves[i]] = static_cast<int>(i) + 1;

  for (const Cut& cut : cuts) {
    PartitionNode child = decompose_at(cut.child_qid, fq);
    child.leaf_num = leaf_num.at(cut.attach_qid);
    child.rel_pos = cut.rel_pos;
    child.rel_type = cut.edge;
    child.attach_qid = cut.attach_qid;
    pn.children.push_back(std::move(child));
  }
  return pn;
}

void collect_fragment_leaves(PrefPathNode& n, std::vector<PrefPathNode*>& out) {
  if (n.children.empty()) {
    out.push_back(&n);
    return;
  }
  for (PrefPathNode& c : n.children) collect_fragment_leaves(c, out);
}

PrefPathNode merge_node(const PartitionNode& pn,
                        const std::vector<PathStep>& prefix, bool relative,
                        const FlatQuery& fq) {
  PrefPathNode frag = rewrite_subquery(prefix, relative, pn.sub.root, fq);

  // Leaves of the virgin fragment; attachments go below these and never
  // create new attachment targets.
  std::vector<PrefPathNode*> leaves;
  collect_fragment_leaves(frag, leaves);

  for (const PartitionNode& child_pn : pn.children) {
    if (child_pn.leaf_num < 1 ||
        child_pn.leaf_num > static_cast<int>(leaves.size()))
      throw InternalError("rewriting produced a dangling attachment: leaf " +
                          std::to_string(child_pn.leaf_num) + " of " +
                          std::to_string(leaves.size()));
    PrefPathNode* target = leaves[child_pn.leaf_num - 1];
    if (target->local.back().qid != child_pn.attach_qid)
      throw InternalError("attachment leaf does not match its annotation");

    bool child_relative;
    std::vector<PathStep> child_prefix;
    if (target->last_is_preference() ||
        child_pn.rel_type == EdgeKind::AncestorDescendant) {
      child_relative = true;
    } else {
      child_relative = target->is_relative;
      child_prefix = target->display;
    }

    PrefPathNode sub = merge_node(child_pn, child_prefix, child_relative, fq);
    sub.edge = child_pn.rel_type;
    sub.rel_pos = child_pn.rel_pos;
    auto at = std::find_if(
        target->children.begin(), target->children.end(),
        [&](const PrefPathNode& s) { return s.rel_pos > sub.rel_pos; });
    target->children.insert(at, std::move(sub));
  }
  return frag;
}

}  // namespace

PartitionNode decompose(const FlatQuery& fq) { return decompose_at(0, fq); }

PrefPathNode rewrite_subquery(const std::vector<PathStep>& prefix,
                              bool relative, const Subquery::Node& t,
                              const FlatQuery& fq) {
  PrefPathNode out;
  out.is_relative = relative;

  const Subquery::Node* cur = &t;
  auto push_step = [&](int qid) {
    out.local.push_back(
        {fq.nodes[qid].label, fq.nodes[qid].is_preference, qid});
  };
  push_step(cur->qid);
  while (cur->children.size() == 1) {
    cur = &cur->children.front();
    push_step(cur->qid);
  }
  out.display = prefix;
  out.display.insert(out.display.end(), out.local.begin(), out.local.end());

  for (const Subquery::Node& st : cur->children) {
    PrefPathNode child = rewrite_subquery(out.display, relative, st, fq);
    child.edge = EdgeKind::ParentChild;
    out.children.push_back(std::move(child));
  }
  return out;
}

PrefPathTree global_merge(const PartitionNode& partition, const FlatQuery& fq) {
  PrefPathTree tree;
  tree.root = merge_node(partition, {}, false, fq);
  return tree;
}

PrefPathTree rewrite(const FlatQuery& fq) {
  return global_merge(decompose(fq), fq);
}

std::string render_step(const PathStep& step) {
  return step.is_preference ? step.label + "!" : step.label;
}

std::string render_tag(const PrefPathNode& node) {
  std::string out;
  for (size_t i = 0; i < node.display.size(); ++i) {
    if (i) out += '/';
    out += render_step(node.display[i]);
  }
  return out;
}

std::string render_subquery(const Subquery::Node& n, const FlatQuery& fq) {
  std::string out = fq.nodes[n.qid].label;
  if (fq.nodes[n.qid].is_preference) out += '!';
  for (size_t i = 0; i + 1 < n.children.size(); ++i)
    out += "[" + render_subquery(n.children[i], fq) + "]";
  if (!n.children.empty())
    out += "/" + render_subquery(n.children.back(), fq);
  return out;
}

namespace {

const char* edge_name(EdgeKind k) {
  return k == EdgeKind::ParentChild ? "parent-child" : "ancestor-descendant";
}

void render_partition_lines(const PartitionNode& p, const FlatQuery& fq,
                            int depth, std::string& out) {
  out.append(static_cast<size_t>(depth) * 2, ' ');
  out += "subquery " + render_subquery(p.sub.root, fq);
  if (depth > 0) {
    out += "  (leaf " + std::to_string(p.leaf_num) + ", child " +
           std::to_string(p.rel_pos) + ", " + edge_name(p.rel_type) + ")";
  }
  out += '\n';
  for (const PartitionNode& c : p.children)
    render_partition_lines(c, fq, depth + 1, out);
}

void render_tag_lines(const PrefPathNode& n, int depth, std::string& out) {
  out.append(static_cast<size_t>(depth) * 2, ' ');
  out += render_tag(n);
  if (depth > 0) {
    out += "  [";
    out += edge_name(n.edge);
    if (n.is_relative) out += ", relative";
    out += "]";
  } else if (n.is_relative) {
    out += "  [relative]";
  }
  out += '\n';
  for (const PrefPathNode& c : n.children) render_tag_lines(c, depth + 1, out);
}

}  // namespace

std::string render_partition(const PartitionNode& p, const FlatQuery& fq) {
  std::string out;
  render_partition_lines(p, fq, 0, out);
  return out;
}

std::string render_pref_path_tree(const PrefPathTree& t) {
  std::string out;
  render_tag_lines(t.root, 0, out);
  return out;
}

}  // namespace prefq
