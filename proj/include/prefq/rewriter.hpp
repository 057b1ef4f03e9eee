#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "prefq/query.hpp"

namespace prefq {

// A pipeline-consistency violation: some earlier phase produced a structure
// a later phase cannot accept.  The CLI maps this to its own exit code.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// A connected fragment of the original query holding only parent-child
// edges; preference nodes can only be leaves of it.
struct Subquery {
  struct Node {
    int qid = -1;  // preorder id in the FlatQuery
    std::vector<Node> children;
  };
  Node root;
};

// Decomposition result: subqueries plus how to re-attach each one below its
// parent — at which leaf, at which child rank, by which edge kind.
struct PartitionNode {
  Subquery sub;
  int leaf_num = 0;   // 1-based leaf index within the parent subquery
  int rel_pos = 0;    // 1-based child rank at the attachment node
  EdgeKind rel_type = EdgeKind::ParentChild;
  int attach_qid = -1;  // the attachment leaf itself, kept for sanity checks
  std::vector<PartitionNode> children;
};

struct PathStep {
  std::string label;
  bool is_preference = false;
  int qid = -1;

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

// One node of the rewritten query: a linear path tag (at most one preference
// step, always last) plus outgoing edges to further tags.
struct PrefPathNode {
  std::vector<PathStep> local;    // steps this node contributes
  std::vector<PathStep> display;  // full tag as rendered (prefix + local)
  bool is_relative = false;       // tag names a path suffix, not a root path
  EdgeKind edge = EdgeKind::ParentChild;  // edge from parent; root: unused
  int rel_pos = 0;                        // attachment rank; 0 for built-ins
  std::vector<PrefPathNode> children;

  bool last_is_preference() const {
    return !local.empty() && local.back().is_preference;
  }
  size_t strict_steps() const {
    return local.size() - (last_is_preference() ? 1 : 0);
  }
};

struct PrefPathTree {
  PrefPathNode root;
};

PartitionNode decompose(const FlatQuery& fq);

// Local rewriting around the first node with two or more children; a pure
// path collapses to a single tag.  `prefix` seeds the display tags and
// `relative` marks fragments that hang below a preference step or an
// ancestor-descendant edge.
PrefPathNode rewrite_subquery(const std::vector<PathStep>& prefix,
                              bool relative, const Subquery::Node& t,
                              const FlatQuery& fq);

// Attaches every child rewriting under the leaf its annotation names.
// Throws InternalError when an annotation points past the leaf list.
PrefPathTree global_merge(const PartitionNode& partition, const FlatQuery& fq);

PrefPathTree rewrite(const FlatQuery& fq);

std::string render_step(const PathStep& step);
std::string render_tag(const PrefPathNode& node);
std::string render_subquery(const Subquery::Node& n, const FlatQuery& fq);
std::string render_partition(const PartitionNode& p, const FlatQuery& fq);
std::string render_pref_path_tree(const PrefPathTree& t);

}  // namespace prefq
