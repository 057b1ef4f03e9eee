#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace prefq {

enum class EdgeKind { ParentChild, AncestorDescendant };

struct QueryNode {
  std::string label;
  bool is_preference = false;
  // Ordered children: predicates first, the trailing path step last.
  std::vector<std::pair<EdgeKind, QueryNode>> children;

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

struct QueryTree {
  QueryNode root;
  bool rooted_at_document_root = false;  // leading '/', kept for display only

  friend bool operator==(const QueryTree&, const QueryTree&) = default;
};

struct QueryError : std::runtime_error {
  size_t position;
  QueryError(const std::string& what, size_t pos)
      : std::runtime_error(what + " at offset " + std::to_string(pos)),
        position(pos) {}
};

// Grammar:
//   query := '/'? step tail
//   tail  := (('/' | '//') step)*
//   step  := label '!'? pred*
//   pred  := '[' '//'? '/'? step tail ']'
// A '//' immediately inside '[' makes the predicate's first edge
// ancestor-descendant.  Whitespace between tokens is ignored.
QueryTree parse_query(const std::string& text);

std::string unparse_query(const QueryTree& q);

// Structural warnings, not errors: a preference root makes every answer
// unconstrained, and preferences nested below preferences are legal but easy
// to write by accident.
std::vector<std::string> validate_query(const QueryTree& q);

size_t query_node_count(const QueryTree& q);

// Flattened view with stable preorder ids; downstream phases address query
// nodes by these ids when they bind document nodes to them.
struct FlatQueryNode {
  std::string label;
  bool is_preference = false;
  int parent = -1;
  EdgeKind edge = EdgeKind::ParentChild;  // edge from parent; root: unused
  std::vector<int> children;
};

struct FlatQuery {
  std::vector<FlatQueryNode> nodes;  // preorder
  std::vector<int> preference_ids;   // preorder ids of preference nodes
};

FlatQuery flatten_query(const QueryTree& q);

}  // namespace prefq
