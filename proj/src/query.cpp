#include "prefq/query.hpp"

#include <cctype>

namespace prefq {

namespace {

struct Lexer {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }
};

bool is_label_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_label_char(char c) {
  return is_label_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.' || c == ':';
}

std::string read_label(Lexer& lx) {
  lx.skip_ws();
  size_t begin = lx.pos;
  if (begin >= lx.text.size() || !is_label_start(lx.text[begin]))
    throw QueryError("empty step: expected an element label", begin);
  while (lx.pos < lx.text.size() && is_label_char(lx.text[lx.pos])) ++lx.pos;
  return lx.text.substr(begin, lx.pos - begin);
}

QueryNode parse_step(Lexer& lx);

// step tail, returning the first step; the tail is chained through last
// children.
QueryNode parse_path(Lexer& lx) {
  QueryNode first = parse_step(lx);
  QueryNode* cur = &first;
  for (;;) {
    lx.skip_ws();
    if (!lx.eat('/')) break;
    EdgeKind kind = EdgeKind::ParentChild;
    if (lx.eat('/')) kind = EdgeKind::AncestorDescendant;
    QueryNode next = parse_step(lx);
    cur->children.emplace_back(kind, std::move(next));
    cur = &cur->children.back().second;
  }
  return first;
}

QueryNode parse_step(Lexer& lx) {
  QueryNode node;
  node.label = read_label(lx);
  if (lx.pos < lx.text.size() && lx.text[lx.pos] == '!') {
    // '!' binds to the label with nothing in between.
    ++lx.pos;
    node.is_preference = true;
  } else if (lx.peek() == '!') {
    throw QueryError("'!' must directly follow a label", lx.pos);
  }
  while (lx.peek() == '[') {
    size_t open_pos = lx.pos;
    ++lx.pos;
    EdgeKind kind = EdgeKind::ParentChild;
    if (lx.eat('/')) {
      if (lx.eat('/')) kind = EdgeKind::AncestorDescendant;
    }
    QueryNode pred = parse_path(lx);
    if (!lx.eat(']'))
      throw QueryError("unbalanced brackets: '[' never closed", open_pos);
    node.children.emplace_back(kind, std::move(pred));
  }
  return node;
}

void render(const QueryNode& n, std::string& out) {
  out += n.label;
  if (n.is_preference) out += '!';
  size_t count = n.children.size();
  for (size_t i = 0; i + 1 < count; ++i) {
    out += '[';
    if (n.children[i].first == EdgeKind::AncestorDescendant) out += "//";
    render(n.children[i].second, out);
    out += ']';
  }
  if (count > 0) {
    const auto& [kind, child] = n.children.back();
    out += kind == EdgeKind::AncestorDescendant ? "//" : "/";
    render(child, out);
  }
}

bool has_preference_below(const QueryNode& n) {
  for (const auto& [kind, child] : n.children) {
    (void)kind;
    if (child.is_preference || has_preference_below(child)) return true;
  }
  return false;
}

size_t count_nodes(const QueryNode& n) {
  size_t total = 1;
  for (const auto& [kind, child] : n.children) {
    (void)kind;
    total += count_nodes(child);
  }
  return total;
}

}  // namespace

QueryTree parse_query(const std::string& text) {
  Lexer lx{text};
  if (lx.done()) throw QueryError("empty query", 0);
  QueryTree q;
  if (lx.eat('/')) {
    q.rooted_at_document_root = true;
    if (lx.peek() == '/')
      throw QueryError("empty step: query may not start with '//'", lx.pos);
  }
  q.root = parse_path(lx);
  if (!lx.done()) {
    if (lx.peek() == ']')
      throw QueryError("unbalanced brackets: ']' without '['", lx.pos);
    throw QueryError("unexpected trailing input", lx.pos);
  }
  return q;
}

std::string unparse_query(const QueryTree& q) {
  std::string out;
  if (q.rooted_at_document_root) out += '/';
  render(q.root, out);
  return out;
}

std::vector<std::string> validate_query(const QueryTree& q) {
  std::vector<std::string> warnings;
  if (q.root.is_preference)
    warnings.push_back(
        "root is a preference node: answers may bind no node at all");

  std::vector<const QueryNode*> stack{&q.root};
  while (!stack.empty()) {
    const QueryNode* n = stack.back();
    stack.pop_back();
    if (n->is_preference && has_preference_below(*n)) {
      warnings.push_back("nested preference below preference node '" +
                         n->label + "'");
    }
    for (const auto& [kind, child] : n->children) {
      (void)kind;
      stack.push_back(&child);
    }
  }
  return warnings;
}

size_t query_node_count(const QueryTree& q) { return count_nodes(q.root); }

namespace {

int flatten_into(const QueryNode& n, int parent, EdgeKind edge, FlatQuery& fq) {
  int id = static_cast<int>(fq.nodes.size());
  fq.nodes.push_back({n.label, n.is_preference, parent, edge, {}});
  if (n.is_preference) fq.preference_ids.push_back(id);
  for (const auto& [kind, child] : n.children) {
    int child_id = flatten_into(child, id, kind, fq);
    fq.nodes[id].children.push_back(child_id);
  }
  return id;
}

}  // namespace

FlatQuery flatten_query(const QueryTree& q) {
  FlatQuery fq;
  flatten_into(q.root, -1, EdgeKind::ParentChild, fq);
  return fq;
}

}  // namespace prefq
