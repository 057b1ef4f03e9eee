#include "prefq/random_gen.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

namespace prefq {

namespace {

std::string label_for(int k) { return std::string(1, static_cast<char>('A' + k)); }

struct ShapeNode {
  std::string label;
  std::vector<int> children;
  int depth = 1;
};

std::string shape_to_xml(const std::vector<ShapeNode>& nodes, int at) {
  const ShapeNode& n = nodes[at];
  if (n.children.empty()) return "<" + n.label + "/>";
  std::string out = "<" + n.label + ">";
  for (int c : n.children) out += shape_to_xml(nodes, c);
  return out + "</" + n.label + ">";
}

}  // namespace

std::string random_document(std::mt19937_64& rng, const GenLimits& lim) {
  std::uniform_int_distribution<int> label_pick(0, lim.label_alphabet - 1);
  std::uniform_int_distribution<int> size_pick(1, lim.max_doc_nodes);
  int target = size_pick(rng);
  std::vector<ShapeNode> nodes;
  nodes.push_back({label_for(label_pick(rng)), {}, 1});
  std::vector<int> eligible{0};  // nodes still shallow enough to take children
  for (int i = 1; i < target && !eligible.empty(); ++i) {
    std::uniform_int_distribution<size_t> parent_pick(0, eligible.size() - 1);
    int parent = eligible[parent_pick(rng)];
    int id = static_cast<int>(nodes.size());
    nodes.push_back({label_for(label_pick(rng)), {}, nodes[parent].depth + 1});
    nodes[parent].children.push_back(id);
    if (nodes[id].depth < lim.max_depth) eligible.push_back(id);
  }
  return shape_to_xml(nodes, 0);
}

std::string random_query(std::mt19937_64& rng, const GenLimits& lim) {
  std::uniform_int_distribution<int> label_pick(0, lim.label_alphabet - 1);
  std::uniform_int_distribution<int> size_pick(1, lim.max_query_nodes);
  int m = size_pick(rng);

  std::vector<std::string> labels(m);
  std::vector<int> parent(m, -1);
  std::vector<EdgeKind> edge(m, EdgeKind::ParentChild);
  std::vector<bool> pref(m, false);
  int ad_left = lim.max_descendant_edges;
  for (int i = 0; i < m; ++i) {
    labels[i] = label_for(label_pick(rng));
    if (i == 0) continue;
    parent[i] = static_cast<int>(rng() % static_cast<uint64_t>(i));
    if (ad_left > 0 && rng() % 4 == 0) {
      edge[i] = EdgeKind::AncestorDescendant;
      --ad_left;
    }
  }
  int want_pref = static_cast<int>(rng() % (lim.max_preferences + 1));
  std::vector<int> ids(m);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  for (int id : ids) {
    if (want_pref == 0) break;
    if (id == 0 && rng() % 8 != 0) continue;  // root preference: rare
    pref[id] = true;
    --want_pref;
  }

  std::function<QueryNode(int)> build = [&](int i) {
    QueryNode n;
    n.label = labels[i];
    n.is_preference = pref[i];
    for (int j = i + 1; j < m; ++j)
      if (parent[j] == i) n.children.emplace_back(edge[j], build(j));
    return n;
  };
  QueryTree q;
  q.root = build(0);
  return unparse_query(q);
}

std::string document_to_xml(const DocTree& doc) {
  std::function<std::string(int)> ser = [&](int at) {
    const DocTree::Node& n = doc.nodes[at];
    if (n.children.empty()) return "<" + n.label + "/>";
    std::string out = "<" + n.label + ">";
    for (int c : n.children) out += ser(c);
    return out + "</" + n.label + ">";
  };
  return ser(0);
}

std::vector<std::string> shrink_document(const std::string& xml) {
  DocTree doc = parse_document(xml);
  std::vector<int> victims;
  for (size_t i = 1; i < doc.nodes.size(); ++i)
    victims.push_back(static_cast<int>(i));
  std::sort(victims.begin(), victims.end(), [&](int a, int b) {
    auto size = [&](int v) {
      return doc.nodes[v].region.end - doc.nodes[v].region.start;
    };
    return size(a) > size(b);
  });
  std::vector<std::string> out;
  for (int victim : victims) {
    std::function<std::string(int)> ser = [&](int at) -> std::string {
      const DocTree::Node& n = doc.nodes[at];
      std::string body;
      for (int c : n.children)
        if (c != victim) body += ser(c);
      if (body.empty()) return "<" + n.label + "/>";
      return "<" + n.label + ">" + body + "</" + n.label + ">";
    };
    out.push_back(ser(0));
  }
  return out;
}

namespace {

void for_each_node(QueryNode& n, const std::function<void(QueryNode&)>& fn) {
  fn(n);
  for (auto& [kind, child] : n.children) for_each_node(child, fn);
}

int count_nodes(const QueryNode& n) {
  int total = 1;
  for (const auto& [kind, child] : n.children) total += count_nodes(child);
  return total;
}

// Removes the preorder-k-th node (a leaf) from the tree; returns false when
// k is the root or not a leaf.
bool drop_leaf(QueryNode& n, int& k) {
  for (size_t i = 0; i < n.children.size(); ++i) {
    --k;
    if (k == 0) {
      if (!n.children[i].second.children.empty()) return false;
      n.children.erase(n.children.begin() + static_cast<long>(i));
      return true;
    }
    if (drop_leaf(n.children[i].second, k)) return true;
    if (k == 0) return false;
  }
  return false;
}

}  // namespace

std::vector<std::string> shrink_query(const std::string& query_text) {
  QueryTree base = parse_query(query_text);
  std::vector<std::string> out;
  int n = count_nodes(base.root);
  for (int k = 1; k < n; ++k) {
    QueryTree q = base;
    int at = k;
    if (drop_leaf(q.root, at)) out.push_back(unparse_query(q));
  }
  for (int k = 0; k < n; ++k) {
    QueryTree q = base;
    int seen = -1;
    bool changed = false;
    for_each_node(q.root, [&](QueryNode& node) {
      ++seen;
      if (seen == k && node.is_preference) {
        node.is_preference = false;
        changed = true;
      }
    });
    if (changed) out.push_back(unparse_query(q));
  }
  for (int k = 0; k < n; ++k) {
    QueryTree q = base;
    int seen = 0;
    bool changed = false;
    std::function<void(QueryNode&)> walk = [&](QueryNode& node) {
      for (auto& [kind, child] : node.children) {
        ++seen;
        if (seen == k && kind == EdgeKind::AncestorDescendant) {
          kind = EdgeKind::ParentChild;
          changed = true;
        }
        walk(child);
      }
    };
    walk(q.root);
    if (changed) out.push_back(unparse_query(q));
  }
  return out;
}

}  // namespace prefq
