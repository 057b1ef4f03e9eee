#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prefq/region.hpp"

namespace prefq {

struct DocError : std::runtime_error {
  size_t position;  // byte offset into the input
  DocError(const std::string& what, size_t pos)
      : std::runtime_error(what + " at offset " + std::to_string(pos)),
        position(pos) {}
};

// Element-only document tree in a flat preorder array; node 0 is the root.
struct DocTree {
  struct Node {
    std::string label;
    RegionLabel region;
    int parent = -1;
    std::vector<int> children;
  };
  std::vector<Node> nodes;

  const Node& root() const { return nodes.at(0); }
  size_t node_count() const { return nodes.size(); }
};

// Parses XML keeping only elements: text, attributes, comments, processing
// instructions and the XML declaration are discarded.  Every element gets a
// region label from one global counter that starts at 1 and ticks once at
// each open tag and once at each close tag.  DOCTYPE and entity references
// other than the five built-ins are rejected.
DocTree parse_document(std::string_view xml);

DocTree load_document_file(const std::string& path);

}  // namespace prefq
