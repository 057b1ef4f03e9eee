#pragma once

#include <random>
#include <string>
#include <vector>

#include "prefq/doc_model.hpp"
#include "prefq/query.hpp"

namespace prefq {

struct GenLimits {
  int max_doc_nodes = 300;
  int label_alphabet = 6;  // labels A, B, ... up to this many
  int max_depth = 8;
  int max_query_nodes = 8;
  int max_preferences = 2;
  int max_descendant_edges = 2;
};

// Random element-only XML document within the limits.
std::string random_document(std::mt19937_64& rng, const GenLimits& lim = {});

// Random preference twig query within the limits, over the same alphabet.
std::string random_query(std::mt19937_64& rng, const GenLimits& lim = {});

std::string document_to_xml(const DocTree& doc);

// One-step reductions of a document (drop one subtree), larger cuts first.
std::vector<std::string> shrink_document(const std::string& xml);

// One-step reductions of a query: drop a leaf, unmark a preference step, or
// tighten a descendant edge to a child edge.
std::vector<std::string> shrink_query(const std::string& query_text);

}  // namespace prefq
