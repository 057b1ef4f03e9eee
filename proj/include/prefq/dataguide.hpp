#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefq/doc_model.hpp"
#include "prefq/region.hpp"

namespace prefq {

// Root-to-node label path, e.g. {"A","A","B"} for the deeper B in <A><A><B/>.
using PathKey = std::vector<std::string>;

using OccurrenceSeq = std::vector<RegionLabel>;

std::string path_to_string(const PathKey& path);

// Strong DataGuide: every distinct label path of one document maps to the
// start-sorted list of regions reachable by it.
struct AnnotatedDataGuide {
  std::map<PathKey, OccurrenceSeq> entries;
  std::string root_label;
  size_t node_count = 0;

  friend bool operator==(const AnnotatedDataGuide&,
                         const AnnotatedDataGuide&) = default;
};

AnnotatedDataGuide build_dataguide(const DocTree& doc);

// Exact-key lookup; absent paths give an empty list.
OccurrenceSeq eval_strict_path(const AnnotatedDataGuide& dg, const PathKey& path);

// Start-sorted, deduplicated union over every key whose label sequence ends
// with `suffix`.
OccurrenceSeq eval_suffix_path(const AnnotatedDataGuide& dg, const PathKey& suffix);

enum class IndexErrorKind {
  EmptyIndex,
  VersionMismatch,
  Truncated,
  MalformedLine,
  UnsortedOccurrences,
};

struct IndexError : std::runtime_error {
  IndexErrorKind kind;
  IndexError(IndexErrorKind k, const std::string& what)
      : std::runtime_error(what), kind(k) {}
};

// Line-oriented text format, LF endings:
//   PREFQ-IDX v1 root=<label> nodes=<n>
//   <path joined by '/'>\t<start>,<end>,<level>;<start>,<end>,<level>;...
void save_index(const AnnotatedDataGuide& dg, std::ostream& out);
AnnotatedDataGuide load_index(std::istream& in);
void save_index_file(const AnnotatedDataGuide& dg, const std::string& path);
AnnotatedDataGuide load_index_file(const std::string& path);

// Parent lookup over all regions of one guide, rebuilt by a stack sweep over
// the start-sorted occurrence union.  Lets the matcher walk from a node to
// the binding of an earlier step of its path tag.
class DocAtlas {
 public:
  explicit DocAtlas(const AnnotatedDataGuide& dg);

  // Parent region, or false when the node is the document root.
  bool parent_of(const RegionLabel& r, RegionLabel& out) const;

  // k-fold parent; throws std::out_of_range when the chain leaves the tree.
  RegionLabel ancestor_at(const RegionLabel& r, uint32_t k) const;

 private:
  std::vector<RegionLabel> by_start_;       // all regions, sorted by start
  std::vector<int> parent_;                 // index into by_start_, -1 for root
  std::unordered_map<uint32_t, int> slot_;  // start -> index
};

}  // namespace prefq
