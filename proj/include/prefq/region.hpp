#pragma once

#include <cstdint>
#include <string>

namespace prefq {

// Interval label of one element: the document is walked once with a global
// counter that ticks at every open and close tag, so every element gets a
// (start, end) pair with start < end and all 2n values distinct.  level is
// the depth, root = 1.
struct RegionLabel {
  uint32_t start = 0;
  uint32_t end = 0;
  uint32_t level = 0;

  friend bool operator==(const RegionLabel&, const RegionLabel&) = default;
};

// a is a proper ancestor of b.  Containment of the start suffices because
// regions are properly nested: a.start < b.start < a.end implies b.end < a.end.
inline bool is_ancestor(const RegionLabel& a, const RegionLabel& b) {
  return a.start < b.start && b.end < a.end;
}

inline bool is_parent(const RegionLabel& a, const RegionLabel& b) {
  return is_ancestor(a, b) && a.level + 1 == b.level;
}

// a ends before b starts.
inline bool precedes(const RegionLabel& a, const RegionLabel& b) {
  return a.end < b.start;
}

inline bool follows(const RegionLabel& a, const RegionLabel& b) {
  return precedes(b, a);
}

inline std::string to_string(const RegionLabel& r) {
  return "(" + std::to_string(r.start) + "," + std::to_string(r.end) + "," +
         std::to_string(r.level) + ")";
}

}  // namespace prefq
