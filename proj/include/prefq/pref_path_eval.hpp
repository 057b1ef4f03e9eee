#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "prefq/dataguide.hpp"
#include "prefq/rewriter.hpp"

namespace prefq {

// Linear path query, optionally ending in a preference step.
struct PrefPathQuery {
  std::vector<std::string> steps;
  bool last_is_preference = false;
};

enum class OccKind { Real, Pseudo };

// One runtime list entry.  Real entries carry an index region; pseudo
// entries carry a stamp interval standing in for an absent preference node,
// plus the prefix occurrence that owns the gap.
struct Occurrence {
  OccKind kind = OccKind::Real;
  RegionLabel region;  // real region, or stamp (left, right, owner level + 1)
  RegionLabel owner;   // pseudo only
  bool has_owner = false;  // false for stamps owned by the whole document
};

using OccurrenceList = std::vector<Occurrence>;

uint32_t next_l(const Occurrence& x);
uint32_t next_r(const Occurrence& x);

// How a pseudo occurrence relates to the node that owns it: the absent step
// would have been a child of the owner, any descendant of it, or a child of
// the document itself (no owner at all, possible only for a preference root).
enum class OwnerRel { Parent, Ancestor, WholeDocument };

struct PseudoOwner {
  RegionLabel region;  // unused for WholeDocument
  OwnerRel rel = OwnerRel::Parent;
};

enum class StampMode {
  KeepAll,            // every gap segment survives
  DropDegenerate,     // per owner, drop stamps too narrow to hold a child --
                      // unless all of that owner's stamps are that narrow
};

// Gap stamps over the document span: one stamp per maximal segment that lies
// inside at least one alpha interval and inside no beta interval, owned by
// the innermost active alpha entry.  `whole_document_owner` adds a synthetic
// outermost alpha spanning everything (used when a preference root may be
// absent); `doc_span_end` bounds it.
OccurrenceList build_gap_stamps(const OccurrenceSeq& alpha,
                                const OccurrenceSeq& beta,
                                bool whole_document_owner,
                                uint32_t doc_span_end, StampMode mode);

// Strict-path evaluation of a preference path: alpha and beta come from
// exact index keys, the result is beta plus all gap stamps (nothing
// dropped).  Without a preference step this is just eval_strict_path.  An
// empty alpha gives an empty list.
OccurrenceList eval_pref_path(const AnnotatedDataGuide& dg,
                              const PrefPathQuery& p);

// Violations of the gap-coverage rules for one evaluated preference path:
// every child of an alpha node that is not inside (or itself) a real beta
// occurrence must lie strictly inside exactly one stamp owned by that alpha
// node, and no stamp may strictly contain a real beta occurrence.  Returns
// human-readable violation descriptions; empty means the list is sound.
std::vector<std::string> verify_pseudo_coverage(const DocTree& doc,
                                                const OccurrenceSeq& alpha,
                                                const OccurrenceSeq& beta,
                                                const OccurrenceList& list);

// Everything the matcher needs about one rewritten-tree node.
struct EvaluatedNode {
  const PrefPathNode* src = nullptr;
  int parent = -1;
  EdgeKind edge = EdgeKind::ParentChild;
  std::vector<int> children;

  bool is_pref = false;  // tag ends in a preference step
  int strict_steps = 0;  // local steps minus the preference step

  std::vector<std::vector<std::string>> chains;  // label-path expansions
  OccurrenceSeq reals;            // start-sorted union of chain evaluations
  std::vector<PseudoOwner> owners;  // preference tags: absent-step contexts
  OccurrenceList artifact;        // display list: reals merged with stamps
};

struct EvaluatedTree {
  // Owned copy of the rewritten query; the nodes' src pointers lead into it,
  // behind one indirection so moving the tree keeps them valid.
  std::unique_ptr<PrefPathTree> source;
  std::vector<EvaluatedNode> nodes;  // preorder; 0 is the root
};

// Builds every node's runtime list from the index.  All tags are evaluated
// through path-suffix chains, so a tag matches at any depth whose label path
// ends with it; absolute and relative tags differ only in how their chains
// are assembled.
EvaluatedTree assign_lists(const AnnotatedDataGuide& dg, const PrefPathTree& t);

std::string render_occurrence(const Occurrence& o);

}  // namespace prefq
