#include "prefq/pref_path_eval.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace prefq {

uint32_t next_l(const Occurrence& x) { return x.region.start; }
uint32_t next_r(const Occurrence& x) { return x.region.end; }

namespace {

struct Event {
  uint32_t coord;
  enum Kind { AlphaOpen, AlphaClose, BetaOpen, BetaClose } kind;
  RegionLabel region;
};

}  // namespace

OccurrenceList build_gap_stamps(const OccurrenceSeq& alpha,
                                const OccurrenceSeq& beta,
                                bool whole_document_owner,
                                uint32_t doc_span_end, StampMode mode) {
  std::vector<Event> events;
  const RegionLabel whole_doc{0, doc_span_end + 1, 0};
  if (whole_document_owner) {
    events.push_back({whole_doc.start, Event::AlphaOpen, whole_doc});
    events.push_back({whole_doc.end, Event::AlphaClose, whole_doc});
  }
  for (const RegionLabel& a : alpha) {
    events.push_back({a.start, Event::AlphaOpen, a});
    events.push_back({a.end, Event::AlphaClose, a});
  }
  for (const RegionLabel& b : beta) {
    events.push_back({b.start, Event::BetaOpen, b});
    events.push_back({b.end, Event::BetaClose, b});
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.coord < b.coord; });

  OccurrenceList stamps;
  std::vector<RegionLabel> open_alpha;
  int beta_depth = 0;
  uint32_t prev = 0;
  bool have_prev = false;

  size_t i = 0;
  while (i < events.size()) {
    uint32_t coord = events[i].coord;
    if (have_prev && prev < coord && !open_alpha.empty() && beta_depth == 0) {
      const RegionLabel& owner = open_alpha.back();
      Occurrence stamp;
      stamp.kind = OccKind::Pseudo;
      stamp.region = {prev, coord, owner.level + 1};
      stamp.owner = owner;
      stamp.has_owner = owner.level != 0 || owner.start != 0;
      stamps.push_back(stamp);
    }
    // Apply every event sharing this coordinate (one region may sit in both
    // alpha and beta).
    while (i < events.size() && events[i].coord == coord) {
      switch (events[i].kind) {
        case Event::AlphaOpen:
          open_alpha.push_back(events[i].region);
          break;
        case Event::AlphaClose:
          open_alpha.pop_back();
          break;
        case Event::BetaOpen:
          ++beta_depth;
          break;
        case Event::BetaClose:
          --beta_depth;
          break;
      }
      ++i;
    }
    prev = coord;
    have_prev = true;
  }

  if (mode == StampMode::DropDegenerate) {
    // A stamp narrower than 3 ticks cannot strictly contain any element.
    auto narrow = [](const Occurrence& s) {
      return s.region.end - s.region.start < 3;
    };
    std::map<uint32_t, bool> owner_has_wide;
    for (const Occurrence& s : stamps)
      if (!narrow(s)) owner_has_wide[s.owner.start] = true;
    OccurrenceList kept;
    for (const Occurrence& s : stamps)
      if (!narrow(s) || !owner_has_wide.count(s.owner.start))
        kept.push_back(s);
    stamps = std::move(kept);
  }
  return stamps;
}

namespace {

OccurrenceList merge_reals_and_stamps(const OccurrenceSeq& reals,
                                      OccurrenceList stamps) {
  for (const RegionLabel& r : reals) {
    Occurrence o;
    o.kind = OccKind::Real;
    o.region = r;
    stamps.push_back(o);
  }
  std::sort(stamps.begin(), stamps.end(),
            [](const Occurrence& a, const Occurrence& b) {
              if (a.region.start != b.region.start)
                return a.region.start < b.region.start;
              if (a.region.end != b.region.end)
                return a.region.end > b.region.end;
              return a.kind == OccKind::Real && b.kind == OccKind::Pseudo;
            });
  return stamps;
}

}  // namespace

OccurrenceList eval_pref_path(const AnnotatedDataGuide& dg,
                              const PrefPathQuery& p) {
  if (!p.last_is_preference) {
    OccurrenceList out;
    for (const RegionLabel& r : eval_strict_path(dg, p.steps)) {
      Occurrence o;
      o.kind = OccKind::Real;
      o.region = r;
      out.push_back(o);
    }
    return out;
  }
  PathKey prefix(p.steps.begin(), p.steps.end() - 1);
  if (prefix.empty()) return {};
  OccurrenceSeq alpha = eval_strict_path(dg, prefix);
  if (alpha.empty()) return {};
  OccurrenceSeq beta = eval_strict_path(dg, p.steps);
  OccurrenceList stamps =
      build_gap_stamps(alpha, beta, false, 0, StampMode::KeepAll);
  return merge_reals_and_stamps(beta, std::move(stamps));
}

std::vector<std::string> verify_pseudo_coverage(const DocTree& doc,
                                                const OccurrenceSeq& alpha,
                                                const OccurrenceSeq& beta,
                                                const OccurrenceList& list) {
  std::vector<std::string> violations;

  auto inside = [](const RegionLabel& outer, const RegionLabel& inner) {
    return outer.start < inner.start && inner.end < outer.end;
  };

  std::vector<const Occurrence*> stamps;
  for (const Occurrence& o : list)
    if (o.kind == OccKind::Pseudo) stamps.push_back(&o);

  for (size_t i = 1; i < stamps.size(); ++i) {
    if (stamps[i - 1]->region.start > stamps[i]->region.start)
      violations.push_back("stamps out of order at " +
                           render_occurrence(*stamps[i]));
    if (stamps[i - 1]->region.end > stamps[i]->region.start)
      violations.push_back("overlapping stamps " +
                           render_occurrence(*stamps[i - 1]) + " and " +
                           render_occurrence(*stamps[i]));
  }

  for (const Occurrence* s : stamps)
    for (const RegionLabel& b : beta)
      if (inside(s->region, b))
        violations.push_back("stamp " + render_occurrence(*s) +
                             " swallows real occurrence " + to_string(b));

  // Orphan children: under an alpha parent, not within (or equal to) any
  // real beta node.
  for (const DocTree::Node& node : doc.nodes) {
    if (node.parent < 0) continue;
    const RegionLabel parent_region = doc.nodes[node.parent].region;
    bool parent_is_alpha =
        std::any_of(alpha.begin(), alpha.end(),
                    [&](const RegionLabel& a) { return a == parent_region; });
    if (!parent_is_alpha) continue;
    bool shadowed = std::any_of(beta.begin(), beta.end(), [&](const RegionLabel& b) {
      return b == node.region || inside(b, node.region);
    });
    if (shadowed) continue;

    int covers = 0;
    bool owner_ok = true;
    for (const Occurrence* s : stamps) {
      if (!inside(s->region, node.region)) continue;
      ++covers;
      if (!s->has_owner || !(s->owner == parent_region)) owner_ok = false;
    }
    if (covers != 1)
      violations.push_back("node " + to_string(node.region) + " covered by " +
                           std::to_string(covers) + " stamps");
    else if (!owner_ok)
      violations.push_back("node " + to_string(node.region) +
                           " covered by a stamp with the wrong owner");
  }
  return violations;
}

namespace {

std::vector<std::string> chain_labels(const std::vector<PathStep>& steps) {
  std::vector<std::string> out;
  out.reserve(steps.size());
  for (const PathStep& s : steps) out.push_back(s.label);
  return out;
}

void add_owner(std::map<std::pair<uint32_t, uint32_t>, PseudoOwner>& acc,
               bool& whole_doc, const PseudoOwner& owner) {
  if (owner.rel == OwnerRel::WholeDocument) {
    whole_doc = true;
    return;
  }
  auto key = std::make_pair(owner.region.start, owner.region.end);
  auto [it, inserted] = acc.emplace(key, owner);
  if (!inserted && owner.rel == OwnerRel::Ancestor)
    it->second.rel = OwnerRel::Ancestor;  // the wider claim wins
}

int flatten_tree(const PrefPathNode& n, int parent, EvaluatedTree& out) {
  int id = static_cast<int>(out.nodes.size());
  out.nodes.emplace_back();
  EvaluatedNode& en = out.nodes.back();
  en.src = &n;
  en.parent = parent;
  en.edge = n.edge;
  en.is_pref = n.last_is_preference();
  en.strict_steps = static_cast<int>(n.strict_steps());
  for (const PrefPathNode& c : n.children) {
    int cid = flatten_tree(c, id, out);
    out.nodes[id].children.push_back(cid);
  }
  return id;
}

}  // namespace

EvaluatedTree assign_lists(const AnnotatedDataGuide& dg, const PrefPathTree& t) {
  EvaluatedTree out;
  out.source = std::make_unique<PrefPathTree>(t);
  flatten_tree(out.source->root, -1, out);
  const uint32_t doc_span_end = static_cast<uint32_t>(dg.node_count) * 2;

  for (EvaluatedNode& en : out.nodes) {
    const std::vector<std::string> local = chain_labels(en.src->local);

    // Chain expansions: the root and every ancestor-descendant attachment
    // start a fresh suffix; a parent-child attachment extends every parent
    // chain, and when the parent tag ends in a preference step the absent
    // case adds the same extension with that step removed.
    if (en.parent < 0 || en.edge == EdgeKind::AncestorDescendant) {
      en.chains.push_back(local);
    } else {
      const EvaluatedNode& pe = out.nodes[en.parent];
      std::set<std::vector<std::string>> seen;
      for (const std::vector<std::string>& e : pe.chains) {
        std::vector<std::string> full = e;
        full.insert(full.end(), local.begin(), local.end());
        if (seen.insert(full).second) en.chains.push_back(std::move(full));
        if (pe.is_pref) {
          std::vector<std::string> absent(e.begin(), e.end() - 1);
          absent.insert(absent.end(), local.begin(), local.end());
          if (seen.insert(absent).second) en.chains.push_back(std::move(absent));
        }
      }
    }

    for (const std::vector<std::string>& c : en.chains) {
      OccurrenceSeq part = eval_suffix_path(dg, c);
      en.reals.insert(en.reals.end(), part.begin(), part.end());
    }
    std::sort(en.reals.begin(), en.reals.end(),
              [](const RegionLabel& a, const RegionLabel& b) {
                return a.start < b.start;
              });
    en.reals.erase(std::unique(en.reals.begin(), en.reals.end()),
                   en.reals.end());

    if (!en.is_pref) {
      en.artifact = merge_reals_and_stamps(en.reals, {});
      continue;
    }

    // Absent-step contexts.  A chain of length >= 2 names the step's parent
    // path directly; a single-step chain means the parent context comes from
    // the attachment point instead.
    std::map<std::pair<uint32_t, uint32_t>, PseudoOwner> acc;
    bool whole_doc = false;
    auto inherit = [&]() {
      if (en.parent < 0) {
        whole_doc = true;
        return;
      }
      const EvaluatedNode& pe = out.nodes[en.parent];
      if (en.edge == EdgeKind::ParentChild) {
        if (!pe.is_pref)
          throw InternalError(
              "single-step preference tag under a strict parent-child tag");
        for (const PseudoOwner& o : pe.owners) add_owner(acc, whole_doc, o);
      } else {
        for (const RegionLabel& r : pe.reals)
          add_owner(acc, whole_doc, {r, OwnerRel::Ancestor});
        for (const PseudoOwner& o : pe.owners) {
          PseudoOwner widened = o;
          if (widened.rel == OwnerRel::Parent) widened.rel = OwnerRel::Ancestor;
          add_owner(acc, whole_doc, widened);
        }
      }
    };
    for (const std::vector<std::string>& c : en.chains) {
      if (c.size() >= 2) {
        std::vector<std::string> parent_path(c.begin(), c.end() - 1);
        for (const RegionLabel& r : eval_suffix_path(dg, parent_path))
          add_owner(acc, whole_doc, {r, OwnerRel::Parent});
      } else {
        inherit();
      }
    }
    if (whole_doc)
      en.owners.push_back({{0, doc_span_end + 1, 0}, OwnerRel::WholeDocument});
    for (const auto& [key, owner] : acc) en.owners.push_back(owner);

    OccurrenceSeq alpha;
    for (const PseudoOwner& o : en.owners)
      if (o.rel != OwnerRel::WholeDocument) alpha.push_back(o.region);
    std::sort(alpha.begin(), alpha.end(),
              [](const RegionLabel& a, const RegionLabel& b) {
                return a.start < b.start;
              });
    OccurrenceList stamps = build_gap_stamps(
        alpha, en.reals, whole_doc, doc_span_end, StampMode::DropDegenerate);
    en.artifact = merge_reals_and_stamps(en.reals, std::move(stamps));
  }
  return out;
}

std::string render_occurrence(const Occurrence& o) {
  if (o.kind == OccKind::Real) return to_string(o.region);
  std::string out = "eps(" + std::to_string(o.region.start) + "," +
                    std::to_string(o.region.end) + ")";
  out += o.has_owner ? "@" + to_string(o.owner) : "@document";
  return out;
}

}  // namespace prefq
