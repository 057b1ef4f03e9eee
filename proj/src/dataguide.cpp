#include "prefq/dataguide.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace prefq {

std::string path_to_string(const PathKey& path) {
  std::string out;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) out += '/';
    out += path[i];
  }
  return out;
}

AnnotatedDataGuide build_dataguide(const DocTree& doc) {
  AnnotatedDataGuide dg;
  dg.root_label = doc.root().label;
  dg.node_count = doc.node_count();

  PathKey path;
  // Preorder walk; nodes are stored in preorder, so an explicit stack of
  // (node, remaining-children) keeps the running label path in sync.
  struct Frame {
    int node;
    size_t next_child = 0;
  };
  std::vector<Frame> stack;
  path.push_back(doc.root().label);
  dg.entries[path].push_back(doc.root().region);
  stack.push_back({0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const DocTree::Node& n = doc.nodes[f.node];
    if (f.next_child >= n.children.size()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    int child = n.children[f.next_child++];
    path.push_back(doc.nodes[child].label);
    dg.entries[path].push_back(doc.nodes[child].region);
    stack.push_back({child});
  }
  // Children are visited in document order, so each list is already sorted
  // by start.
  return dg;
}

OccurrenceSeq eval_strict_path(const AnnotatedDataGuide& dg, const PathKey& path) {
  auto it = dg.entries.find(path);
  return it == dg.entries.end() ? OccurrenceSeq{} : it->second;
}

OccurrenceSeq eval_suffix_path(const AnnotatedDataGuide& dg, const PathKey& suffix) {
  OccurrenceSeq out;
  if (suffix.empty()) return out;
  for (const auto& [key, occs] : dg.entries) {
    if (key.size() < suffix.size()) continue;
    if (!std::equal(suffix.begin(), suffix.end(), key.end() - suffix.size()))
      continue;
    out.insert(out.end(), occs.begin(), occs.end());
  }
  std::sort(out.begin(), out.end(),
            [](const RegionLabel& a, const RegionLabel& b) { return a.start < b.start; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void save_index(const AnnotatedDataGuide& dg, std::ostream& out) {
  out << "PREFQ-IDX v1 root=" << dg.root_label << " nodes=" << dg.node_count
      << "\n";
  for (const auto& [key, occs] : dg.entries) {
    out << path_to_string(key) << '\t';
    for (size_t i = 0; i < occs.size(); ++i) {
      if (i) out << ';';
      out << occs[i].start << ',' << occs[i].end << ',' << occs[i].level;
    }
    out << "\n";
  }
}

namespace {

[[noreturn]] void fail(IndexErrorKind kind, const std::string& what) {
  throw IndexError(kind, what);
}

std::optional<uint64_t> parse_u64(std::string_view s) {
  if (s.empty()) return std::nullopt;
  uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<uint64_t>(c - '0');
    if (v > 0xffffffffull) return std::nullopt;
  }
  return v;
}

}  // namespace

AnnotatedDataGuide load_index(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.empty())
    fail(IndexErrorKind::EmptyIndex, "empty index");

  std::istringstream hs(header);
  std::string magic, version, root_field, nodes_field;
  hs >> magic >> version >> root_field >> nodes_field;
  if (magic != "PREFQ-IDX")
    fail(IndexErrorKind::VersionMismatch, "not a PREFQ-IDX stream");
  if (version != "v1")
    fail(IndexErrorKind::VersionMismatch,
         "unsupported index version '" + version + "'");
  if (root_field.rfind("root=", 0) != 0 || nodes_field.rfind("nodes=", 0) != 0)
    fail(IndexErrorKind::MalformedLine, "malformed index header");
  auto declared = parse_u64(std::string_view(nodes_field).substr(6));
  if (!declared) fail(IndexErrorKind::MalformedLine, "malformed node count");

  AnnotatedDataGuide dg;
  dg.root_label = root_field.substr(5);
  dg.node_count = static_cast<size_t>(*declared);

  size_t seen = 0;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      fail(IndexErrorKind::MalformedLine,
           "malformed index line " + std::to_string(line_no));

    PathKey key;
    {
      std::string_view p(line.data(), tab);
      while (!p.empty()) {
        size_t slash = p.find('/');
        std::string_view label = p.substr(0, slash);
        if (label.empty())
          fail(IndexErrorKind::MalformedLine,
               "empty path step on line " + std::to_string(line_no));
        key.emplace_back(label);
        p = slash == std::string_view::npos ? std::string_view{}
                                            : p.substr(slash + 1);
      }
    }

    OccurrenceSeq occs;
    std::string_view rest(line.data() + tab + 1, line.size() - tab - 1);
    while (!rest.empty()) {
      size_t semi = rest.find(';');
      std::string_view item = rest.substr(0, semi);
      size_t c1 = item.find(',');
      size_t c2 = c1 == std::string_view::npos ? c1 : item.find(',', c1 + 1);
      if (c2 == std::string_view::npos)
        fail(IndexErrorKind::MalformedLine,
             "malformed occurrence on line " + std::to_string(line_no));
      auto s = parse_u64(item.substr(0, c1));
      auto e = parse_u64(item.substr(c1 + 1, c2 - c1 - 1));
      auto l = parse_u64(item.substr(c2 + 1));
      if (!s || !e || !l || *s == 0 || *e <= *s || *l == 0)
        fail(IndexErrorKind::MalformedLine,
             "malformed occurrence on line " + std::to_string(line_no));
      occs.push_back({static_cast<uint32_t>(*s), static_cast<uint32_t>(*e),
                      static_cast<uint32_t>(*l)});
      rest = semi == std::string_view::npos ? std::string_view{}
                                            : rest.substr(semi + 1);
    }
    if (occs.empty())
      fail(IndexErrorKind::MalformedLine,
           "entry without occurrences on line " + std::to_string(line_no));
    for (size_t i = 1; i < occs.size(); ++i)
      if (occs[i - 1].start >= occs[i].start)
        fail(IndexErrorKind::UnsortedOccurrences,
             "unsorted occurrences on line " + std::to_string(line_no));
    seen += occs.size();
    if (!dg.entries.emplace(std::move(key), std::move(occs)).second)
      fail(IndexErrorKind::MalformedLine,
           "duplicate path on line " + std::to_string(line_no));
  }

  if (dg.entries.empty())
    fail(IndexErrorKind::EmptyIndex, "empty index");
  if (seen != dg.node_count)
    fail(IndexErrorKind::Truncated,
         "index holds " + std::to_string(seen) + " occurrences, header says " +
             std::to_string(dg.node_count));
  return dg;
}

void save_index_file(const AnnotatedDataGuide& dg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write index file: " + path);
  save_index(dg, out);
  if (!out.flush())
    throw std::runtime_error("failed writing index file: " + path);
}

AnnotatedDataGuide load_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index file: " + path);
  return load_index(in);
}

DocAtlas::DocAtlas(const AnnotatedDataGuide& dg) {
  for (const auto& [key, occs] : dg.entries)
    by_start_.insert(by_start_.end(), occs.begin(), occs.end());
  std::sort(by_start_.begin(), by_start_.end(),
            [](const RegionLabel& a, const RegionLabel& b) { return a.start < b.start; });
  parent_.assign(by_start_.size(), -1);
  slot_.reserve(by_start_.size());
  std::vector<int> open;
  for (int i = 0; i < static_cast<int>(by_start_.size()); ++i) {
    while (!open.empty() && by_start_[open.back()].end < by_start_[i].start)
      open.pop_back();
    parent_[i] = open.empty() ? -1 : open.back();
    slot_[by_start_[i].start] = i;
    open.push_back(i);
  }
}

bool DocAtlas::parent_of(const RegionLabel& r, RegionLabel& out) const {
  auto it = slot_.find(r.start);
  if (it == slot_.end())
    throw std::out_of_range("region " + to_string(r) + " is not in the index");
  int p = parent_[it->second];
  if (p < 0) return false;
  out = by_start_[p];
  return true;
}

RegionLabel DocAtlas::ancestor_at(const RegionLabel& r, uint32_t k) const {
  RegionLabel cur = r;
  for (uint32_t i = 0; i < k; ++i) {
    RegionLabel up;
    if (!parent_of(cur, up))
      throw std::out_of_range("ancestor chain of " + to_string(r) +
                              " is shorter than " + std::to_string(k));
    cur = up;
  }
  return cur;
}

}  // namespace prefq
