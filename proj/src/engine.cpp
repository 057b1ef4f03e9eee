#include "prefq/engine.hpp"

#include <chrono>
#include <sstream>

#include "prefq/doc_model.hpp"
#include "prefq/oracle.hpp"
#include "prefq/random_gen.hpp"
#include "prefq/rewriter.hpp"

namespace prefq {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

QueryRun run_query(const AnnotatedDataGuide& dg, const std::string& query_text,
                   const EngineOptions& opt) {
  QueryRun run;
  QueryTree q = parse_query(query_text);
  run.warnings = validate_query(q);
  run.flat = flatten_query(q);

  auto t0 = std::chrono::steady_clock::now();
  PrefPathTree rewritten = rewrite(run.flat);
  run.rewritten = render_pref_path_tree(rewritten);
  run.timings.rewrite_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  EvaluatedTree evaluated = assign_lists(dg, rewritten);
  if (opt.inject_bug)
    for (auto& node : evaluated.nodes) node.owners.clear();
  run.timings.lists_ms = ms_since(t0);

  if (opt.with_lists) {
    for (const auto& node : evaluated.nodes) {
      ListView view;
      view.tag = render_tag(*node.src);
      view.relative = node.src->is_relative;
      for (const auto& occ : node.artifact)
        view.entries.push_back(render_occurrence(occ));
      run.lists.push_back(std::move(view));
    }
  }

  t0 = std::chrono::steady_clock::now();
  DocAtlas atlas(dg);
  uint32_t doc_span_end = static_cast<uint32_t>(2 * dg.node_count);
  run.candidates =
      holistic_match(evaluated, run.flat, atlas, doc_span_end, &run.stats);
  run.timings.match_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  run.answers = skyline_filter(run.candidates, opt.mode);
  run.timings.skyline_ms = ms_since(t0);
  return run;
}

std::string render_row(const FlatQuery& fq, const CandidateRow& row) {
  std::ostringstream out;
  for (size_t i = 0; i < fq.nodes.size(); ++i) {
    if (i) out << ' ';
    out << fq.nodes[i].label << "=";
    if (row.bindings[i])
      out << to_string(*row.bindings[i]);
    else
      out << "absent";
  }
  return out.str();
}

namespace {

std::string describe_rows(const FlatQuery& fq,
                          const std::vector<CandidateRow>& rows,
                          size_t limit = 12) {
  std::ostringstream out;
  for (size_t i = 0; i < rows.size() && i < limit; ++i)
    out << "    " << render_row(fq, rows[i]) << "\n";
  if (rows.size() > limit) out << "    ...\n";
  return out.str();
}

// Runs one document/query pair through both the engine and the reference
// evaluator; reports the first divergence in `detail`.
bool case_agrees(const std::string& doc_xml, const std::string& query_text,
                 bool inject_bug, std::string& detail) {
  try {
    DocTree doc = parse_document(doc_xml);
    AnnotatedDataGuide dg = build_dataguide(doc);
    EngineOptions opt;
    opt.inject_bug = inject_bug;
    QueryRun run = run_query(dg, query_text, opt);
    PreferenceTable expected = oracle_candidates(doc, run.flat);

    if (run.candidates.rows != expected.rows) {
      std::ostringstream out;
      out << "candidate tables differ: engine " << run.candidates.rows.size()
          << " rows, reference " << expected.rows.size() << " rows\n";
      out << "  engine:\n" << describe_rows(run.flat, run.candidates.rows);
      out << "  reference:\n" << describe_rows(run.flat, expected.rows);
      detail = out.str();
      return false;
    }
    for (DominanceMode mode :
         {DominanceMode::FlagVector, DominanceMode::StrictFieldsEqual}) {
      std::vector<CandidateRow> got = skyline_filter(run.candidates, mode);
      std::vector<CandidateRow> want = oracle_skyline(expected, mode);
      if (got != want) {
        std::ostringstream out;
        out << "skyline differs ("
            << (mode == DominanceMode::FlagVector ? "flags" : "strict-equal")
            << "): engine " << got.size() << " rows, reference " << want.size()
            << " rows\n";
        out << "  engine:\n" << describe_rows(run.flat, got);
        out << "  reference:\n" << describe_rows(run.flat, want);
        detail = out.str();
        return false;
      }
    }
    return true;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
    return false;
  }
}

}  // namespace

SelftestOutcome run_selftest(uint64_t seed, int trials, bool inject_bug) {
  SelftestOutcome outcome;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::string doc_xml = random_document(rng);
    std::string query_text = random_query(rng);
    std::string detail;
    if (case_agrees(doc_xml, query_text, inject_bug, detail)) continue;

    // Shrink the counterexample while it still disagrees.
    bool reduced = true;
    while (reduced) {
      reduced = false;
      for (const std::string& smaller : shrink_document(doc_xml)) {
        std::string d;
        if (!case_agrees(smaller, query_text, inject_bug, d)) {
          doc_xml = smaller;
          detail = d;
          reduced = true;
          break;
        }
      }
      if (reduced) continue;
      for (const std::string& smaller : shrink_query(query_text)) {
        std::string d;
        if (!case_agrees(doc_xml, smaller, inject_bug, d)) {
          query_text = smaller;
          detail = d;
          reduced = true;
          break;
        }
      }
    }
    outcome.trials_run = t + 1;
    outcome.ok = false;
    outcome.doc_xml = doc_xml;
    outcome.query_text = query_text;
    outcome.detail = detail;
    return outcome;
  }
  outcome.trials_run = trials;
  outcome.ok = true;
  return outcome;
}

}  // namespace prefq
