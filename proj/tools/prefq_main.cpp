#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "prefq/dataguide.hpp"
#include "prefq/doc_model.hpp"
#include "prefq/engine.hpp"
#include "prefq/query.hpp"
#include "prefq/rewriter.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;     // unreadable files, bad documents, bad index
constexpr int kExitQuery = 3;     // query parse errors
constexpr int kExitInternal = 4;  // broken pipeline invariant

bool log_enabled() {
  const char* v = std::getenv("PREFQ_LOG");
  return v != nullptr && *v != '\0';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw prefq::DocError("cannot open " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A file is an index iff it starts with the index magic; anything else is
// treated as an XML document.
prefq::AnnotatedDataGuide load_guide(const std::string& path) {
  std::string content = read_file(path);
  if (content.rfind("PREFQ-IDX", 0) == 0) {
    std::istringstream in(content);
    return prefq::load_index(in);
  }
  return prefq::build_dataguide(prefq::parse_document(content));
}

ordered_json region_json(const std::string& label, const prefq::RegionLabel& r) {
  return ordered_json{
      {"label", label}, {"start", r.start}, {"end", r.end}, {"level", r.level}};
}

ordered_json row_json(const prefq::FlatQuery& fq, const prefq::CandidateRow& row,
                      const std::vector<int>& pref_columns) {
  ordered_json bindings = ordered_json::array();
  for (size_t i = 0; i < fq.nodes.size(); ++i) {
    if (row.bindings[i])
      bindings.push_back(region_json(fq.nodes[i].label, *row.bindings[i]));
    else
      bindings.push_back(nullptr);
  }
  ordered_json flags = ordered_json::array();
  for (int qid : pref_columns)
    flags.push_back(row.bindings[static_cast<size_t>(qid)] ? 1 : 0);
  return ordered_json{{"bindings", bindings}, {"flags", flags}};
}

int cmd_index(const std::string& doc_path, const std::string& out_path) {
  prefq::DocTree doc = prefq::parse_document(read_file(doc_path));
  prefq::AnnotatedDataGuide dg = prefq::build_dataguide(doc);
  prefq::save_index_file(dg, out_path);
  ordered_json line{{"kind", "index"},
                    {"nodes", dg.node_count},
                    {"paths", dg.entries.size()},
                    {"out", out_path}};
  std::cout << line.dump() << "\n";
  return kExitOk;
}

int cmd_query(const std::string& input_path, const std::string& query_text,
              const std::string& dominance, bool all_candidates, bool lists,
              bool no_timings, bool inject_bug) {
  prefq::AnnotatedDataGuide dg = load_guide(input_path);
  prefq::EngineOptions opt;
  opt.mode = dominance == "strict-equal"
                 ? prefq::DominanceMode::StrictFieldsEqual
                 : prefq::DominanceMode::FlagVector;
  opt.with_lists = lists;
  opt.inject_bug = inject_bug;
  prefq::QueryRun run = prefq::run_query(dg, query_text, opt);

  if (log_enabled()) {
    std::cerr << "rewritten query:\n" << run.rewritten;
    std::cerr << "stream entries: " << run.stats.effective_entries
              << ", advances: " << run.stats.advances
              << ", path solutions: " << run.stats.path_solutions << "\n";
  }
  for (const std::string& w : run.warnings)
    std::cout << ordered_json{{"kind", "warning"}, {"message", w}}.dump()
              << "\n";
  if (lists) {
    for (const auto& view : run.lists) {
      ordered_json line{{"kind", "list"},
                        {"tag", view.tag},
                        {"relative", view.relative},
                        {"entries", view.entries}};
      std::cout << line.dump() << "\n";
    }
  }
  if (all_candidates) {
    for (const auto& row : run.candidates.rows) {
      ordered_json line = row_json(run.flat, row, run.candidates.pref_columns);
      std::cout << ordered_json{{"kind", "candidate"},
                                {"bindings", line["bindings"]},
                                {"flags", line["flags"]}}
                       .dump()
                << "\n";
    }
  }
  for (const auto& row : run.answers) {
    ordered_json line = row_json(run.flat, row, run.candidates.pref_columns);
    std::cout << ordered_json{{"kind", "answer"},
                              {"bindings", line["bindings"]},
                              {"flags", line["flags"]}}
                     .dump()
              << "\n";
  }
  ordered_json summary{{"kind", "summary"},
                       {"query", query_text},
                       {"mode", dominance},
                       {"answers", run.answers.size()},
                       {"candidates", run.candidates.rows.size()},
                       {"advances", run.stats.advances},
                       {"streamEntries", run.stats.effective_entries},
                       {"listEntries", run.stats.artifact_entries}};
  if (!no_timings) {
    summary["timings"] = ordered_json{{"rewriteMs", run.timings.rewrite_ms},
                                      {"listsMs", run.timings.lists_ms},
                                      {"matchMs", run.timings.match_ms},
                                      {"skylineMs", run.timings.skyline_ms}};
  }
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_explain(const std::string& query_text) {
  prefq::QueryTree q = prefq::parse_query(query_text);
  for (const std::string& w : prefq::validate_query(q))
    std::cout << "warning: " << w << "\n";
  prefq::FlatQuery fq = prefq::flatten_query(q);
  std::cout << "query: " << prefq::unparse_query(q) << "\n\n";
  std::cout << "partition:\n"
            << prefq::render_partition(prefq::decompose(fq), fq) << "\n";
  std::cout << "rewritten:\n"
            << prefq::render_pref_path_tree(prefq::rewrite(fq));
  return kExitOk;
}

int cmd_selftest(uint64_t seed, int trials, bool inject_bug) {
  prefq::SelftestOutcome outcome =
      prefq::run_selftest(seed, trials, inject_bug);
  if (outcome.ok) {
    ordered_json line{{"kind", "selftest"},
                      {"trials", outcome.trials_run},
                      {"ok", true}};
    std::cout << line.dump() << "\n";
    return kExitOk;
  }
  ordered_json line{{"kind", "selftest"},
                    {"trials", outcome.trials_run},
                    {"ok", false},
                    {"document", outcome.doc_xml},
                    {"query", outcome.query_text},
                    {"detail", outcome.detail}};
  std::cout << line.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"XML preference-query engine"};
  app.require_subcommand(1);

  std::string doc_path, out_path, input_path, query_text, dominance = "flags";
  bool all_candidates = false, lists = false, no_timings = false;
  bool inject_bug = false;
  uint64_t seed = 1;
  int trials = 100;

  CLI::App* index = app.add_subcommand("index", "Build an index from XML");
  index->add_option("document", doc_path, "XML document path")->required();
  index->add_option("out", out_path, "output index path")->required();

  CLI::App* query = app.add_subcommand("query", "Evaluate a preference query");
  query->add_option("input", input_path, "index or XML document path")
      ->required();
  query->add_option("query", query_text, "query text")->required();
  query->add_option("--dominance", dominance, "flags|strict-equal")
      ->check(CLI::IsMember({"flags", "strict-equal"}));
  query->add_flag("--all-candidates", all_candidates,
                  "also print the pre-skyline table");
  query->add_flag("--lists", lists, "print the runtime lists");
  query->add_flag("--no-timings", no_timings, "omit timings from the summary");
  query->add_flag("--inject-bug", inject_bug)->group("");

  CLI::App* explain = app.add_subcommand("explain", "Show the rewriting");
  explain->add_option("query", query_text, "query text")->required();

  CLI::App* selftest =
      app.add_subcommand("selftest", "Randomized equivalence trials");
  selftest->add_option("--trials", trials, "number of trials");
  selftest->add_option("--seed", seed, "random seed");
  selftest->add_flag("--inject-bug", inject_bug)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (index->parsed()) return cmd_index(doc_path, out_path);
    if (query->parsed())
      return cmd_query(input_path, query_text, dominance, all_candidates,
                       lists, no_timings, inject_bug);
    if (explain->parsed()) return cmd_explain(query_text);
    return cmd_selftest(seed, trials, inject_bug);
  } catch (const prefq::QueryError& e) {
    std::cerr << "query error: " << e.what() << "\n";
    return kExitQuery;
  } catch (const prefq::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const prefq::DocError& e) {
    std::cerr << "document error: " << e.what() << "\n";
    return kExitInput;
  } catch (const prefq::IndexError& e) {
    std::cerr << "index error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
