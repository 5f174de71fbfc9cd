// Command line front end: normalize, materialize, rewrite, answer, check,
// emit-sql, fuzz. Exit code 1 flags logic errors (inconsistent KB, role
// synonyms, unknown individuals, check/fuzz mismatches); exit code 2 flags
// I/O, parse, and usage errors.

#include "CLI11.hpp"

#include <roughel/canonical.hpp>
#include <roughel/evaluator.hpp>
#include <roughel/generate.hpp>
#include <roughel/normalizer.hpp>
#include <roughel/oracle.hpp>
#include <roughel/relational.hpp>
#include <roughel/rewriter.hpp>
#include <roughel/roles.hpp>
#include <roughel/textio.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

namespace {

using namespace roughel;

// Distinguishes bad input (exit 2) from bad logic (exit 1) at the top level.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out.flush()) throw IoError("cannot write " + path);
}

KnowledgeBase load_kb(const std::string& path) {
  return parse_kb(read_file(path));
}

ConjunctiveQuery load_query(const std::string& path) {
  return parse_query(read_file(path));
}

std::string render_tuple(const AnswerTuple& t) {
  if (t.empty()) return "()";  // boolean query satisfied
  std::string out;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += t[i].name();
  }
  return out;
}

void print_answers(std::ostream& os, const AnswerSet& answers) {
  for (const AnswerTuple& t : answers) os << render_tuple(t) << "\n";
}

// --depth beats ROUGHEL_DEPTH beats the oracle's built-in default.
std::optional<int> oracle_depth(std::optional<int> flag) {
  if (flag) return flag;
  const char* env = std::getenv("ROUGHEL_DEPTH");
  if (!env || !*env) return std::nullopt;
  int v = 0;
  try {
    size_t used = 0;
    v = std::stoi(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
  } catch (const std::exception&) {
    throw IoError("ROUGHEL_DEPTH must be an integer, got '" +
                  std::string(env) + "'");
  }
  return v;
}

int cmd_normalize(const std::string& kb_path) {
  NormalizedKB n = normalize_kb(load_kb(kb_path));
  std::cout << serialize_kb(n.kb);
  return 0;
}

int cmd_materialize(const std::string& kb_path,
                    const std::string& out_path) {
  Materialized m = materialize(load_kb(kb_path));
  std::string text = serialize_structure(m.reachable);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return 0;
}

int cmd_rewrite(const std::string& q_path, const std::string& kb_path) {
  ConjunctiveQuery q = load_query(q_path);
  KnowledgeBase kb = load_kb(kb_path);
  RoleHierarchy roles(kb.ris);
  if (roles.has_synonyms())
    throw std::invalid_argument("role hierarchy contains synonyms");
  std::cout << serialize_foquery(rewrite(q, roles));
  return 0;
}

int cmd_answer(const std::string& kb_path, const std::string& q_path) {
  print_answers(std::cout, answer(load_kb(kb_path), load_query(q_path)));
  return 0;
}

int cmd_check(const std::string& kb_path, const std::string& q_path,
              std::optional<int> depth_flag) {
  KnowledgeBase kb = load_kb(kb_path);
  ConjunctiveQuery q = load_query(q_path);
  std::optional<int> depth = oracle_depth(depth_flag);
  AnswerSet rewritten = answer(kb, q);
  AnswerSet reference = certain_answers_oracle(kb, q, depth);
  std::cout << "answer:\n";
  print_answers(std::cout, rewritten);
  std::cout << "oracle:\n";
  print_answers(std::cout, reference);
  if (depth) {
    std::cout << "depth: " << *depth << "\n";
  } else {
    std::cout << "depth: default\n";
  }
  bool equal = rewritten == reference;
  std::cout << "DIFF: " << (equal ? "equal" : "mismatch") << "\n";
  return equal ? 0 : 1;
}

int cmd_emit_sql(const std::string& kb_path, const std::string& q_path,
                 const std::string& outdir) {
  KnowledgeBase kb = load_kb(kb_path);
  ConjunctiveQuery q = load_query(q_path);
  RoleHierarchy roles(kb.ris);
  if (roles.has_synonyms())
    throw std::invalid_argument("role hierarchy contains synonyms");
  Materialized m = materialize(kb);
  RelationalEmission em = emit_relational(m.reachable, rewrite(q, roles));

  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create " + outdir + ": " + ec.message());
  auto path = [&](const std::string& name) {
    return (std::filesystem::path(outdir) / name).string();
  };
  write_file(path("schema.sql"), em.schema);
  write_file(path("query.sql"), em.query);
  for (const auto& [table, csv] : em.facts) write_file(path(table + ".csv"), csv);
  return 0;
}

int cmd_fuzz(uint64_t seed, int cases, std::optional<int> depth_flag) {
  std::optional<int> depth = oracle_depth(depth_flag);
  std::mt19937_64 rng(seed);
  GenOptions opts;  // defaults are the supported generator bounds
  int failures = 0, skipped = 0, checked = 0;
  for (int i = 0; i < cases; ++i) {
    KnowledgeBase kb = random_kb(rng, opts);
    ConjunctiveQuery q = random_query(rng, kb, opts);
    try {
      materialize(kb);
    } catch (const std::runtime_error&) {
      ++skipped;  // inconsistent; both routes would reject it
      continue;
    }
    AnswerSet direct = answer(kb, q);
    AnswerSet reference;
    try {
      reference = certain_answers_oracle(kb, q, depth);
    } catch (const std::runtime_error&) {
      ++skipped;  // oracle budget exhausted
      continue;
    }
    ++checked;
    if (direct == reference) continue;
    ++failures;
    std::cout << "FAIL case " << i << "\n";
    std::cout << "--- replay.rkb\n" << serialize_kb(kb);
    std::cout << "--- replay.rcq\n" << serialize_query(q) << "\n";
    std::cout << "--- answer\n";
    print_answers(std::cout, direct);
    std::cout << "--- oracle\n";
    print_answers(std::cout, reference);
  }
  std::cout << "cases: " << cases << ", checked: " << checked
            << ", skipped: " << skipped << ", failures: " << failures << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certain-answer pipeline for rough EL knowledge bases"};
  app.require_subcommand(1);

  std::string kb_path, q_path, out_path, outdir;
  std::optional<int> depth;
  uint64_t seed = 0;
  int cases = 100;

  CLI::App* normalize = app.add_subcommand(
      "normalize", "Print the normalized TBox and ABox");
  normalize->add_option("kb", kb_path, "knowledge base (.rkb)")->required();

  CLI::App* materialize_cmd = app.add_subcommand(
      "materialize", "Build the reachable canonical structure");
  materialize_cmd->add_option("kb", kb_path, "knowledge base (.rkb)")
      ->required();
  materialize_cmd->add_option("-o,--out", out_path,
                              "write the structure here instead of stdout");

  CLI::App* rewrite_cmd = app.add_subcommand(
      "rewrite", "Rewrite a conjunctive query into its filtered form");
  rewrite_cmd->add_option("query", q_path, "conjunctive query (.rcq)")
      ->required();
  rewrite_cmd
      ->add_option("--ris", kb_path,
                   "knowledge base supplying the role hierarchy (.rkb)")
      ->required();

  CLI::App* answer_cmd = app.add_subcommand(
      "answer", "Print certain answers, one tuple per line");
  answer_cmd->add_option("kb", kb_path, "knowledge base (.rkb)")->required();
  answer_cmd->add_option("query", q_path, "conjunctive query (.rcq)")
      ->required();

  CLI::App* check = app.add_subcommand(
      "check", "Compare the rewriting pipeline against the unraveling oracle");
  check->add_option("kb", kb_path, "knowledge base (.rkb)")->required();
  check->add_option("query", q_path, "conjunctive query (.rcq)")->required();
  check->add_option("--depth", depth, "truncation depth for the oracle");

  CLI::App* emit_sql = app.add_subcommand(
      "emit-sql", "Write schema.sql, query.sql, and CSV fact files");
  emit_sql->add_option("kb", kb_path, "knowledge base (.rkb)")->required();
  emit_sql->add_option("query", q_path, "conjunctive query (.rcq)")
      ->required();
  emit_sql->add_option("--outdir", outdir, "output directory")->required();

  CLI::App* fuzz = app.add_subcommand(
      "fuzz", "Randomized agreement campaign between pipeline and oracle");
  fuzz->add_option("--seed", seed, "generator seed");
  fuzz->add_option("--cases", cases, "number of cases");
  fuzz->add_option("--depth", depth, "truncation depth for the oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*normalize) return cmd_normalize(kb_path);
    if (*materialize_cmd) return cmd_materialize(kb_path, out_path);
    if (*rewrite_cmd) return cmd_rewrite(q_path, kb_path);
    if (*answer_cmd) return cmd_answer(kb_path, q_path);
    if (*check) return cmd_check(kb_path, q_path, depth);
    if (*emit_sql) return cmd_emit_sql(kb_path, q_path, outdir);
    if (*fuzz) return cmd_fuzz(seed, cases, depth);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const roughel::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}
