#include "doctest.h"

#include <roughel/canonical.hpp>
#include <roughel/rewriter.hpp>
#include <roughel/roles.hpp>
#include <roughel/textio.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace roughel;

namespace {

// ROUGHEL_BIN and EXAMPLES_DIR come from the build system.
const std::string kBin = ROUGHEL_BIN;
const std::string kExamples = EXAMPLES_DIR;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = kBin + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string example(const std::string& name) { return kExamples + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_file(const std::string& name, const std::string& text) {
  std::string path =
      (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

}  // namespace

TEST_CASE("answer prints tuples in canonical order") {
  RunResult r = run("answer " + example("kex.rkb") + " " +
                    example("lowerB.rcq"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == "a\nb\n");
}

TEST_CASE("check agrees with the oracle on the examples") {
  for (const char* q : {"lowerB.rcq", "phi4.rcq"}) {
    RunResult r = run("check " + example("kex.rkb") + " " + example(q));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("DIFF: equal") != std::string::npos);
  }
}

TEST_CASE("rewrite emits the serialized filtered query") {
  RunResult r = run("rewrite " + example("phi4.rcq") + " --ris " +
                    example("empty.rkb"));
  CHECK(r.exit_code == 0);

  ConjunctiveQuery q = parse_query(read_file(example("phi4.rcq")));
  KnowledgeBase empty = parse_kb(read_file(example("empty.rkb")));
  CHECK(r.out == serialize_foquery(rewrite(q, RoleHierarchy(empty.ris))));
}

TEST_CASE("normalize output parses back") {
  RunResult r = run("normalize " + example("kex.rkb"));
  CHECK(r.exit_code == 0);
  KnowledgeBase kb = parse_kb(r.out);
  CHECK(!kb.gcis.empty());
}

TEST_CASE("materialize round-trips through the fact format") {
  std::string out =
      (std::filesystem::temp_directory_path() / "kex_cli.rfs").string();
  RunResult r = run("materialize " + example("kex.rkb") + " -o " + out);
  CHECK(r.exit_code == 0);

  FiniteStructure parsed = parse_structure(read_file(out));
  Materialized m = materialize(parse_kb(read_file(example("kex.rkb"))));
  CHECK(parsed == m.reachable);
  std::filesystem::remove(out);
}

TEST_CASE("emit-sql writes schema, query, and fact files") {
  auto dir = std::filesystem::temp_directory_path() / "roughel_sql_cli";
  std::filesystem::remove_all(dir);
  RunResult r = run("emit-sql " + example("kex.rkb") + " " +
                    example("lowerB.rcq") + " --outdir " + dir.string());
  CHECK(r.exit_code == 0);
  for (const char* f : {"schema.sql", "query.sql", "dom.csv", "rho.csv"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(read_file((dir / "query.sql").string()).find("SELECT DISTINCT") !=
        std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fuzz is deterministic under a fixed seed") {
  RunResult a = run("fuzz --seed 11 --cases 20");
  RunResult b = run("fuzz --seed 11 --cases 20");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("failures: 0") != std::string::npos);
}

TEST_CASE("exit codes separate logic errors from input errors") {
  CHECK(run("answer /nonexistent.rkb " + example("lowerB.rcq")).exit_code ==
        2);

  std::string bad = temp_file("cli_bad.rkb", "(((");
  CHECK(run("answer " + bad + " " + example("lowerB.rcq")).exit_code == 2);

  std::string bot = temp_file("cli_bot.rkb", "(assert bot a)\n");
  CHECK(run("answer " + bot + " " + example("lowerB.rcq")).exit_code == 1);

  std::string unknown =
      temp_file("cli_unknown.rcq", "(query (x) (atom A x) (atom A (ind zz)))\n");
  CHECK(run("answer " + example("kex.rkb") + " " + unknown).exit_code == 1);

  std::string synonyms =
      temp_file("cli_syn.rkb", "(subrole r s)\n(subrole s r)\n(assert A a)\n");
  CHECK(run("answer " + synonyms + " " + example("lowerB.rcq")).exit_code ==
        1);

  CHECK(run("no-such-subcommand").exit_code == 2);

  std::filesystem::remove(bad);
  std::filesystem::remove(bot);
  std::filesystem::remove(unknown);
  std::filesystem::remove(synonyms);
}

TEST_CASE("depth overrides reach the oracle") {
  RunResult env = run("check " + example("kex.rkb") + " " +
                      example("lowerB.rcq") + " --depth 6");
  CHECK(env.out.find("depth: 6") != std::string::npos);

  std::string cmd = "ROUGHEL_DEPTH=5 " + kBin + " check " +
                    example("kex.rkb") + " " + example("lowerB.rcq") + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), n);
  pclose(pipe);
  CHECK(out.find("depth: 5") != std::string::npos);
}
