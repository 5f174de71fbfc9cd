#include "doctest.h"

#include <roughel/normalizer.hpp>
#include <roughel/textio.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace roughel;

namespace {

Concept cn(const std::string& s) { return Concept::name(Symbol::concept_name(s)); }
Symbol rn(const std::string& s) { return Symbol::role_name(s); }

std::size_t nodes(Concept c) {
  switch (c.kind()) {
    case CKind::Top:
    case CKind::Bot:
    case CKind::Name:
      return 1;
    case CKind::And: return 1 + nodes(c.lhs()) + nodes(c.rhs());
    default: return 1 + nodes(c.arg());
  }
}

// Uniform random concept over a tiny signature, used for the size-bound and
// idempotence properties.
Concept random_concept(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 6);
  switch (pick(rng)) {
    case 0: return cn("A" + std::to_string(rng() % 4));
    case 1: return Concept::top();
    case 2: return rng() % 8 == 0 ? Concept::bot() : cn("B" + std::to_string(rng() % 3));
    case 3: return Concept::conj(random_concept(rng, depth - 1), random_concept(rng, depth - 1));
    case 4: return Concept::exists(rn("r" + std::to_string(rng() % 2)), random_concept(rng, depth - 1));
    case 5: return Concept::upper(random_concept(rng, depth - 1));
    default: return Concept::lower(random_concept(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("shape classification") {
  Concept A = cn("A"), B = cn("B"), C = cn("C");
  Symbol r = rn("r");
  CHECK(classify_gci({A, B}) == GciShape::ConjSub);
  CHECK(classify_gci({A, Concept::bot()}) == GciShape::ConjSub);
  CHECK(classify_gci({Concept::top(), A}) == GciShape::ConjSub);
  CHECK(classify_gci({Concept::conj(A, B), C}) == GciShape::ConjSub);
  CHECK(classify_gci({Concept::conj(A, Concept::top()), Concept::bot()}) == GciShape::ConjSub);
  CHECK(classify_gci({Concept::exists(r, A), B}) == GciShape::ExistsLeft);
  CHECK(classify_gci({A, Concept::exists(r, B)}) == GciShape::ExistsRight);
  CHECK(classify_gci({A, Concept::lower(B)}) == GciShape::LowerRight);
  CHECK(classify_gci({A, Concept::upper(B)}) == GciShape::UpperRight);
  CHECK(classify_gci({Concept::lower(A), B}) == GciShape::LowerLeft);

  // Not normal: bot right of a non-conjunction shape, upper on the left,
  // nested fillers, conjunctions of more than two names.
  CHECK(classify_gci({Concept::exists(r, A), Concept::bot()}) == GciShape::NotNormal);
  CHECK(classify_gci({Concept::upper(A), B}) == GciShape::NotNormal);
  CHECK(classify_gci({Concept::lower(A), Concept::bot()}) == GciShape::NotNormal);
  CHECK(classify_gci({A, Concept::exists(r, Concept::conj(A, B))}) == GciShape::NotNormal);
  CHECK(classify_gci({Concept::conj(A, Concept::conj(B, C)), C}) == GciShape::NotNormal);
  CHECK(classify_gci({Concept::conj(A, Concept::lower(B)), C}) == GciShape::NotNormal);
}

TEST_CASE("worked splits") {
  Concept A = cn("A"), B = cn("B"), C = cn("C"), D = cn("D");
  Symbol r = rn("r");

  SUBCASE("right conjunction with an approximation") {
    NormalizedTBox t = normalize({{C, Concept::conj(A, Concept::lower(B))}}, {});
    REQUIRE(t.axioms.size() == 2);
    CHECK(t.fresh_names.empty());
    std::set<Gci> got(t.axioms.begin(), t.axioms.end());
    CHECK(got.count({C, A}) == 1);
    CHECK(got.count({C, Concept::lower(B)}) == 1);
  }

  SUBCASE("complex filler on the left") {
    NormalizedTBox t = normalize({{Concept::exists(r, Concept::conj(A, B)), D}}, {});
    REQUIRE(t.axioms.size() == 2);
    REQUIRE(t.fresh_names.size() == 1);
    Concept x = Concept::name(t.fresh_names[0]);
    std::set<Gci> got(t.axioms.begin(), t.axioms.end());
    CHECK(got.count({Concept::conj(A, B), x}) == 1);
    CHECK(got.count({Concept::exists(r, x), D}) == 1);
  }

  SUBCASE("existential into bot splits") {
    NormalizedTBox t = normalize({{Concept::exists(r, A), Concept::bot()}}, {});
    REQUIRE(t.axioms.size() == 2);
    REQUIRE(t.fresh_names.size() == 1);
    Concept x = Concept::name(t.fresh_names[0]);
    std::set<Gci> got(t.axioms.begin(), t.axioms.end());
    CHECK(got.count({Concept::exists(r, A), x}) == 1);
    CHECK(got.count({x, Concept::bot()}) == 1);
  }

  SUBCASE("upper on the left uses the symmetric reading") {
    NormalizedTBox t = normalize({{Concept::upper(A), B}}, {});
    REQUIRE(t.axioms.size() == 2);
    REQUIRE(t.fresh_names.size() == 1);
    Concept x = Concept::name(t.fresh_names[0]);
    std::set<Gci> got(t.axioms.begin(), t.axioms.end());
    CHECK(got.count({A, Concept::lower(x)}) == 1);
    CHECK(got.count({x, B}) == 1);
  }

  SUBCASE("vacuous and trivial axioms are dropped") {
    NormalizedTBox t = normalize({{Concept::conj(A, Concept::bot()), B},
                                  {A, Concept::conj(Concept::top(), Concept::top())},
                                  {Concept::exists(r, Concept::bot()), B}},
                                 {});
    CHECK(t.axioms.empty());
    CHECK(t.fresh_names.empty());
  }

  SUBCASE("long conjunctions fold pairwise") {
    Concept lhs = Concept::conj(A, Concept::conj(B, Concept::conj(C, D)));
    NormalizedTBox t = normalize({{lhs, cn("E")}}, {});
    CHECK(is_normal(t.axioms));
    REQUIRE(t.fresh_names.size() == 2);
    // Folded pairs feed one another and end at the original right-hand side.
    for (const Gci& g : t.axioms) CHECK(classify_gci(g) == GciShape::ConjSub);
    CHECK(t.axioms.size() == 3);
  }
}

TEST_CASE("normal input is a fixpoint") {
  Concept A = cn("A"), B = cn("B");
  Symbol r = rn("r");
  std::vector<Gci> in = {
      {Concept::conj(A, B), Concept::bot()},
      {Concept::exists(r, A), B},
      {A, Concept::exists(r, Concept::top())},
      {A, Concept::lower(B)},
      {Concept::top(), Concept::upper(B)},
      {Concept::lower(A), B},
      {A, Concept::top()},  // normal (conjunction shape admits top)
  };
  NormalizedTBox t = normalize(in, {{rn("r"), rn("s")}});
  CHECK(t.fresh_names.empty());
  std::vector<Gci> sorted = in;
  std::sort(sorted.begin(), sorted.end());
  CHECK(t.axioms == sorted);
  REQUIRE(t.ris.size() == 1);
}

TEST_CASE("idempotence and size bound on random tboxes") {
  std::mt19937_64 rng(20240817);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Gci> in;
    std::size_t input_nodes = 0;
    int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      Concept l = random_concept(rng, 2);
      Concept r = random_concept(rng, 2);
      in.push_back({l, r});
      input_nodes += nodes(l) + nodes(r);
    }
    NormalizedTBox t = normalize(in, {});
    CHECK(is_normal(t.axioms));
    CHECK(t.axioms.size() <= 4 * input_nodes);

    NormalizedTBox again = normalize(t.axioms, {});
    CHECK(again.fresh_names.empty());
    CHECK(again.axioms == t.axioms);

    // Fresh names never collide with the input signature.
    std::set<std::string> sig;
    for (const Gci& g : in) {
      for (Concept c : {g.lhs, g.rhs}) {
        std::vector<Concept> stack{c};
        while (!stack.empty()) {
          Concept cur = stack.back();
          stack.pop_back();
          if (cur.kind() == CKind::Name) sig.insert(cur.name_sym().name());
          if (cur.kind() == CKind::And) {
            stack.push_back(cur.lhs());
            stack.push_back(cur.rhs());
          } else if (cur.kind() != CKind::Top && cur.kind() != CKind::Bot &&
                     cur.kind() != CKind::Name) {
            stack.push_back(cur.arg());
          }
        }
      }
    }
    for (Symbol s : t.fresh_names) CHECK(sig.count(s.name()) == 0);
  }
}

TEST_CASE("fresh name counter skips existing indices") {
  Concept n0 = cn("_N0"), n3 = cn("_N3");
  Symbol r = rn("r");
  NormalizedTBox t =
      normalize({{n0, n3}, {Concept::exists(r, Concept::conj(n0, n3)), n0}}, {});
  REQUIRE(t.fresh_names.size() == 1);
  CHECK(t.fresh_names[0].name() == "_N4");
}

TEST_CASE("kb normalization folds assertion concepts") {
  KnowledgeBase kb = parse_kb(
      "(subclass D (upper C))\n"
      "(subclass C (and A (lower B)))\n"
      "(assert C a)\n"
      "(assert (upper D) a)\n"
      "(assert (some r D) b)\n"
      "(indisc a b)\n");
  NormalizedKB n = normalize_kb(kb);
  CHECK(is_normal(n.kb.gcis));
  REQUIRE(n.fresh_names.size() == 2);
  // Atomic assertions survive unchanged; complex ones now use fresh names.
  std::set<std::string> asserted;
  for (const ConceptAssertion& ca : n.kb.concept_assertions) {
    REQUIRE(ca.c.kind() == CKind::Name);
    asserted.insert(ca.c.name_sym().name());
  }
  CHECK(asserted.count("C") == 1);
  CHECK(asserted.count("_N0") == 1);
  CHECK(asserted.count("_N1") == 1);
  CHECK(n.kb.indisc_assertions.size() == 1);

  // Repeated complex assertion concepts share one fresh name.
  KnowledgeBase kb2 = parse_kb("(assert (upper D) a)\n(assert (upper D) b)\n");
  NormalizedKB n2 = normalize_kb(kb2);
  CHECK(n2.fresh_names.size() == 1);
  CHECK(n2.kb.concept_assertions[0].c == n2.kb.concept_assertions[1].c);

  // Assertions of top are preserved, registering the individual.
  KnowledgeBase kb3 = parse_kb("(assert top c)\n");
  NormalizedKB n3 = normalize_kb(kb3);
  REQUIRE(n3.kb.concept_assertions.size() == 1);
  CHECK(n3.kb.concept_assertions[0].c == Concept::top());
  CHECK(n3.fresh_names.empty());
}
