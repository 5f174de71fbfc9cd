#pragma once

#include <roughel/ast.hpp>

#include <random>

namespace roughel {

// Bounds for randomized KB and query generation. The defaults keep oracle
// runtime around a second per case while still exercising every constructor
// and every element sort of the canonical structure.
struct GenOptions {
  int max_concepts = 8;
  int max_roles = 4;
  int max_individuals = 6;
  int max_gcis = 12;
  int max_abox = 10;
  int max_query_atoms = 6;
  int max_answer_vars = 2;
  double approx_prob = 0.4;  // chance a generated concept node is upper/lower
  double bot_prob = 0.05;    // chance a leaf is bot (most KBs stay consistent)
};

// Random KB over a small fixed signature. Role inclusions are generated
// acyclically, so the result never contains role synonyms. Assertions may
// carry complex concepts; the KB is canonicalized before returning.
KnowledgeBase random_kb(std::mt19937_64& rng, const GenOptions& opts = {});

// Random conjunctive query over the signature of kb. Individuals mentioned in
// the query occur in the KB, every answer variable occurs in an atom, and
// answer variables are pairwise distinct (the well-formedness answer() checks).
ConjunctiveQuery random_query(std::mt19937_64& rng, const KnowledgeBase& kb,
                              const GenOptions& opts = {});

}  // namespace roughel
