#pragma once

#include <roughel/ast.hpp>

#include <vector>

namespace roughel {

// Shapes of GCIs admitted by the normal form. ConjSub covers both the binary
// form (A and B) ⊑ C and the degenerate single-conjunct form A ⊑ C, with
// A, B concept names or top and C a concept name, top, or bot. The right-hand
// side of every other shape excludes bot.
enum class GciShape {
  ConjSub,      // (and A B) ⊑ C   or   A ⊑ C
  ExistsLeft,   // (some r A) ⊑ B
  ExistsRight,  // A ⊑ (some r B)
  LowerRight,   // A ⊑ (lower B)
  UpperRight,   // A ⊑ (upper B)
  LowerLeft,    // (lower A) ⊑ B
  NotNormal,
};

GciShape classify_gci(const Gci& g);

// True when every axiom classifies as one of the six normal shapes.
bool is_normal(const std::vector<Gci>& gcis);

struct NormalizedTBox {
  std::vector<Gci> axioms;          // sorted, deduplicated, all normal shapes
  std::vector<Ri> ris;              // passed through unchanged
  std::vector<Symbol> fresh_names;  // introduced names, in introduction order

  bool operator==(const NormalizedTBox&) const = default;
};

// Structural transformation to normal form. Axioms that already match a
// normal shape are kept verbatim; everything else is decomposed with fresh
// names _Nk (the counter skips indices already used in the input, so
// re-normalizing is collision-free and introduces no fresh names).
NormalizedTBox normalize(const std::vector<Gci>& gcis, const std::vector<Ri>& ris);

struct NormalizedKB {
  KnowledgeBase kb;                 // normal TBox, atomic assertion concepts
  std::vector<Symbol> fresh_names;
};

// Whole-KB normalization: complex concepts in assertions are replaced by a
// fresh name defined in the TBox (X(a) plus X ⊑ C), so the result satisfies
// the saturator's input contract. Assertions of top are kept as-is.
NormalizedKB normalize_kb(const KnowledgeBase& kb);

}  // namespace roughel
