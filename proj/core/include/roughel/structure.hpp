// Finite interpretations: element identities for the canonical-structure
// universe, extensions, the indiscernibility partition, and a semantic model
// checker used as a test referee.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "roughel/ast.hpp"

namespace roughel {

enum class Sort : uint8_t { Named, ConceptRep, UpperRep, LowerRep };

// Seed of a companion/lower element: a named individual or a concept
// representative, never nested deeper.
struct Seed {
  bool is_named = true;
  Symbol ind;  // valid iff is_named
  Concept c;   // valid iff !is_named

  static Seed named(Symbol individual) { return Seed{true, individual, Concept()}; }
  static Seed concept_rep(Concept c) { return Seed{false, Symbol(), c}; }

  friend bool operator==(const Seed&, const Seed&) = default;
  friend bool operator<(const Seed& a, const Seed& b) {
    if (a.is_named != b.is_named) return a.is_named;  // named seeds sort first
    if (a.is_named) return a.ind < b.ind;
    return Concept::compare(a.c, b.c) < 0;
  }
};

// Identity of a domain element:
//   Named(a)          -- ABox individual
//   ConceptRep(C)     -- x_C
//   UpperRep(C, e)    -- x_{C,e}
//   LowerRep(e)       -- l_e
struct ElementId {
  Sort sort = Sort::Named;
  Symbol ind;   // Named
  Concept c;    // ConceptRep, UpperRep
  Seed seed;    // UpperRep, LowerRep

  static ElementId named(Symbol individual) {
    return ElementId{Sort::Named, individual, Concept(), Seed()};
  }
  static ElementId concept_rep(Concept c) {
    return ElementId{Sort::ConceptRep, Symbol(), c, Seed()};
  }
  static ElementId upper_rep(Concept c, Seed seed) {
    return ElementId{Sort::UpperRep, Symbol(), c, seed};
  }
  static ElementId lower_rep(Seed seed) {
    return ElementId{Sort::LowerRep, Symbol(), Concept(), seed};
  }

  // The seed element this element belongs to: itself for Named/ConceptRep,
  // the stored seed for UpperRep/LowerRep.
  ElementId owning_seed() const {
    switch (sort) {
      case Sort::Named:
      case Sort::ConceptRep:
        return *this;
      default:
        return seed.is_named ? named(seed.ind) : concept_rep(seed.c);
    }
  }

  friend bool operator==(const ElementId&, const ElementId&) = default;
  friend bool operator<(const ElementId& a, const ElementId& b) {
    if (a.sort != b.sort) return a.sort < b.sort;
    switch (a.sort) {
      case Sort::Named:
        return a.ind < b.ind;
      case Sort::ConceptRep:
        return Concept::compare(a.c, b.c) < 0;
      case Sort::UpperRep: {
        if (int cc = Concept::compare(a.c, b.c); cc != 0) return cc < 0;
        return a.seed < b.seed;
      }
      case Sort::LowerRep:
        return a.seed < b.seed;
    }
    return false;
  }
};

using ElementPair = std::pair<ElementId, ElementId>;

// A finite interpretation. rho_seed holds the generating indiscernibility
// pairs; rho_partition/rho_class hold its reflexive-symmetric-transitive
// closure as granules. close_rho() must be called after mutating domain or
// rho_seed; all produced structures in this repo are closed.
struct FiniteStructure {
  std::set<ElementId> domain;
  std::map<Symbol, std::set<ElementId>> concept_ext;   // concept name -> elements
  std::map<Symbol, std::set<ElementPair>> role_ext;    // role name -> pairs
  std::set<ElementPair> rho_seed;
  std::vector<std::set<ElementId>> rho_partition;      // granules, canonical order
  std::set<ElementPair> rho_ell;                       // (e, l_e)
  std::set<ElementId> aux;                             // concept representatives
  std::set<ElementId> aux_rho;                         // upper/lower representatives

  // Declared signature: names with (possibly empty) extensions. The evaluator
  // treats a name outside the signature as an error, so builders declare every
  // name of the source KB even when its extension is empty.
  void declare_concept(Symbol name) { concept_ext.try_emplace(name); }
  void declare_role(Symbol name) { role_ext.try_emplace(name); }

  void close_rho();
  bool has_element(const ElementId& e) const { return domain.count(e) > 0; }
  int rho_class_of(const ElementId& e) const;                 // -1 if absent
  const std::set<ElementId>& granule_of(const ElementId& e) const;
  bool same_granule(const ElementId& a, const ElementId& b) const;

  friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;

private:
  std::map<ElementId, int> rho_class_;  // rebuilt by close_rho
};

// Extension of an arbitrary concept, computed recursively; Upper/Lower range
// over granules of the closed partition.
std::set<ElementId> eval_concept(const FiniteStructure& s, Concept c);

// True iff the structure satisfies every GCI, RI, and assertion of the KB.
// Named elements interpret individuals; a missing named element falsifies its
// assertions. Names missing from the signature have empty extensions here.
bool model_check(const FiniteStructure& s, const KnowledgeBase& kb);

// Like model_check but reports the first violated axiom, for diagnostics.
std::optional<std::string> first_violation(const FiniteStructure& s, const KnowledgeBase& kb);

}  // namespace roughel
