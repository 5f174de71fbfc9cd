#pragma once

#include <roughel/ast.hpp>
#include <roughel/roles.hpp>
#include <roughel/structure.hpp>

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace roughel {

// Mutually including distinct role names make prime implicants ambiguous, so
// such KBs are rejected up front. Returns the least witnessing pair, if any.
std::optional<std::pair<Symbol, Symbol>> role_synonyms(const std::vector<Ri>& ris);

// Least fixpoint of the completion rules over the canonical-universe elements:
// named individuals, one representative x_C per concept occurring in the KB,
// one lower representative ℓ_e per seed, and lazily activated upper
// representatives x_{B,e}. Labels are effective label sets: granule-wide
// derivations (lower approximations) are included for every granule member.
struct SaturatedKB {
  KnowledgeBase kb;  // normalized input
  RoleHierarchy roles;

  std::set<Concept> seed_concepts;            // C with x_C justified by the KB
  std::map<Concept, ElementId> concept_reps;  // includes a fallback rep for top
  std::set<ElementId> universe;
  std::map<ElementId, std::set<Symbol>> labels;
  std::set<ElementId> bot;  // members of granules entailed to be unsatisfiable
  std::map<ElementId, std::set<std::pair<Symbol, ElementId>>> successors;
  std::set<ElementPair> rho_edges;  // directed indiscernibility seed pairs
  std::vector<std::set<ElementId>> granules;  // partition of the universe
  std::map<ElementId, int> granule_index;
  std::set<ElementId> live;  // reachable from named individuals
  bool inconsistent = false;

  bool has_label(const ElementId& e, Symbol name) const;
  bool has_bot(const ElementId& e) const;
  const std::set<ElementId>& granule_of(const ElementId& e) const;
  const std::set<std::pair<Symbol, ElementId>>& successors_of(const ElementId& e) const;
};

// Preconditions: TBox in normal form, assertion concepts atomic, no role
// synonyms. Violations raise std::invalid_argument. Inconsistency is a
// result, not an error: only elements reachable from named individuals can
// witness it.
SaturatedKB saturate(const KnowledgeBase& kb);

// True iff K ⊨ c ⊑ d. c must be a concept name or a concept represented in
// the universe; d may be any concept of the language.
bool entails_subsumption(const SaturatedKB& sat, Concept c, Concept d);

// True iff K ⊨ c(individual). The individual must occur in the ABox.
bool entails_assertion(const SaturatedKB& sat, Concept c, Symbol individual);

bool entails_role_inclusion(const SaturatedKB& sat, Symbol r, Symbol s);

}  // namespace roughel
