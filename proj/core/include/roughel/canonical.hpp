#pragma once

#include <roughel/ast.hpp>
#include <roughel/saturator.hpp>
#include <roughel/structure.hpp>

namespace roughel {

// Canonical structure of a consistent saturated KB. The domain consists of
// named individuals, representatives x_C of concepts occurring in the KB,
// activated upper representatives, and lower representatives, except that
// members of unsatisfiable granules are excluded so the result is a model.
// Raises std::invalid_argument on an inconsistent input.
FiniteStructure build_canonical(const SaturatedKB& sat);

// Substructure induced by the elements reachable from named individuals over
// role and indiscernibility seed edges (plus every named individual itself).
// The partition is recomputed for the restricted domain.
FiniteStructure restrict_reachable(const FiniteStructure& s);

// The granule of a seed element, built from first principles: the seed, its
// lower representative, its upper representatives present in the structure,
// and, for named seeds, the same sets of every individual connected to it by
// asserted indiscernibilities. Always equals the partition class of e.
// Raises std::invalid_argument if e is not a seed in the domain.
std::set<ElementId> granule_of(const FiniteStructure& s, const ElementId& e);

// Full pipeline: normalize, saturate, build, restrict. Raises
// std::invalid_argument if the KB is inconsistent or has role synonyms.
struct Materialized {
  SaturatedKB sat;
  FiniteStructure full;       // canonical structure
  FiniteStructure reachable;  // restriction used for query answering
};
Materialized materialize(const KnowledgeBase& kb);

}  // namespace roughel
