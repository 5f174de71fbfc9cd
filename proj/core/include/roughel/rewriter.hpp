// Rewriting of conjunctive queries into filtered first-order queries whose
// evaluation over the reachable canonical structure yields certain answers.
#pragma once

#include <string>
#include <vector>

#include "roughel/ast.hpp"
#include "roughel/roles.hpp"

namespace roughel {

// rho_ell(s, t): t is the lower-representative companion of s. Produced only
// by unfolding Lower-concepts; never written in surface queries.
struct RhoEllAtom {
  Term s;
  Term t;
  friend bool operator==(const RhoEllAtom&, const RhoEllAtom&) = default;
  friend bool operator<(const RhoEllAtom& a, const RhoEllAtom& b) {
    if (a.s != b.s) return a.s < b.s;
    return a.t < b.t;
  }
};

// First-order query: an existentially quantified core conjunction (concept
// atoms over names/top/bot only) plus the filter conjuncts.
struct FOQuery {
  std::vector<Symbol> answer_vars;  // ordered projection
  std::vector<Symbol> exist_vars;   // quantified: original existentials + unfolding vars

  std::vector<ConceptAtom> concept_atoms;
  std::vector<RoleAtom> role_atoms;
  std::vector<RhoAtom> rho_atoms;
  std::vector<RhoEllAtom> rho_ell_atoms;

  std::vector<Term> not_aux;      // conjuncts not-Aux(t)
  std::vector<Term> not_aux_rho;  // conjuncts not-Aux_rho(t)

  struct GuardedEq {  // Aux(guard) -> /\ eqs
    Term guard;
    std::vector<std::pair<Term, Term>> eqs;
    friend bool operator==(const GuardedEq&, const GuardedEq&) = default;
  };
  struct GuardedOr {  // Aux(guard) -> \/_{r in roles} r(pre, guard)
    Term guard;
    Term pre;
    std::vector<Symbol> roles;
    friend bool operator==(const GuardedOr&, const GuardedOr&) = default;
  };
  std::vector<GuardedEq> guarded_eqs;
  std::vector<GuardedOr> guarded_ors;

  friend bool operator==(const FOQuery&, const FOQuery&) = default;
};

// The structure-shape sets driving the filters.
struct FilterSets {
  std::vector<Symbol> fork_neq;  // variables with no implicant of In([v])
  struct ForkEq {                // (Pre(zeta), zeta) with |Pre| >= 2
    std::vector<Term> pre;
    std::vector<Term> cls;
    friend bool operator==(const ForkEq&, const ForkEq&) = default;
  };
  std::vector<ForkEq> fork_eq;
  struct ForkH {  // (prime implicants of In(zeta), zeta)
    std::vector<Symbol> implicants;
    std::vector<Term> cls;
    friend bool operator==(const ForkH&, const ForkH&) = default;
  };
  std::vector<ForkH> fork_h;
  std::vector<Symbol> cyc;  // quantified variables reaching a role cycle

  friend bool operator==(const FilterSets&, const FilterSets&) = default;
};

// Equivalence classes of ~q^rho (merging the two sides of every rho atom)
// over all terms of q; singleton classes included; deterministic order.
std::vector<std::vector<Term>> rho_equiv_classes(const ConjunctiveQuery& q);

// Equivalence classes of ~q^r: the least reflexive-transitive relation that
// relates objects t, t' of role atoms whenever t ~rho t', closed under
// propagating object equivalence to the corresponding subjects.
std::vector<std::vector<Term>> role_equiv_classes(const ConjunctiveQuery& q);

FilterSets compute_filters(const ConjunctiveQuery& q, const RoleHierarchy& roles);

// Unfolds complex concept atoms into atoms over concept names: upper
// approximations become rho-steps, lower approximations rho_ell-steps,
// conjunctions split, existentials introduce role atoms. Fresh variables are
// named _u0, _u1, ... (collision-checked) and never enter the filter sets.
FOQuery unfold(const ConjunctiveQuery& q);

// Full rewriting: unfolded core plus filter conjuncts derived from the
// filter sets over the original query terms.
FOQuery rewrite(const ConjunctiveQuery& q, const RoleHierarchy& roles);

}  // namespace roughel
