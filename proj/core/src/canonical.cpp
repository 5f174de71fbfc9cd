#include <roughel/canonical.hpp>

#include <roughel/normalizer.hpp>

#include <map>
#include <stdexcept>
#include <vector>

namespace roughel {

namespace {

// Membership in the canonical domain. Unsatisfiable granules denote nothing
// in any model and are dropped wholesale; the fallback top representative
// (and anything seeded by it) stays internal unless top occurs in the KB.
bool in_domain(const SaturatedKB& sat, const ElementId& e) {
  if (sat.bot.count(e)) return false;
  Concept root;
  switch (e.sort) {
    case Sort::Named:
      return true;
    case Sort::ConceptRep:
      root = e.c;
      break;
    case Sort::UpperRep:
    case Sort::LowerRep:
      if (e.seed.is_named) return true;
      root = e.seed.c;
      break;
  }
  return sat.seed_concepts.count(root) > 0;
}

ElementId lower_of(const ElementId& seed) {
  return ElementId::lower_rep(seed.sort == Sort::Named
                                  ? Seed::named(seed.ind)
                                  : Seed::concept_rep(seed.c));
}

}  // namespace

FiniteStructure build_canonical(const SaturatedKB& sat) {
  if (sat.inconsistent) {
    throw std::runtime_error("build_canonical: inconsistent KB");
  }
  FiniteStructure s;
  for (Symbol a : sat.kb.concept_names()) s.declare_concept(a);
  for (Symbol r : sat.kb.role_names()) s.declare_role(r);
  for (Symbol r : sat.roles.known_roles()) s.declare_role(r);

  for (const ElementId& e : sat.universe) {
    if (!in_domain(sat, e)) continue;
    s.domain.insert(e);
    for (Symbol a : sat.labels.at(e)) s.concept_ext[a].insert(e);
    switch (e.sort) {
      case Sort::Named:
        break;
      case Sort::ConceptRep:
        s.aux.insert(e);
        break;
      case Sort::UpperRep:
      case Sort::LowerRep:
        s.aux_rho.insert(e);
        break;
    }
    if (e.sort == Sort::Named || e.sort == Sort::ConceptRep) {
      s.rho_ell.insert({e, lower_of(e)});
    }
  }

  for (const auto& [u, edges] : sat.successors) {
    if (!s.has_element(u)) continue;
    for (const auto& [r, v] : edges) {
      if (!s.has_element(v)) continue;
      for (Symbol sup : sat.roles.supers(r)) s.role_ext[sup].insert({u, v});
    }
  }
  for (const ElementPair& p : sat.rho_edges) {
    if (s.has_element(p.first) && s.has_element(p.second)) s.rho_seed.insert(p);
  }
  s.close_rho();
  return s;
}

FiniteStructure restrict_reachable(const FiniteStructure& s) {
  std::set<ElementId> keep;
  std::vector<ElementId> frontier;
  for (const ElementId& e : s.domain) {
    if (e.sort == Sort::Named && keep.insert(e).second) frontier.push_back(e);
  }
  std::multimap<ElementId, ElementId> out;
  for (const auto& [r, pairs] : s.role_ext) {
    for (const ElementPair& p : pairs) out.emplace(p.first, p.second);
  }
  for (const ElementPair& p : s.rho_seed) out.emplace(p.first, p.second);
  while (!frontier.empty()) {
    ElementId u = frontier.back();
    frontier.pop_back();
    for (auto [b, e] = out.equal_range(u); b != e; ++b) {
      if (keep.insert(b->second).second) frontier.push_back(b->second);
    }
  }

  FiniteStructure r;
  for (const ElementId& e : s.domain) {
    if (keep.count(e)) r.domain.insert(e);
  }
  for (const auto& [a, ext] : s.concept_ext) {
    auto& slot = r.concept_ext[a];
    for (const ElementId& e : ext) {
      if (keep.count(e)) slot.insert(e);
    }
  }
  for (const auto& [role, pairs] : s.role_ext) {
    auto& slot = r.role_ext[role];
    for (const ElementPair& p : pairs) {
      if (keep.count(p.first) && keep.count(p.second)) slot.insert(p);
    }
  }
  for (const ElementPair& p : s.rho_seed) {
    if (keep.count(p.first) && keep.count(p.second)) r.rho_seed.insert(p);
  }
  for (const ElementPair& p : s.rho_ell) {
    if (keep.count(p.first) && keep.count(p.second)) r.rho_ell.insert(p);
  }
  for (const ElementId& e : s.aux) {
    if (keep.count(e)) r.aux.insert(e);
  }
  for (const ElementId& e : s.aux_rho) {
    if (keep.count(e)) r.aux_rho.insert(e);
  }
  r.close_rho();
  return r;
}

std::set<ElementId> granule_of(const FiniteStructure& s, const ElementId& e) {
  bool seed_sort = e.sort == Sort::Named || e.sort == Sort::ConceptRep;
  if (!seed_sort || !s.has_element(e)) {
    throw std::invalid_argument("granule_of: element is not a seed of the structure");
  }

  // Named seeds pool their granules with every individual they are asserted
  // indiscernible from, transitively.
  std::set<ElementId> seeds{e};
  if (e.sort == Sort::Named) {
    bool grew = true;
    while (grew) {
      grew = false;
      for (const ElementPair& p : s.rho_seed) {
        if (p.first.sort != Sort::Named || p.second.sort != Sort::Named) continue;
        if (seeds.count(p.first) && seeds.insert(p.second).second) grew = true;
        if (seeds.count(p.second) && seeds.insert(p.first).second) grew = true;
      }
    }
  }

  std::set<ElementId> out;
  for (const ElementId& seed : seeds) {
    out.insert(seed);
    ElementId ell = lower_of(seed);
    if (s.has_element(ell)) out.insert(ell);
    Seed sd = seed.sort == Sort::Named ? Seed::named(seed.ind)
                                       : Seed::concept_rep(seed.c);
    for (const ElementId& d : s.domain) {
      if (d.sort == Sort::UpperRep && d.seed == sd) out.insert(d);
    }
  }
  return out;
}

Materialized materialize(const KnowledgeBase& kb) {
  Materialized m;
  m.sat = saturate(normalize_kb(kb).kb);
  if (m.sat.inconsistent) {
    throw std::runtime_error("materialize: inconsistent KB");
  }
  m.full = build_canonical(m.sat);
  m.reachable = restrict_reachable(m.full);
  // Normalization may drop names that occur only in tautological axioms;
  // the materialized signature must still cover the source KB.
  for (Symbol c : kb.concept_names()) {
    m.full.declare_concept(c);
    m.reachable.declare_concept(c);
  }
  for (Symbol r : kb.role_names()) {
    m.full.declare_role(r);
    m.reachable.declare_role(r);
  }
  return m;
}

}  // namespace roughel
