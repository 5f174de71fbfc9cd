#include <roughel/generate.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace roughel {

namespace {

int pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<unsigned long long>(n));
}

bool chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

struct Signature {
  std::vector<Symbol> concepts;
  std::vector<Symbol> roles;
  std::vector<Symbol> inds;
};

Signature make_signature(std::mt19937_64& rng, const GenOptions& o) {
  static const char* kConcepts[] = {"A", "B", "C", "D", "E", "F", "G", "H"};
  static const char* kRoles[] = {"r", "s", "t", "u"};
  static const char* kInds[] = {"a", "b", "c", "d", "e", "f"};
  Signature sig;
  int nc = 1 + pick(rng, std::min(o.max_concepts, 8));
  int nr = 1 + pick(rng, std::min(o.max_roles, 4));
  int ni = 1 + pick(rng, std::min(o.max_individuals, 6));
  for (int i = 0; i < nc; ++i) sig.concepts.push_back(Symbol::concept_name(kConcepts[i]));
  for (int i = 0; i < nr; ++i) sig.roles.push_back(Symbol::role_name(kRoles[i]));
  for (int i = 0; i < ni; ++i) sig.inds.push_back(Symbol::individual(kInds[i]));
  return sig;
}

Concept random_concept(std::mt19937_64& rng, const Signature& sig,
                       const GenOptions& o, int depth) {
  if (depth <= 0 || chance(rng, 0.45)) {
    if (chance(rng, o.bot_prob)) return Concept::bot();
    if (chance(rng, 0.06)) return Concept::top();
    return Concept::name(sig.concepts[static_cast<size_t>(pick(rng, static_cast<int>(sig.concepts.size())))]);
  }
  if (chance(rng, o.approx_prob)) {
    Concept arg = random_concept(rng, sig, o, depth - 1);
    return chance(rng, 0.5) ? Concept::upper(arg) : Concept::lower(arg);
  }
  if (chance(rng, 0.5)) {
    return Concept::conj(random_concept(rng, sig, o, depth - 1),
                         random_concept(rng, sig, o, depth - 1));
  }
  Symbol role = sig.roles[static_cast<size_t>(pick(rng, static_cast<int>(sig.roles.size())))];
  return Concept::exists(role, random_concept(rng, sig, o, depth - 1));
}

}  // namespace

KnowledgeBase random_kb(std::mt19937_64& rng, const GenOptions& o) {
  Signature sig = make_signature(rng, o);
  KnowledgeBase kb;

  int ng = pick(rng, o.max_gcis + 1);
  for (int i = 0; i < ng; ++i) {
    kb.gcis.push_back({random_concept(rng, sig, o, 2), random_concept(rng, sig, o, 2)});
  }

  // Acyclic by construction (sub index strictly below sup index), so the
  // saturator's no-synonym precondition holds for every generated KB.
  for (size_t i = 0; i + 1 < sig.roles.size(); ++i) {
    for (size_t j = i + 1; j < sig.roles.size(); ++j) {
      if (chance(rng, 0.15)) kb.ris.push_back({sig.roles[i], sig.roles[j]});
    }
  }

  int na = pick(rng, o.max_abox + 1);
  auto ind = [&] { return sig.inds[static_cast<size_t>(pick(rng, static_cast<int>(sig.inds.size())))]; };
  for (int i = 0; i < na; ++i) {
    int kind = pick(rng, 100);
    if (kind < 50) {
      Concept c = Concept::name(
          sig.concepts[static_cast<size_t>(pick(rng, static_cast<int>(sig.concepts.size())))]);
      kb.concept_assertions.push_back({c, ind()});
    } else if (kind < 65) {
      kb.concept_assertions.push_back({random_concept(rng, sig, o, 2), ind()});
    } else if (kind < 85) {
      Symbol role = sig.roles[static_cast<size_t>(pick(rng, static_cast<int>(sig.roles.size())))];
      kb.role_assertions.push_back({role, ind(), ind()});
    } else {
      kb.indisc_assertions.push_back({ind(), ind()});
    }
  }

  kb.canonicalize();
  return kb;
}

ConjunctiveQuery random_query(std::mt19937_64& rng, const KnowledgeBase& kb,
                              const GenOptions& o) {
  static const char* kVars[] = {"x", "y", "z", "w"};
  std::vector<Symbol> concepts = kb.concept_names();
  std::vector<Symbol> roles = kb.role_names();
  std::vector<Symbol> inds = kb.individuals();

  ConjunctiveQuery q;
  auto term = [&]() -> Term {
    if (!inds.empty() && chance(rng, 0.25)) {
      return Term::ind(inds[static_cast<size_t>(pick(rng, static_cast<int>(inds.size())))]);
    }
    return Term::var(Symbol::variable(kVars[pick(rng, 4)]));
  };
  auto query_concept = [&]() -> Concept {
    Concept base = Concept::name(
        concepts[static_cast<size_t>(pick(rng, static_cast<int>(concepts.size())))]);
    int kind = pick(rng, 100);
    if (kind < 55) return base;
    if (kind < 70) return Concept::upper(base);
    if (kind < 85) return Concept::lower(base);
    if (kind < 95 && !roles.empty()) {
      Symbol role = roles[static_cast<size_t>(pick(rng, static_cast<int>(roles.size())))];
      return Concept::exists(role, base);
    }
    Concept other = Concept::name(
        concepts[static_cast<size_t>(pick(rng, static_cast<int>(concepts.size())))]);
    return Concept::conj(base, other);
  };

  int natoms = 1 + pick(rng, o.max_query_atoms);
  for (int i = 0; i < natoms; ++i) {
    int kind = pick(rng, 100);
    if (kind < 45 && !concepts.empty()) {
      q.concept_atoms.push_back({query_concept(), term()});
    } else if (kind < 80 && !roles.empty()) {
      Symbol role = roles[static_cast<size_t>(pick(rng, static_cast<int>(roles.size())))];
      q.role_atoms.push_back({role, term(), term()});
    } else {
      q.rho_atoms.push_back({term(), term()});
    }
  }
  if (q.concept_atoms.empty() && q.role_atoms.empty() && q.rho_atoms.empty()) {
    q.rho_atoms.push_back({term(), term()});
  }

  std::vector<Symbol> used = q.variables();
  std::shuffle(used.begin(), used.end(), rng);
  int nav = pick(rng, std::min(o.max_answer_vars, static_cast<int>(used.size())) + 1);
  q.answer_vars.assign(used.begin(), used.begin() + nav);
  q.canonicalize();
  return q;
}

}  // namespace roughel
