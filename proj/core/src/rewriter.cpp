#include <roughel/rewriter.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace roughel {

namespace {

class TermUnionFind {
 public:
  explicit TermUnionFind(const std::vector<Term>& terms) {
    for (const Term& t : terms) parent_.emplace(t, t);
  }

  Term find(Term t) {
    Term& p = parent_.at(t);
    if (!(p == t)) p = find(p);
    return p;
  }

  bool unite(Term a, Term b) {
    Term ra = find(a);
    Term rb = find(b);
    if (ra == rb) return false;
    if (rb < ra) std::swap(ra, rb);  // least term stays root for determinism
    parent_.at(rb) = ra;
    return true;
  }

  bool same(Term a, Term b) { return find(a) == find(b); }

  std::vector<std::vector<Term>> classes(const std::vector<Term>& terms) {
    std::map<Term, std::vector<Term>> by_root;
    for (const Term& t : terms) by_root[find(t)].push_back(t);
    std::vector<std::vector<Term>> out;
    for (auto& [root, members] : by_root) out.push_back(std::move(members));
    return out;  // ordered by root = least member; members inherit term order
  }

 private:
  std::map<Term, Term> parent_;
};

TermUnionFind rho_uf(const ConjunctiveQuery& q) {
  TermUnionFind uf(q.terms());
  for (const RhoAtom& a : q.rho_atoms) uf.unite(a.s, a.t);
  return uf;
}

// ~q^r: start from object pairs of role atoms with indiscernible objects,
// then propagate object equivalence to subjects until nothing changes.
TermUnionFind role_uf(const ConjunctiveQuery& q) {
  TermUnionFind rho = rho_uf(q);
  TermUnionFind uf(q.terms());
  const auto& atoms = q.role_atoms;
  for (size_t i = 0; i < atoms.size(); ++i) {
    for (size_t j = i + 1; j < atoms.size(); ++j) {
      if (rho.same(atoms[i].t, atoms[j].t)) uf.unite(atoms[i].t, atoms[j].t);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < atoms.size(); ++i) {
      for (size_t j = i + 1; j < atoms.size(); ++j) {
        if (uf.same(atoms[i].t, atoms[j].t) && uf.unite(atoms[i].s, atoms[j].s)) {
          changed = true;
        }
      }
    }
  }
  return uf;
}

std::set<Symbol> role_candidates(const ConjunctiveQuery& q, const RoleHierarchy& roles) {
  std::set<Symbol> out = roles.known_roles();
  for (const RoleAtom& a : q.role_atoms) out.insert(a.role);
  return out;
}

std::vector<Symbol> implicants_of(const std::set<Symbol>& candidates,
                                  const std::set<Symbol>& roleset,
                                  const RoleHierarchy& roles) {
  std::vector<Symbol> out;
  for (Symbol c : candidates) {
    bool all = true;
    for (Symbol s : roleset) {
      if (!roles.entails(c, s)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(c);
  }
  return out;
}

std::vector<Symbol> prime_implicants_of(const std::set<Symbol>& candidates,
                                        const std::set<Symbol>& roleset,
                                        const RoleHierarchy& roles) {
  std::vector<Symbol> imps = implicants_of(candidates, roleset, roles);
  std::vector<Symbol> primes;
  for (Symbol r : imps) {
    bool maximal = true;
    for (Symbol other : imps) {
      if (other != r && roles.entails(r, other)) {
        maximal = false;
        break;
      }
    }
    if (maximal) primes.push_back(r);
  }
  return primes;
}

}  // namespace

std::vector<std::vector<Term>> rho_equiv_classes(const ConjunctiveQuery& q) {
  TermUnionFind uf = rho_uf(q);
  return uf.classes(q.terms());
}

std::vector<std::vector<Term>> role_equiv_classes(const ConjunctiveQuery& q) {
  TermUnionFind uf = role_uf(q);
  return uf.classes(q.terms());
}

FilterSets compute_filters(const ConjunctiveQuery& q, const RoleHierarchy& roles) {
  FilterSets fs;
  std::vector<Term> terms = q.terms();
  TermUnionFind rho = rho_uf(q);
  TermUnionFind req = role_uf(q);
  std::vector<std::vector<Term>> classes = req.classes(terms);

  std::set<Symbol> answers(q.answer_vars.begin(), q.answer_vars.end());
  std::set<Symbol> quantified;
  for (Symbol v : q.variables()) {
    if (!answers.count(v)) quantified.insert(v);
  }
  std::set<Symbol> candidates = role_candidates(q, roles);

  // Pre and In per ~q^r class, read off the role atoms.
  std::vector<std::set<Term>> pre(classes.size());
  std::vector<std::set<Symbol>> in(classes.size());
  auto class_of = [&](const Term& t) {
    for (size_t k = 0; k < classes.size(); ++k) {
      if (std::binary_search(classes[k].begin(), classes[k].end(), t)) return k;
    }
    return classes.size();
  };
  for (const RoleAtom& a : q.role_atoms) {
    size_t k = class_of(a.t);
    pre[k].insert(a.s);
    in[k].insert(a.role);
  }

  for (Symbol v : quantified) {
    size_t k = class_of(Term::var(v));
    if (!in[k].empty() && implicants_of(candidates, in[k], roles).empty()) {
      fs.fork_neq.push_back(v);
    }
  }

  for (size_t k = 0; k < classes.size(); ++k) {
    if (pre[k].size() >= 2) {
      fs.fork_eq.push_back({{pre[k].begin(), pre[k].end()}, classes[k]});
    }
    if (!pre[k].empty()) {
      std::vector<Symbol> primes = prime_implicants_of(candidates, in[k], roles);
      bool outside = false;
      for (Symbol p : primes) {
        if (!in[k].count(p)) outside = true;
      }
      if (outside) fs.fork_h.push_back({primes, classes[k]});
    }
  }

  // Cyc: quotient the terms by the join of ~q^r and ~q^rho; nodes are the
  // merged classes, edges come from role atoms. A quantified variable is
  // cyclic iff its node reaches a node lying on a directed cycle.
  TermUnionFind join(terms);
  for (const RhoAtom& a : q.rho_atoms) join.unite(a.s, a.t);
  for (const std::vector<Term>& cls : classes) {
    for (size_t i = 1; i < cls.size(); ++i) join.unite(cls[0], cls[i]);
  }
  std::map<Term, size_t> node_of;
  for (const Term& t : terms) {
    Term root = join.find(t);
    if (!node_of.count(root)) node_of.emplace(root, node_of.size());
  }
  size_t n = node_of.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const RoleAtom& a : q.role_atoms) {
    reach[node_of.at(join.find(a.s))][node_of.at(join.find(a.t))] = true;
  }
  for (size_t m = 0; m < n; ++m) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (reach[i][m] && reach[m][j]) reach[i][j] = true;
      }
    }
  }
  for (Symbol v : quantified) {
    size_t u = node_of.at(join.find(Term::var(v)));
    bool cyclic = reach[u][u];
    for (size_t w = 0; w < n && !cyclic; ++w) {
      cyclic = reach[u][w] && reach[w][w];
    }
    if (cyclic) fs.cyc.push_back(v);
  }
  return fs;
}

FOQuery unfold(const ConjunctiveQuery& q) {
  FOQuery out;
  out.answer_vars = q.answer_vars;
  std::set<Symbol> answers(q.answer_vars.begin(), q.answer_vars.end());
  for (Symbol v : q.variables()) {
    if (!answers.count(v)) out.exist_vars.push_back(v);
  }

  // Fresh variable names _u0, _u1, ... skipping any that already occur.
  int counter = 0;
  for (Symbol v : q.variables()) {
    const std::string& name = v.name();
    if (name.size() > 2 && name.rfind("_u", 0) == 0 &&
        name.find_first_not_of("0123456789", 2) == std::string::npos) {
      counter = std::max(counter, std::stoi(name.substr(2)) + 1);
    }
  }
  auto fresh = [&] {
    Symbol v = Symbol::variable("_u" + std::to_string(counter++));
    out.exist_vars.push_back(v);
    return Term::var(v);
  };

  auto expand = [&](auto&& self, Concept c, Term t) -> void {
    switch (c.kind()) {
      case CKind::Top:
      case CKind::Bot:
      case CKind::Name:
        out.concept_atoms.push_back({c, t});
        return;
      case CKind::And:
        self(self, c.lhs(), t);
        self(self, c.rhs(), t);
        return;
      case CKind::Exists: {
        Term y = fresh();
        out.role_atoms.push_back({c.role(), t, y});
        self(self, c.arg(), y);
        return;
      }
      case CKind::Upper: {
        Term y = fresh();
        out.rho_atoms.push_back({t, y});
        self(self, c.arg(), y);
        return;
      }
      case CKind::Lower: {
        Term y1 = fresh();
        Term y2 = fresh();
        out.rho_atoms.push_back({t, y1});
        out.rho_ell_atoms.push_back({y1, y2});
        self(self, c.arg(), y2);
        return;
      }
    }
  };
  for (const ConceptAtom& a : q.concept_atoms) expand(expand, a.c, a.t);
  out.role_atoms.insert(out.role_atoms.end(), q.role_atoms.begin(), q.role_atoms.end());
  out.rho_atoms.insert(out.rho_atoms.end(), q.rho_atoms.begin(), q.rho_atoms.end());

  std::sort(out.concept_atoms.begin(), out.concept_atoms.end());
  out.concept_atoms.erase(std::unique(out.concept_atoms.begin(), out.concept_atoms.end()),
                          out.concept_atoms.end());
  std::sort(out.role_atoms.begin(), out.role_atoms.end());
  out.role_atoms.erase(std::unique(out.role_atoms.begin(), out.role_atoms.end()),
                       out.role_atoms.end());
  std::sort(out.rho_atoms.begin(), out.rho_atoms.end());
  out.rho_atoms.erase(std::unique(out.rho_atoms.begin(), out.rho_atoms.end()),
                      out.rho_atoms.end());
  std::sort(out.rho_ell_atoms.begin(), out.rho_ell_atoms.end());
  return out;
}

FOQuery rewrite(const ConjunctiveQuery& q, const RoleHierarchy& roles) {
  FOQuery out = unfold(q);
  FilterSets fs = compute_filters(q, roles);

  std::set<Term> not_aux;
  for (Symbol v : q.answer_vars) not_aux.insert(Term::var(v));
  for (Symbol v : fs.fork_neq) not_aux.insert(Term::var(v));
  for (Symbol v : fs.cyc) not_aux.insert(Term::var(v));
  out.not_aux.assign(not_aux.begin(), not_aux.end());
  for (Symbol v : q.answer_vars) out.not_aux_rho.push_back(Term::var(v));
  std::sort(out.not_aux_rho.begin(), out.not_aux_rho.end());

  for (const FilterSets::ForkEq& fe : fs.fork_eq) {
    FOQuery::GuardedEq ge;
    ge.guard = fe.cls.front();  // least term of the class, the fixed representative
    for (size_t i = 0; i + 1 < fe.pre.size(); ++i) {
      ge.eqs.emplace_back(fe.pre[i], fe.pre[i + 1]);
    }
    out.guarded_eqs.push_back(std::move(ge));
  }

  for (const FilterSets::ForkH& fh : fs.fork_h) {
    FOQuery::GuardedOr go;
    go.guard = fh.cls.front();
    std::set<Term> pre;
    for (const RoleAtom& a : q.role_atoms) {
      if (std::binary_search(fh.cls.begin(), fh.cls.end(), a.t)) pre.insert(a.s);
    }
    go.pre = *pre.begin();  // nonempty by the Fork_H side condition
    go.roles = fh.implicants;
    out.guarded_ors.push_back(std::move(go));
  }
  return out;
}

}  // namespace roughel
