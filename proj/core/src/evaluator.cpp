#include "roughel/evaluator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "roughel/canonical.hpp"
#include "roughel/roles.hpp"

namespace roughel {

namespace {

// A term resolved against the structure: either a variable slot or a fixed
// element (for individual terms).
struct RTerm {
  int slot = -1;  // -1: fixed
  ElementId fixed;
};

enum class AtomKind { ConceptExt, Role, Rho, RhoEll };

struct CoreAtom {
  AtomKind kind;
  const std::set<ElementId>* ext = nullptr;        // ConceptExt
  const std::set<ElementPair>* pairs = nullptr;    // Role, RhoEll
  RTerm s, t;                                      // ConceptExt uses t only
};

void require_known_concepts(const FiniteStructure& s, Concept c) {
  switch (c.kind()) {
    case CKind::Top:
    case CKind::Bot:
      return;
    case CKind::Name:
      if (!s.concept_ext.count(c.name_sym()))
        throw std::invalid_argument("evaluate: unknown concept name: " +
                                    c.name_sym().name());
      return;
    case CKind::And:
      require_known_concepts(s, c.lhs());
      require_known_concepts(s, c.rhs());
      return;
    case CKind::Exists:
      if (!s.role_ext.count(c.role()))
        throw std::invalid_argument("evaluate: unknown role name: " +
                                    c.role().name());
      require_known_concepts(s, c.arg());
      return;
    case CKind::Upper:
    case CKind::Lower:
      require_known_concepts(s, c.arg());
      return;
  }
}

class Evaluator {
 public:
  Evaluator(const FiniteStructure& s, const FOQuery& q, const EvalOptions& opts)
      : s_(s), q_(q), opts_(opts) {
    collect_vars();
    build_atoms();
    build_indexes();
  }

  AnswerSet run() {
    if (unmatchable_) return {};
    for (const CoreAtom& a : atoms_) {
      if (ground(a) && !holds(a)) return {};
    }
    asg_.resize(vars_.size());
    bound_.assign(vars_.size(), false);
    search(0);
    return std::move(out_);
  }

 private:
  void collect_vars() {
    for (Symbol v : q_.answer_vars) vars_.push_back(v);
    for (Symbol v : q_.exist_vars) vars_.push_back(v);
    std::sort(vars_.begin(), vars_.end());
    vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
    for (size_t i = 0; i < vars_.size(); ++i) slot_[vars_[i]] = static_cast<int>(i);
  }

  RTerm resolve(const Term& t) {
    if (t.is_var) {
      auto it = slot_.find(t.sym);
      if (it == slot_.end())
        throw std::invalid_argument("evaluate: variable not quantified: " +
                                    t.sym.name());
      return RTerm{it->second, ElementId{}};
    }
    ElementId e = ElementId::named(t.sym);
    if (!s_.has_element(e)) unmatchable_ = true;
    return RTerm{-1, e};
  }

  void build_atoms() {
    // Atoms keep pointers into owned_exts_; no reallocation past this point.
    owned_exts_.reserve(q_.concept_atoms.size());
    for (const ConceptAtom& a : q_.concept_atoms) {
      require_known_concepts(s_, a.c);
      CoreAtom atom{AtomKind::ConceptExt, nullptr, nullptr, RTerm{}, resolve(a.t)};
      if (a.c.kind() == CKind::Name) {
        atom.ext = &s_.concept_ext.at(a.c.name_sym());
      } else if (a.c.kind() == CKind::Top) {
        atom.ext = &s_.domain;
      } else {
        owned_exts_.push_back(eval_concept(s_, a.c));
        atom.ext = &owned_exts_.back();
      }
      atoms_.push_back(atom);
    }
    for (const RoleAtom& a : q_.role_atoms) {
      auto it = s_.role_ext.find(a.role);
      if (it == s_.role_ext.end())
        throw std::invalid_argument("evaluate: unknown role name: " +
                                    a.role.name());
      atoms_.push_back(
          {AtomKind::Role, nullptr, &it->second, resolve(a.s), resolve(a.t)});
    }
    for (const RhoAtom& a : q_.rho_atoms) {
      atoms_.push_back({AtomKind::Rho, nullptr, nullptr, resolve(a.s), resolve(a.t)});
    }
    for (const RhoEllAtom& a : q_.rho_ell_atoms) {
      atoms_.push_back(
          {AtomKind::RhoEll, nullptr, &s_.rho_ell, resolve(a.s), resolve(a.t)});
    }
    if (unmatchable_) return;
    for (const Term& t : q_.not_aux) fnot_aux_.push_back(resolve(t));
    for (const Term& t : q_.not_aux_rho) fnot_aux_rho_.push_back(resolve(t));
    for (const auto& g : q_.guarded_eqs) {
      GEq ge{resolve(g.guard), {}};
      for (const auto& [a, b] : g.eqs) ge.eqs.emplace_back(resolve(a), resolve(b));
      feqs_.push_back(std::move(ge));
    }
    for (const auto& g : q_.guarded_ors) {
      fors_.push_back({resolve(g.guard), resolve(g.pre), g.roles});
    }
  }

  void build_indexes() {
    for (const CoreAtom& a : atoms_) {
      if (a.kind != AtomKind::Role && a.kind != AtomKind::RhoEll) continue;
      auto& fwd = fwd_[a.pairs];
      auto& bwd = bwd_[a.pairs];
      if (!fwd.empty() || !bwd.empty()) continue;
      for (const ElementPair& p : *a.pairs) {
        fwd[p.first].push_back(p.second);
        bwd[p.second].push_back(p.first);
      }
    }
  }

  ElementId value(const RTerm& t) const {
    return t.slot < 0 ? t.fixed : asg_[t.slot];
  }
  bool is_bound(const RTerm& t) const { return t.slot < 0 || bound_[t.slot]; }

  bool ground(const CoreAtom& a) const {
    if (a.kind == AtomKind::ConceptExt) return a.t.slot < 0;
    return a.s.slot < 0 && a.t.slot < 0;
  }

  bool holds(const CoreAtom& a) const {
    switch (a.kind) {
      case AtomKind::ConceptExt:
        return a.ext->count(value(a.t)) > 0;
      case AtomKind::Role:
      case AtomKind::RhoEll:
        return a.pairs->count({value(a.s), value(a.t)}) > 0;
      case AtomKind::Rho:
        return s_.same_granule(value(a.s), value(a.t));
    }
    return false;
  }

  // Candidate elements for variable v coming from one atom in which v occurs
  // and every other term is bound. nullopt: the atom does not constrain v yet.
  std::optional<std::vector<ElementId>> atom_candidates(const CoreAtom& a,
                                                        int v) const {
    auto from_set = [](const std::set<ElementId>& s) {
      return std::vector<ElementId>(s.begin(), s.end());
    };
    if (a.kind == AtomKind::ConceptExt) {
      if (a.t.slot != v) return std::nullopt;
      return from_set(*a.ext);
    }
    bool at_s = a.s.slot == v;
    bool at_t = a.t.slot == v;
    if (!at_s && !at_t) return std::nullopt;
    if (at_s && at_t) {  // both ends are v
      std::vector<ElementId> out;
      if (a.kind == AtomKind::Rho) {
        return from_set(s_.domain);  // rho is reflexive on the domain
      }
      for (const ElementPair& p : *a.pairs)
        if (p.first == p.second) out.push_back(p.first);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    const RTerm& other = at_s ? a.t : a.s;
    if (!is_bound(other)) return std::nullopt;
    ElementId o = value(other);
    if (a.kind == AtomKind::Rho) {
      if (s_.rho_class_of(o) < 0) return std::vector<ElementId>{};
      return from_set(s_.granule_of(o));
    }
    const auto& idx = at_s ? bwd_.at(a.pairs) : fwd_.at(a.pairs);
    auto it = idx.find(o);
    if (it == idx.end()) return std::vector<ElementId>{};
    std::vector<ElementId> out = it->second;
    std::sort(out.begin(), out.end());
    return out;
  }

  // Intersection of all ready atom constraints on v; nullopt when no atom
  // constrains v yet (the caller falls back to the whole domain).
  std::optional<std::vector<ElementId>> var_candidates(int v) const {
    std::optional<std::vector<ElementId>> acc;
    for (const CoreAtom& a : atoms_) {
      auto c = atom_candidates(a, v);
      if (!c) continue;
      if (!acc) {
        acc = std::move(c);
      } else {
        std::vector<ElementId> merged;
        std::set_intersection(acc->begin(), acc->end(), c->begin(), c->end(),
                              std::back_inserter(merged));
        acc = std::move(merged);
      }
      if (acc->empty()) break;
    }
    return acc;
  }

  bool filters_pass() const {
    for (const RTerm& t : fnot_aux_) {
      if (s_.aux.count(value(t))) return false;
    }
    for (const RTerm& t : fnot_aux_rho_) {
      if (s_.aux_rho.count(value(t))) return false;
    }
    for (const GEq& g : feqs_) {
      if (!s_.aux.count(value(g.guard))) continue;
      for (const auto& [a, b] : g.eqs)
        if (!(value(a) == value(b))) return false;
    }
    for (const GOr& g : fors_) {
      if (!s_.aux.count(value(g.guard))) continue;
      bool any = false;
      for (Symbol r : g.roles) {
        auto it = s_.role_ext.find(r);
        if (it != s_.role_ext.end() &&
            it->second.count({value(g.pre), value(g.guard)})) {
          any = true;
          break;
        }
      }
      if (!any) return false;
    }
    return true;
  }

  void emit() {
    if (opts_.apply_filters && !filters_pass()) return;
    AnswerTuple tuple;
    tuple.reserve(q_.answer_vars.size());
    for (Symbol v : q_.answer_vars) {
      ElementId e = asg_[slot_.at(v)];
      if (e.sort != Sort::Named) return;  // no individual to report
      tuple.push_back(e.ind);
    }
    out_.insert(std::move(tuple));
  }

  int pick_var(std::optional<std::vector<ElementId>>& cands) const {
    int best = -1;
    size_t best_size = 0;
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (bound_[i]) continue;
      if (opts_.order == JoinOrder::Lexicographic) {
        cands = var_candidates(static_cast<int>(i));
        return static_cast<int>(i);
      }
      auto c = var_candidates(static_cast<int>(i));
      size_t sz = c ? c->size() : s_.domain.size() + 1;
      if (best < 0 || sz < best_size) {
        best = static_cast<int>(i);
        best_size = sz;
        cands = std::move(c);
      }
    }
    return best;
  }

  void search(size_t depth) {
    if (depth == vars_.size()) {
      emit();
      return;
    }
    std::optional<std::vector<ElementId>> cands;
    int v = pick_var(cands);
    std::vector<ElementId> pool =
        cands ? std::move(*cands)
              : std::vector<ElementId>(s_.domain.begin(), s_.domain.end());
    for (const ElementId& e : pool) {
      asg_[v] = e;
      bound_[v] = true;
      bool ok = true;
      for (const CoreAtom& a : atoms_) {
        bool touches = (a.kind != AtomKind::ConceptExt && a.s.slot == v) ||
                       a.t.slot == v;
        if (touches && is_bound(a.s) && is_bound(a.t) && !holds(a)) {
          ok = false;
          break;
        }
      }
      if (ok) search(depth + 1);
      bound_[v] = false;
    }
  }

  struct GEq {
    RTerm guard;
    std::vector<std::pair<RTerm, RTerm>> eqs;
  };
  struct GOr {
    RTerm guard;
    RTerm pre;
    std::vector<Symbol> roles;
  };

  const FiniteStructure& s_;
  const FOQuery& q_;
  EvalOptions opts_;

  std::vector<Symbol> vars_;
  std::map<Symbol, int> slot_;
  std::vector<CoreAtom> atoms_;
  std::vector<std::set<ElementId>> owned_exts_;
  std::map<const std::set<ElementPair>*, std::map<ElementId, std::vector<ElementId>>>
      fwd_, bwd_;
  std::vector<RTerm> fnot_aux_, fnot_aux_rho_;
  std::vector<GEq> feqs_;
  std::vector<GOr> fors_;
  bool unmatchable_ = false;

  std::vector<ElementId> asg_;
  std::vector<bool> bound_;
  AnswerSet out_;
};

}  // namespace

AnswerSet evaluate(const FiniteStructure& s, const FOQuery& q,
                   const EvalOptions& opts) {
  Evaluator ev(s, q, opts);
  return ev.run();
}

AnswerSet answer(const KnowledgeBase& kb0, const ConjunctiveQuery& q0,
                 const EvalOptions& opts) {
  ConjunctiveQuery q = q0;
  q.canonicalize();
  if (std::string err = q.validate(); !err.empty())
    throw std::invalid_argument("answer: " + err);
  KnowledgeBase kb = kb0;
  kb.canonicalize();
  std::vector<Symbol> known = kb.individuals();
  for (Symbol i : q.individuals()) {
    if (!std::binary_search(known.begin(), known.end(), i))
      throw std::invalid_argument("answer: unknown individual in query: " +
                                  i.name());
  }
  RoleHierarchy roles(kb.ris);
  if (roles.has_synonyms())
    throw std::invalid_argument("answer: role synonyms present");
  Materialized m = materialize(kb);
  FOQuery f = rewrite(q, roles);
  // A query name outside the KB signature has an empty extension in every
  // model, so declare it instead of treating it as a mismatch.
  FiniteStructure s = m.reachable;
  std::function<void(Concept)> declare = [&](Concept c) {
    switch (c.kind()) {
      case CKind::Name:
        s.declare_concept(c.name_sym());
        return;
      case CKind::And:
        declare(c.lhs());
        declare(c.rhs());
        return;
      case CKind::Exists:
        s.declare_role(c.role());
        declare(c.arg());
        return;
      case CKind::Upper:
      case CKind::Lower:
        declare(c.arg());
        return;
      default:
        return;
    }
  };
  for (const ConceptAtom& a : q.concept_atoms) declare(a.c);
  for (const RoleAtom& a : q.role_atoms) s.declare_role(a.role);
  return evaluate(s, f, opts);
}

}  // namespace roughel
