#include "roughel/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "roughel/canonical.hpp"
#include "roughel/rewriter.hpp"
#include "roughel/textio.hpp"

namespace roughel {

std::string UPath::render() const {
  std::string out = render_element(elems.front());
  for (size_t i = 0; i < steps.size(); ++i) {
    out += ' ';
    out += steps[i] ? steps[i]->name() : std::string("rho");
    out += ' ';
    out += render_element(elems[i + 1]);
  }
  return out;
}

namespace {

// Lazily interned path nodes over the reachable canonical structure. A node
// is a root (a named element) or extends its parent by one role-labeled edge
// or one directed indiscernibility edge into a non-named element. cluster
// identifies the rho-class of the truncated unraveling: rho-steps inherit it,
// role-steps open a fresh one, named roots share their component's.
class Arena {
 public:
  struct Node {
    int parent = -1;
    int kind = 0;  // 0 root, 1 role step, 2 rho step
    Symbol role;   // kind 1 only: the stored edge label
    ElementId tail;
    int len = 0;
    int cluster = 0;
  };

  Arena(const FiniteStructure& re, const RoleHierarchy& roles,
        std::size_t budget)
      : re_(re), roles_(roles), budget_(budget) {
    for (const auto& [r, pairs] : re_.role_ext) {
      for (const auto& [d, e] : pairs) {
        if (e.sort == Sort::Named) {
          named_fwd_[r][d].push_back(e);
          named_bwd_[r][e].push_back(d);
        } else {
          role_steps_[d].push_back({r, e});
        }
      }
    }
    for (const auto& [d, e] : re_.rho_seed) {
      if (e.sort != Sort::Named) rho_steps_[d].push_back(e);
    }
    for (const auto& [e, ell] : re_.rho_ell) ell_of_[e] = ell;

    // Named components under the symmetric closure of named seed pairs.
    std::map<ElementId, ElementId> up;
    for (const ElementId& e : re_.domain) {
      if (e.sort == Sort::Named) up[e] = e;
    }
    std::function<ElementId(ElementId)> find = [&](ElementId e) {
      while (!(up.at(e) == e)) e = up[e] = up.at(up.at(e));
      return e;
    };
    for (const auto& [a, b] : re_.rho_seed) {
      if (a.sort == Sort::Named && b.sort == Sort::Named) {
        ElementId ra = find(a), rb = find(b);
        if (!(ra == rb)) up[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
    for (const auto& [e, r] : up) {
      (void)r;
      ElementId root = find(e);
      auto [it, fresh] = comp_id_.try_emplace(root, next_cluster_);
      if (fresh) ++next_cluster_;
      int node = intern_root(e, it->second);
      named_root_[e] = node;
    }

    // Shortest path length to each element, for enumeration caps.
    std::deque<ElementId> bfs;
    for (const auto& [e, n] : named_root_) {
      (void)n;
      witness_[e] = 0;
      bfs.push_back(e);
    }
    while (!bfs.empty()) {
      ElementId d = bfs.front();
      bfs.pop_front();
      int w = witness_.at(d);
      auto visit = [&](const ElementId& e) {
        if (witness_.try_emplace(e, w + 1).second) bfs.push_back(e);
      };
      if (auto it = role_steps_.find(d); it != role_steps_.end()) {
        for (const auto& [r, e] : it->second) {
          (void)r;
          visit(e);
        }
      }
      if (auto it = rho_steps_.find(d); it != rho_steps_.end()) {
        for (const ElementId& e : it->second) visit(e);
      }
      max_witness_ = std::max(max_witness_, w);
    }
  }

  const Node& node(int i) const { return nodes_[i]; }
  const RoleHierarchy& roles() const { return roles_; }
  const FiniteStructure& re() const { return re_; }
  int max_witness() const { return max_witness_; }
  const std::map<ElementId, int>& named_roots() const { return named_root_; }
  size_t size() const { return nodes_.size(); }

  int child(int parent, int kind, Symbol role, ElementId tail) {
    auto key = std::make_tuple(parent, kind, role, tail);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    if (nodes_.size() >= budget_)
      throw std::runtime_error("oracle: path budget exceeded");
    Node n;
    n.parent = parent;
    n.kind = kind;
    n.role = role;
    n.tail = tail;
    n.len = nodes_[parent].len + 1;
    n.cluster = kind == 2 ? nodes_[parent].cluster : next_cluster_++;
    nodes_.push_back(n);
    int id = static_cast<int>(nodes_.size()) - 1;
    memo_.emplace(key, id);
    return id;
  }

  // All one-step extensions of i, as interned node ids.
  std::vector<int> extensions(int i, int maxlen) {
    std::vector<int> out;
    const Node n = nodes_[i];
    if (n.len >= maxlen) return out;
    if (auto it = role_steps_.find(n.tail); it != role_steps_.end()) {
      for (const auto& [r, e] : it->second) out.push_back(child(i, 1, r, e));
    }
    if (auto it = rho_steps_.find(n.tail); it != rho_steps_.end()) {
      for (const ElementId& e : it->second)
        out.push_back(child(i, 2, Symbol(), e));
    }
    return out;
  }

  std::vector<int> rho_extensions(int i, int maxlen) {
    std::vector<int> out;
    const Node n = nodes_[i];
    if (n.len >= maxlen) return out;
    if (auto it = rho_steps_.find(n.tail); it != rho_steps_.end()) {
      for (const ElementId& e : it->second)
        out.push_back(child(i, 2, Symbol(), e));
    }
    return out;
  }

  std::vector<int> role_step_children(int i, Symbol r, int maxlen) {
    std::vector<int> out;
    const Node n = nodes_[i];
    if (n.len >= maxlen) return out;
    if (auto it = role_steps_.find(n.tail); it != role_steps_.end()) {
      for (const auto& [s, e] : it->second) {
        if (roles_.entails(s, r)) out.push_back(child(i, 1, s, e));
      }
    }
    return out;
  }

  std::vector<int> named_role_succ(int i, Symbol r) const {
    std::vector<int> out;
    if (nodes_[i].len != 0) return out;
    auto rit = named_fwd_.find(r);
    if (rit == named_fwd_.end()) return out;
    auto it = rit->second.find(nodes_[i].tail);
    if (it == rit->second.end()) return out;
    for (const ElementId& b : it->second) out.push_back(named_root_.at(b));
    return out;
  }

  std::vector<int> named_role_pred(int i, Symbol r) const {
    std::vector<int> out;
    if (nodes_[i].len != 0) return out;
    auto rit = named_bwd_.find(r);
    if (rit == named_bwd_.end()) return out;
    auto it = rit->second.find(nodes_[i].tail);
    if (it == rit->second.end()) return out;
    for (const ElementId& a : it->second) out.push_back(named_root_.at(a));
    return out;
  }

  std::vector<std::pair<int, int>> named_self_loops(Symbol r) const {
    std::vector<std::pair<int, int>> out;
    auto rit = named_fwd_.find(r);
    if (rit == named_fwd_.end()) return out;
    for (const auto& [a, bs] : rit->second) {
      for (const ElementId& b : bs) {
        if (a == b) out.push_back({named_root_.at(a), named_root_.at(a)});
      }
    }
    return out;
  }

  std::optional<int> ell_child(int i, int maxlen) {
    const Node n = nodes_[i];
    if (n.len >= maxlen) return std::nullopt;
    auto it = ell_of_.find(n.tail);
    if (it == ell_of_.end()) return std::nullopt;
    return child(i, 2, Symbol(), it->second);
  }

  bool is_ell_pair(int p, int q) const {
    const Node& c = nodes_[q];
    if (c.parent != p || c.kind != 2) return false;
    return re_.rho_ell.count({nodes_[p].tail, c.tail}) > 0;
  }

  // The rho-class of i within depth maxlen: its cluster roots plus all their
  // pure rho-step descendants.
  std::vector<int> cluster_members(int i, int maxlen) {
    std::vector<int> roots;
    int root = strip_rho(i);
    if (nodes_[root].len == 0) {
      for (const auto& [e, id] : named_root_) {
        (void)e;
        if (nodes_[id].cluster == nodes_[i].cluster) roots.push_back(id);
      }
    } else {
      roots.push_back(root);
    }
    std::vector<int> out;
    std::deque<int> work(roots.begin(), roots.end());
    std::set<int> seen(roots.begin(), roots.end());
    while (!work.empty()) {
      int p = work.front();
      work.pop_front();
      out.push_back(p);
      for (int c : rho_extensions(p, maxlen)) {
        if (seen.insert(c).second) work.push_back(c);
      }
    }
    return out;
  }

  // Every path up to maxlen; the disconnected-variable fallback.
  std::vector<int> all_paths(int maxlen) {
    std::vector<int> out;
    std::deque<int> work;
    for (const auto& [e, id] : named_root_) {
      (void)e;
      work.push_back(id);
    }
    std::set<int> seen(work.begin(), work.end());
    while (!work.empty()) {
      int p = work.front();
      work.pop_front();
      out.push_back(p);
      for (int c : extensions(p, maxlen)) {
        if (seen.insert(c).second) work.push_back(c);
      }
    }
    return out;
  }

  int strip_rho(int i) const {
    while (nodes_[i].kind == 2) i = nodes_[i].parent;
    return i;
  }

 private:
  int intern_root(ElementId e, int cluster) {
    Node n;
    n.tail = e;
    n.cluster = cluster;
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  const FiniteStructure& re_;
  const RoleHierarchy& roles_;
  std::size_t budget_;
  std::vector<Node> nodes_;
  std::map<std::tuple<int, int, Symbol, ElementId>, int> memo_;
  std::map<ElementId, int> named_root_;
  std::map<ElementId, int> comp_id_;
  int next_cluster_ = 0;
  std::map<ElementId, std::vector<std::pair<Symbol, ElementId>>> role_steps_;
  std::map<ElementId, std::vector<ElementId>> rho_steps_;
  std::map<ElementId, ElementId> ell_of_;
  std::map<Symbol, std::map<ElementId, std::vector<ElementId>>> named_fwd_,
      named_bwd_;
  std::map<ElementId, int> witness_;
  int max_witness_ = 0;
};

struct OTerm {
  int slot = -1;  // -1: fixed node
  int fixed = -1;
};

enum class OAtomKind { ConceptExt, Role, Rho, RhoEll };

struct OAtom {
  OAtomKind kind;
  const std::set<ElementId>* ext = nullptr;  // ConceptExt: tail extension
  Symbol role;                               // Role
  OTerm s, t;                                // ConceptExt uses t only
};

// Backtracking homomorphism search of an unfolded query into the lazily
// unraveled structure.
class Searcher {
 public:
  Searcher(Arena& a, const FOQuery& q, int depth)
      : a_(a), q_(q), depth_(depth) {
    size_t atom_count = q.concept_atoms.size() + q.role_atoms.size() +
                        q.rho_atoms.size() + q.rho_ell_atoms.size();
    // Pool cap for variables no atom constrains: such a match component can
    // always be re-rooted onto a shortest path to its meet, so paths beyond a
    // shortest witness plus one step per atom never matter. Constrained
    // variables enumerate to the full depth instead; granules may contain
    // long indiscernibility chains through successive upper representatives.
    cap_ = static_cast<int>(std::min<long long>(
        depth_,
        a_.max_witness() + static_cast<long long>(atom_count) + 2));
    collect_vars();
    build_atoms();
  }

  AnswerSet run() {
    if (unmatchable_) return {};
    for (const OAtom& a : atoms_) {
      if (ground(a) && !holds(a)) return {};
    }
    asg_.resize(vars_.size(), -1);
    bound_.assign(vars_.size(), false);
    search(0);
    return std::move(out_);
  }

 private:
  void collect_vars() {
    for (Symbol v : q_.answer_vars) {
      vars_.push_back(v);
      is_answer_.push_back(true);
    }
    for (Symbol v : q_.exist_vars) {
      if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) {
        vars_.push_back(v);
        is_answer_.push_back(false);
      }
    }
    for (size_t i = 0; i < vars_.size(); ++i)
      slot_[vars_[i]] = static_cast<int>(i);
  }

  OTerm resolve(const Term& t) {
    if (t.is_var) {
      auto it = slot_.find(t.sym);
      if (it == slot_.end())
        throw std::invalid_argument("oracle: variable not quantified: " +
                                    t.sym.name());
      return OTerm{it->second, -1};
    }
    auto it = a_.named_roots().find(ElementId::named(t.sym));
    if (it == a_.named_roots().end()) {
      unmatchable_ = true;
      return OTerm{-1, -1};
    }
    return OTerm{-1, it->second};
  }

  void build_atoms() {
    static const std::set<ElementId> kEmpty;
    for (const ConceptAtom& a : q_.concept_atoms) {
      OAtom atom{OAtomKind::ConceptExt, nullptr, Symbol(), OTerm{}, resolve(a.t)};
      switch (a.c.kind()) {
        case CKind::Name: {
          auto it = a_.re().concept_ext.find(a.c.name_sym());
          atom.ext = it == a_.re().concept_ext.end() ? &kEmpty : &it->second;
          break;
        }
        case CKind::Top:
          atom.ext = &a_.re().domain;
          break;
        case CKind::Bot:
          atom.ext = &kEmpty;
          break;
        default:
          throw std::logic_error("oracle: query must be unfolded first");
      }
      atoms_.push_back(atom);
    }
    for (const RoleAtom& a : q_.role_atoms) {
      atoms_.push_back(
          {OAtomKind::Role, nullptr, a.role, resolve(a.s), resolve(a.t)});
    }
    for (const RhoAtom& a : q_.rho_atoms) {
      atoms_.push_back(
          {OAtomKind::Rho, nullptr, Symbol(), resolve(a.s), resolve(a.t)});
    }
    for (const RhoEllAtom& a : q_.rho_ell_atoms) {
      atoms_.push_back(
          {OAtomKind::RhoEll, nullptr, Symbol(), resolve(a.s), resolve(a.t)});
    }
  }

  int value(const OTerm& t) const { return t.slot < 0 ? t.fixed : asg_[t.slot]; }
  bool is_bound(const OTerm& t) const { return t.slot < 0 || bound_[t.slot]; }

  bool ground(const OAtom& a) const {
    if (a.kind == OAtomKind::ConceptExt) return a.t.slot < 0;
    return a.s.slot < 0 && a.t.slot < 0;
  }

  bool holds(const OAtom& a) const {
    switch (a.kind) {
      case OAtomKind::ConceptExt:
        return a.ext->count(a_.node(value(a.t)).tail) > 0;
      case OAtomKind::Role: {
        int p = value(a.s), q = value(a.t);
        const auto& qp = a_.node(q);
        if (qp.parent == p && qp.kind == 1)
          return a_.roles().entails(qp.role, a.role);
        if (a_.node(p).len == 0 && qp.len == 0) {
          auto it = a_.re().role_ext.find(a.role);
          return it != a_.re().role_ext.end() &&
                 it->second.count({a_.node(p).tail, qp.tail}) > 0;
        }
        return false;
      }
      case OAtomKind::Rho:
        return a_.node(value(a.s)).cluster == a_.node(value(a.t)).cluster;
      case OAtomKind::RhoEll:
        return a_.is_ell_pair(value(a.s), value(a.t));
    }
    return false;
  }

  std::optional<std::vector<int>> atom_candidates(size_t ai, int v) {
    const OAtom& a = atoms_[ai];
    auto sorted = [](std::vector<int> xs) {
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      return xs;
    };
    if (a.kind == OAtomKind::ConceptExt) return std::nullopt;  // filter only
    bool at_s = a.s.slot == v;
    bool at_t = a.t.slot == v;
    if (!at_s && !at_t) return std::nullopt;
    if (at_s && at_t) {
      if (a.kind == OAtomKind::Rho) return std::nullopt;  // reflexive
      if (a.kind == OAtomKind::RhoEll) return std::vector<int>{};
      std::vector<int> out;
      for (const auto& [p, q] : a_.named_self_loops(a.role)) {
        (void)q;
        out.push_back(p);
      }
      return sorted(std::move(out));
    }
    const OTerm& other = at_s ? a.t : a.s;
    if (!is_bound(other)) return std::nullopt;
    int o = value(other);
    auto key = std::make_tuple(ai, at_t, o);
    if (auto it = cand_cache_.find(key); it != cand_cache_.end())
      return it->second;
    std::vector<int> out;
    switch (a.kind) {
      case OAtomKind::Role:
        if (at_t) {
          out = a_.role_step_children(o, a.role, depth_);
          for (int n : a_.named_role_succ(o, a.role)) out.push_back(n);
        } else {
          const auto& qn = a_.node(o);
          if (qn.kind == 1 && a_.roles().entails(qn.role, a.role))
            out.push_back(qn.parent);
          for (int n : a_.named_role_pred(o, a.role)) out.push_back(n);
        }
        break;
      case OAtomKind::Rho:
        out = a_.cluster_members(o, depth_);
        break;
      case OAtomKind::RhoEll:
        if (at_t) {
          if (auto c = a_.ell_child(o, depth_); c && a_.is_ell_pair(o, *c))
            out.push_back(*c);
        } else {
          const auto& qn = a_.node(o);
          if (qn.parent >= 0 && a_.is_ell_pair(qn.parent, o))
            out.push_back(qn.parent);
        }
        break;
      case OAtomKind::ConceptExt:
        break;
    }
    out = sorted(std::move(out));
    cand_cache_.emplace(key, out);
    return out;
  }

  std::optional<std::vector<int>> var_candidates(int v) {
    std::optional<std::vector<int>> acc;
    for (size_t ai = 0; ai < atoms_.size(); ++ai) {
      auto c = atom_candidates(ai, v);
      if (!c) continue;
      if (!acc) {
        acc = std::move(c);
      } else {
        std::vector<int> merged;
        std::set_intersection(acc->begin(), acc->end(), c->begin(), c->end(),
                              std::back_inserter(merged));
        acc = std::move(merged);
      }
      if (acc->empty()) break;
    }
    if (acc && is_answer_[v]) {
      std::erase_if(*acc, [&](int n) { return a_.node(n).len != 0; });
    }
    return acc;
  }

  void search(size_t done) {
    if (done == vars_.size()) {
      emit();
      return;
    }
    int best = -1;
    std::optional<std::vector<int>> cands;
    for (size_t i = 0; i < vars_.size(); ++i) {
      if (bound_[i]) continue;
      auto c = var_candidates(static_cast<int>(i));
      size_t sz = c ? c->size() : static_cast<size_t>(-1);
      if (best < 0 || sz < (cands ? cands->size() : static_cast<size_t>(-1))) {
        best = static_cast<int>(i);
        cands = std::move(c);
      }
    }
    std::vector<int> pool;
    if (cands) {
      pool = std::move(*cands);
    } else {
      // No atom constrains this variable yet: enumerate everything.
      if (!fallback_pool_) fallback_pool_ = a_.all_paths(cap_);
      pool = *fallback_pool_;
      if (is_answer_[best]) {
        std::erase_if(pool, [&](int n) { return a_.node(n).len != 0; });
      }
    }
    for (int e : pool) {
      asg_[best] = e;
      bound_[best] = true;
      bool ok = true;
      for (const OAtom& a : atoms_) {
        bool touches = (a.kind != OAtomKind::ConceptExt && a.s.slot == best) ||
                       a.t.slot == best;
        if (touches && is_bound(a.s) && is_bound(a.t) && !holds(a)) {
          ok = false;
          break;
        }
      }
      if (ok) search(done + 1);
      bound_[best] = false;
    }
  }

  void emit() {
    AnswerTuple tuple;
    tuple.reserve(q_.answer_vars.size());
    for (Symbol v : q_.answer_vars) {
      const auto& n = a_.node(asg_[slot_.at(v)]);
      if (n.len != 0) return;
      tuple.push_back(n.tail.ind);
    }
    out_.insert(std::move(tuple));
  }

  Arena& a_;
  const FOQuery& q_;
  int depth_;
  int cap_;
  std::vector<Symbol> vars_;
  std::vector<bool> is_answer_;
  std::map<Symbol, int> slot_;
  std::vector<OAtom> atoms_;
  bool unmatchable_ = false;
  std::vector<int> asg_;
  std::vector<bool> bound_;
  std::map<std::tuple<size_t, bool, int>, std::vector<int>> cand_cache_;
  std::optional<std::vector<int>> fallback_pool_;
  AnswerSet out_;
};

UPath path_of(const Arena& a, int i) {
  std::vector<int> chain;
  for (int n = i; n >= 0; n = a.node(n).parent) chain.push_back(n);
  std::reverse(chain.begin(), chain.end());
  UPath p;
  for (size_t k = 0; k < chain.size(); ++k) {
    const auto& n = a.node(chain[k]);
    p.elems.push_back(n.tail);
    if (k > 0) {
      p.steps.push_back(n.kind == 1 ? std::optional<Symbol>(n.role)
                                    : std::nullopt);
    }
  }
  return p;
}

}  // namespace

TruncatedUnraveling unravel(const FiniteStructure& i_re,
                            const RoleHierarchy& roles, int depth,
                            std::size_t budget) {
  if (depth < 1) throw std::invalid_argument("unravel: depth must be >= 1");
  Arena a(i_re, roles, budget);
  std::vector<int> nodes = a.all_paths(depth);
  std::sort(nodes.begin(), nodes.end());

  TruncatedUnraveling u;
  u.depth = depth;
  std::map<int, ElementId> elem;
  for (int n : nodes) {
    UPath p = path_of(a, n);
    ElementId e = ElementId::named(Symbol::individual(p.render()));
    elem[n] = e;
    u.s.domain.insert(e);
    u.paths.push_back(std::move(p));
  }
  for (const auto& [name, ext] : i_re.concept_ext) {
    u.s.declare_concept(name);
    for (int n : nodes) {
      if (ext.count(a.node(n).tail)) u.s.concept_ext[name].insert(elem.at(n));
    }
  }
  std::vector<Symbol> role_names;
  for (const auto& [r, pairs] : i_re.role_ext) {
    (void)pairs;
    u.s.declare_role(r);
    role_names.push_back(r);
  }
  for (int n : nodes) {
    const auto& nd = a.node(n);
    if (nd.parent < 0) continue;
    ElementId pe = elem.at(nd.parent);
    ElementId ce = elem.at(n);
    if (nd.kind == 1) {
      for (Symbol r : role_names) {
        if (roles.entails(nd.role, r)) u.s.role_ext[r].insert({pe, ce});
      }
    } else {
      u.s.rho_seed.insert({pe, ce});
      if (i_re.rho_ell.count({a.node(nd.parent).tail, nd.tail})) {
        u.s.rho_ell.insert({pe, ce});
      }
    }
  }
  for (const auto& [r, pairs] : i_re.role_ext) {
    for (const auto& [d, e] : pairs) {
      if (d.sort == Sort::Named && e.sort == Sort::Named) {
        u.s.role_ext[r].insert({elem.at(a.named_roots().at(d)),
                                elem.at(a.named_roots().at(e))});
      }
    }
  }
  for (const auto& [d, e] : i_re.rho_seed) {
    if (d.sort == Sort::Named && e.sort == Sort::Named) {
      u.s.rho_seed.insert(
          {elem.at(a.named_roots().at(d)), elem.at(a.named_roots().at(e))});
    }
  }
  for (int n : nodes) {
    const auto& nd = a.node(n);
    if (nd.tail.sort == Sort::ConceptRep) u.s.aux.insert(elem.at(n));
    if (nd.tail.sort == Sort::UpperRep || nd.tail.sort == Sort::LowerRep)
      u.s.aux_rho.insert(elem.at(n));
  }
  u.s.close_rho();
  return u;
}

AnswerSet certain_answers_oracle(const KnowledgeBase& kb0,
                                 const ConjunctiveQuery& q0,
                                 std::optional<int> depth, std::size_t budget) {
  ConjunctiveQuery q = q0;
  q.canonicalize();
  if (std::string err = q.validate(); !err.empty())
    throw std::invalid_argument("oracle: " + err);
  KnowledgeBase kb = kb0;
  kb.canonicalize();
  std::vector<Symbol> known = kb.individuals();
  for (Symbol i : q.individuals()) {
    if (!std::binary_search(known.begin(), known.end(), i))
      throw std::invalid_argument("oracle: unknown individual in query: " +
                                  i.name());
  }
  RoleHierarchy roles(kb.ris);
  if (roles.has_synonyms())
    throw std::invalid_argument("oracle: role synonyms present");
  Materialized m = materialize(kb);
  FOQuery f = unfold(q);
  size_t atom_count = f.concept_atoms.size() + f.role_atoms.size() +
                      f.rho_atoms.size() + f.rho_ell_atoms.size();
  int d = depth.value_or(
      static_cast<int>(m.reachable.domain.size() + atom_count + 2));
  if (d < 1) d = 1;
  Arena arena(m.reachable, roles, budget);
  Searcher s(arena, f, d);
  return s.run();
}

}  // namespace roughel
