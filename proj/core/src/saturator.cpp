#include <roughel/saturator.hpp>

#include <roughel/normalizer.hpp>
#include <roughel/textio.hpp>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughel {

namespace {

// "Name or top" positions of normal-form axioms; nullopt encodes top.
using OptName = std::optional<Symbol>;

OptName opt_name(Concept c) {
  if (c.kind() == CKind::Top) return std::nullopt;
  if (c.kind() == CKind::Name) return c.name_sym();
  throw std::invalid_argument("saturate: TBox is not in normal form: " +
                              serialize_concept(c));
}

struct AxConj {
  OptName a, b;
  Concept rhs;  // name, top, or bot
};
struct AxExistsLeft {
  Symbol r;
  OptName filler;
  Concept rhs;  // name or top
};
struct AxExistsRight {
  OptName a;
  Symbol r;
  ElementId target;  // x_B for the filler B
};
struct AxLowerRight {
  OptName a;
  OptName b;  // nullopt means lower(top): vacuous
};
struct AxUpperRight {
  OptName a;
  Concept b;  // name or top: the companion concept
};
struct AxLowerLeft {
  OptName a;
  Concept rhs;  // name or top
};

class Saturation {
 public:
  explicit Saturation(const KnowledgeBase& kb) : kb_(kb), roles_(kb.ris) {
    validate();
    build_universe();
    index_axioms();
    seed_assertions();
    run_fixpoint();
    compute_liveness();
  }

  SaturatedKB finish() {
    SaturatedKB out;
    out.kb = kb_;
    out.roles = roles_;
    out.seed_concepts = seed_concepts_;
    out.concept_reps = concept_reps_;
    for (const ElementId& e : elements_) out.universe.insert(e);
    for (const ElementId& e : elements_) {
      std::set<Symbol> eff = priv_labels_[e];
      const std::set<Symbol>& gran = gran_labels_[cls(e)];
      eff.insert(gran.begin(), gran.end());
      out.labels[e] = std::move(eff);
      if (gran_bot_[cls(e)]) out.bot.insert(e);
      out.successors[e];  // ensure an entry for every element
    }
    for (auto& [u, edges] : succ_) out.successors[u] = edges;
    out.rho_edges = rho_edges_;
    out.granules.resize(class_members_.size());
    for (const ElementId& e : elements_) out.granules[cls(e)].insert(e);
    std::sort(out.granules.begin(), out.granules.end(),
              [](const auto& x, const auto& y) { return *x.begin() < *y.begin(); });
    for (int i = 0; i < static_cast<int>(out.granules.size()); ++i) {
      for (const ElementId& e : out.granules[i]) out.granule_index[e] = i;
    }
    out.live = live_;
    out.inconsistent = inconsistent_;
    return out;
  }

 private:
  void validate() const {
    if (auto syn = role_synonyms(kb_.ris)) {
      throw std::invalid_argument("saturate: role synonyms " + syn->first.name() +
                                  " and " + syn->second.name());
    }
    for (const Gci& g : kb_.gcis) {
      if (classify_gci(g) == GciShape::NotNormal) {
        throw std::invalid_argument("saturate: TBox is not in normal form: " +
                                    serialize_concept(g.lhs) + " into " +
                                    serialize_concept(g.rhs));
      }
    }
    for (const ConceptAssertion& ca : kb_.concept_assertions) {
      if (ca.c.kind() != CKind::Name && ca.c.kind() != CKind::Top) {
        throw std::invalid_argument(
            "saturate: assertion concepts must be atomic, got " +
            serialize_concept(ca.c));
      }
    }
  }

  int cls(const ElementId& e) const { return cls_.at(e); }

  bool has_label(const ElementId& u, Symbol a) const {
    auto it = priv_labels_.find(u);
    if (it != priv_labels_.end() && it->second.count(a)) return true;
    return gran_labels_[cls(u)].count(a) > 0;
  }
  bool has_label(const ElementId& u, const OptName& a) const {
    return !a.has_value() || has_label(u, *a);
  }

  void bump_budget() {
    ++mutations_;
    std::size_t u = elements_.size();
    std::size_t axioms = kb_.gcis.size() + kb_.ris.size() + 2;
    if (mutations_ > 4 * u * u * axioms) {
      throw std::logic_error("saturate: rule applications exceeded the polynomial budget");
    }
  }

  void add_private_label(const ElementId& u, Symbol a) {
    if (u.sort == Sort::LowerRep) {
      add_granule_label(cls(u), a);
      return;
    }
    if (priv_labels_[u].insert(a).second) {
      changed_ = true;
      bump_budget();
    }
  }

  void add_granule_label(int k, Symbol a) {
    if (gran_labels_[k].insert(a).second) {
      changed_ = true;
      bump_budget();
    }
  }

  // Any unsatisfiable granule member poisons the whole granule: a lower
  // representative in bot empties the granule, an upper representative in bot
  // contradicts the overlap it witnesses, and seeds carry their companions.
  void mark_bot(const ElementId& u) {
    int k = cls(u);
    if (!gran_bot_[k]) {
      gran_bot_[k] = true;
      changed_ = true;
      bump_budget();
    }
  }

  void add_concept_to(const ElementId& u, Concept rhs) {
    switch (rhs.kind()) {
      case CKind::Top: return;
      case CKind::Bot: mark_bot(u); return;
      case CKind::Name: add_private_label(u, rhs.name_sym()); return;
      default:
        throw std::logic_error("saturate: non-atomic rule conclusion");
    }
  }

  void add_edge(const ElementId& u, Symbol r, const ElementId& v) {
    if (succ_[u].insert({r, v}).second) {
      changed_ = true;
      bump_budget();
    }
  }

  ElementId ensure_element(const ElementId& e, int k) {
    if (cls_.emplace(e, k).second) {
      elements_.push_back(e);
      class_members_[k].push_back(e);
      changed_ = true;
      bump_budget();
    }
    return e;
  }

  // R-up: activate the companion x_{B,seed(u)} and record the generating
  // indiscernibility edge. Edges never originate at lower representatives;
  // the rule fires on the owning seed with the same premise in that case.
  void activate(Concept b, const ElementId& u) {
    ElementId seed_elem = u.owning_seed();
    Seed seed = seed_elem.sort == Sort::Named ? Seed::named(seed_elem.ind)
                                              : Seed::concept_rep(seed_elem.c);
    ElementId comp = ElementId::upper_rep(b, seed);
    bool existed = cls_.count(comp) > 0;
    ensure_element(comp, cls(seed_elem));
    if (!existed && b.kind() == CKind::Name) add_private_label(comp, b.name_sym());
    ElementId source = u.sort == Sort::LowerRep ? seed_elem : u;
    rho_edges_.insert({source, comp});
  }

  void build_universe() {
    // Named individuals, merged into granule classes by ABox ρ-assertions.
    std::vector<Symbol> inds = kb_.individuals();
    std::map<Symbol, int> uf;
    std::vector<int> parent(inds.size());
    for (std::size_t i = 0; i < inds.size(); ++i) {
      uf[inds[i]] = static_cast<int>(i);
      parent[i] = static_cast<int>(i);
    }
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const IndiscAssertion& ia : kb_.indisc_assertions) {
      int x = find(uf.at(ia.a));
      int y = find(uf.at(ia.b));
      if (x != y) parent[x] = y;
    }
    std::map<int, int> root_class;
    for (std::size_t i = 0; i < inds.size(); ++i) {
      int root = find(static_cast<int>(i));
      auto it = root_class.find(root);
      if (it == root_class.end()) {
        it = root_class.emplace(root, new_class()).first;
      }
      ElementId a = ElementId::named(inds[i]);
      ensure_element(a, it->second);
      ensure_element(ElementId::lower_rep(Seed::named(inds[i])), it->second);
    }

    // Concept representatives: one per concept occurring in the KB, plus a
    // fallback top representative used for entailment queries over names that
    // do not occur (it never enters the canonical structure unless top does).
    seed_concepts_ = subconcepts(kb_);
    bool top_occurs = false, bot_occurs = false;
    auto scan = [&](Concept c) {
      std::vector<Concept> stack{c};
      while (!stack.empty()) {
        Concept cur = stack.back();
        stack.pop_back();
        switch (cur.kind()) {
          case CKind::Top: top_occurs = true; break;
          case CKind::Bot: bot_occurs = true; break;
          case CKind::And:
            stack.push_back(cur.lhs());
            stack.push_back(cur.rhs());
            break;
          case CKind::Exists:
          case CKind::Upper:
          case CKind::Lower:
            stack.push_back(cur.arg());
            break;
          case CKind::Name: break;
        }
      }
    };
    for (const Gci& g : kb_.gcis) {
      scan(g.lhs);
      scan(g.rhs);
    }
    for (const ConceptAssertion& ca : kb_.concept_assertions) scan(ca.c);
    if (top_occurs) seed_concepts_.insert(Concept::top());
    if (bot_occurs) seed_concepts_.insert(Concept::bot());

    std::set<Concept> reps = seed_concepts_;
    reps.insert(Concept::top());
    for (Concept c : reps) {
      int k = new_class();
      ElementId x = ensure_element(ElementId::concept_rep(c), k);
      ensure_element(ElementId::lower_rep(Seed::concept_rep(c)), k);
      concept_reps_.emplace(c, x);
      init_concept_rep(x, c);
    }

    // Every seed is indiscernible from its lower representative.
    for (const ElementId& e : elements_) {
      if (e.sort == Sort::Named) {
        rho_edges_.insert({e, ElementId::lower_rep(Seed::named(e.ind))});
      } else if (e.sort == Sort::ConceptRep) {
        rho_edges_.insert({e, ElementId::lower_rep(Seed::concept_rep(e.c))});
      }
    }
  }

  // Seed labels of x_C encode membership of C's generic instance in C itself.
  void init_concept_rep(const ElementId& x, Concept c) {
    switch (c.kind()) {
      case CKind::Top: return;
      case CKind::Bot: mark_bot(x); return;
      case CKind::Name: add_private_label(x, c.name_sym()); return;
      case CKind::And:
        add_concept_to(x, c.lhs());
        add_concept_to(x, c.rhs());
        return;
      case CKind::Exists: {
        auto it = concept_reps_.find(c.arg());
        if (it == concept_reps_.end()) {
          // subterm closure guarantees the filler's representative exists
          throw std::logic_error("saturate: missing filler representative");
        }
        add_edge(x, c.role(), it->second);
        return;
      }
      case CKind::Upper:
        activate(c.arg(), x);
        return;
      case CKind::Lower:
        if (c.arg().kind() == CKind::Name) add_granule_label(cls(x), c.arg().name_sym());
        if (c.arg().kind() == CKind::Bot) mark_bot(x);
        return;
    }
  }

  void index_axioms() {
    for (const Gci& g : kb_.gcis) {
      switch (classify_gci(g)) {
        case GciShape::ConjSub: {
          OptName a, b;
          if (g.lhs.kind() == CKind::And) {
            a = opt_name(g.lhs.lhs());
            b = opt_name(g.lhs.rhs());
          } else {
            a = opt_name(g.lhs);
          }
          if (g.rhs.kind() != CKind::Top) conj_.push_back({a, b, g.rhs});
          break;
        }
        case GciShape::ExistsLeft:
          if (g.rhs.kind() != CKind::Top) {
            ex_left_.push_back({g.lhs.role(), opt_name(g.lhs.arg()), g.rhs});
          }
          break;
        case GciShape::ExistsRight: {
          Concept filler = g.rhs.arg();
          ex_right_.push_back(
              {opt_name(g.lhs), g.rhs.role(), concept_reps_.at(filler)});
          break;
        }
        case GciShape::LowerRight:
          low_right_.push_back({opt_name(g.lhs), opt_name(g.rhs.arg())});
          break;
        case GciShape::UpperRight:
          up_right_.push_back({opt_name(g.lhs), g.rhs.arg()});
          break;
        case GciShape::LowerLeft:
          if (g.rhs.kind() != CKind::Top) {
            low_left_.push_back({opt_name(g.lhs.arg()), g.rhs});
          }
          break;
        case GciShape::NotNormal:
          throw std::logic_error("saturate: unvalidated axiom shape");
      }
    }
  }

  void seed_assertions() {
    for (const ConceptAssertion& ca : kb_.concept_assertions) {
      if (ca.c.kind() == CKind::Top) continue;
      add_private_label(ElementId::named(ca.individual), ca.c.name_sym());
    }
    for (const RoleAssertion& ra : kb_.role_assertions) {
      add_edge(ElementId::named(ra.subject), ra.role, ElementId::named(ra.object));
    }
    for (const IndiscAssertion& ia : kb_.indisc_assertions) {
      rho_edges_.insert({ElementId::named(ia.a), ElementId::named(ia.b)});
    }
  }

  void run_fixpoint() {
    do {
      changed_ = false;
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        ElementId u = elements_[i];
        apply_element_rules(u);
      }
      // Lower-left axioms read and write whole granules.
      for (const AxLowerLeft& ax : low_left_) {
        for (int k = 0; k < static_cast<int>(class_members_.size()); ++k) {
          bool premise = !ax.a.has_value() || gran_labels_[k].count(*ax.a) > 0;
          if (!premise) continue;
          if (ax.rhs.kind() == CKind::Name) add_granule_label(k, ax.rhs.name_sym());
        }
      }
    } while (changed_);
  }

  void apply_element_rules(const ElementId& u) {
    for (const AxConj& ax : conj_) {
      if (has_label(u, ax.a) && has_label(u, ax.b)) add_concept_to(u, ax.rhs);
    }
    for (const AxExistsRight& ax : ex_right_) {
      if (has_label(u, ax.a)) add_edge(u, ax.r, ax.target);
    }
    {
      auto it = succ_.find(u);
      if (it != succ_.end()) {
        std::vector<std::pair<Symbol, ElementId>> edges(it->second.begin(),
                                                        it->second.end());
        for (const auto& [s, v] : edges) {
          for (const AxExistsLeft& ax : ex_left_) {
            if (roles_.entails(s, ax.r) && has_label(v, ax.filler)) {
              add_concept_to(u, ax.rhs);
            }
          }
          if (gran_bot_[cls(v)]) mark_bot(u);  // successor in bot is inherited
        }
      }
    }
    for (const AxLowerRight& ax : low_right_) {
      if (ax.b.has_value() && has_label(u, ax.a)) add_granule_label(cls(u), *ax.b);
    }
    for (const AxUpperRight& ax : up_right_) {
      if (has_label(u, ax.a)) activate(ax.b, u);
    }
  }

  // An element is live when a canonical path from a named individual reaches
  // it: successor edges and directed indiscernibility seed edges are exactly
  // the steps such paths may take.
  void compute_liveness() {
    std::vector<ElementId> frontier;
    for (const ElementId& e : elements_) {
      if (e.sort == Sort::Named && live_.insert(e).second) frontier.push_back(e);
    }
    std::multimap<ElementId, ElementId> rho_out;
    for (const ElementPair& p : rho_edges_) rho_out.emplace(p.first, p.second);
    while (!frontier.empty()) {
      ElementId u = frontier.back();
      frontier.pop_back();
      auto it = succ_.find(u);
      if (it != succ_.end()) {
        for (const auto& [r, v] : it->second) {
          (void)r;
          if (live_.insert(v).second) frontier.push_back(v);
        }
      }
      for (auto [b, e] = rho_out.equal_range(u); b != e; ++b) {
        if (live_.insert(b->second).second) frontier.push_back(b->second);
      }
    }
    for (const ElementId& e : live_) {
      if (gran_bot_[cls(e)]) {
        inconsistent_ = true;
        break;
      }
    }
  }

  int new_class() {
    gran_labels_.emplace_back();
    gran_bot_.push_back(false);
    class_members_.emplace_back();
    return static_cast<int>(gran_labels_.size()) - 1;
  }

  KnowledgeBase kb_;
  RoleHierarchy roles_;
  std::set<Concept> seed_concepts_;
  std::map<Concept, ElementId> concept_reps_;

  std::vector<ElementId> elements_;
  std::map<ElementId, int> cls_;
  std::vector<std::vector<ElementId>> class_members_;
  std::map<ElementId, std::set<Symbol>> priv_labels_;
  std::vector<std::set<Symbol>> gran_labels_;
  std::vector<bool> gran_bot_;
  std::map<ElementId, std::set<std::pair<Symbol, ElementId>>> succ_;
  std::set<ElementPair> rho_edges_;
  std::set<ElementId> live_;
  bool inconsistent_ = false;
  bool changed_ = false;
  std::size_t mutations_ = 0;

  std::vector<AxConj> conj_;
  std::vector<AxExistsLeft> ex_left_;
  std::vector<AxExistsRight> ex_right_;
  std::vector<AxLowerRight> low_right_;
  std::vector<AxUpperRight> up_right_;
  std::vector<AxLowerLeft> low_left_;
};

// Membership of d at element u, read off the saturated structure. extra
// injects one additional name at u itself (used for names that do not occur
// in the KB, which behave like fresh subclasses of top).
bool element_satisfies(const SaturatedKB& sat, const ElementId& u, Concept d,
                       const Symbol* extra) {
  switch (d.kind()) {
    case CKind::Top: return true;
    case CKind::Bot: return sat.has_bot(u);
    case CKind::Name:
      if (extra && *extra == d.name_sym()) return true;
      return sat.has_label(u, d.name_sym());
    case CKind::And:
      return element_satisfies(sat, u, d.lhs(), extra) &&
             element_satisfies(sat, u, d.rhs(), extra);
    case CKind::Exists: {
      for (const auto& [s, v] : sat.successors_of(u)) {
        if (sat.roles.entails(s, d.role()) &&
            element_satisfies(sat, v, d.arg(), nullptr)) {
          return true;
        }
      }
      return false;
    }
    case CKind::Upper: {
      for (const ElementId& w : sat.granule_of(u)) {
        if (element_satisfies(sat, w, d.arg(), w == u ? extra : nullptr)) return true;
      }
      return false;
    }
    case CKind::Lower: {
      ElementId seed = u.owning_seed();
      Seed s = seed.sort == Sort::Named ? Seed::named(seed.ind)
                                        : Seed::concept_rep(seed.c);
      return element_satisfies(sat, ElementId::lower_rep(s), d.arg(), nullptr);
    }
  }
  return false;
}

}  // namespace

std::optional<std::pair<Symbol, Symbol>> role_synonyms(const std::vector<Ri>& ris) {
  RoleHierarchy h(ris);
  const std::set<Symbol>& roles = h.known_roles();
  for (auto i = roles.begin(); i != roles.end(); ++i) {
    for (auto j = std::next(i); j != roles.end(); ++j) {
      if (h.entails(*i, *j) && h.entails(*j, *i)) return std::make_pair(*i, *j);
    }
  }
  return std::nullopt;
}

bool SaturatedKB::has_label(const ElementId& e, Symbol name) const {
  auto it = labels.find(e);
  return it != labels.end() && it->second.count(name) > 0;
}

bool SaturatedKB::has_bot(const ElementId& e) const { return bot.count(e) > 0; }

const std::set<ElementId>& SaturatedKB::granule_of(const ElementId& e) const {
  static const std::set<ElementId> kEmpty;
  auto it = granule_index.find(e);
  if (it == granule_index.end()) return kEmpty;
  return granules[static_cast<std::size_t>(it->second)];
}

const std::set<std::pair<Symbol, ElementId>>& SaturatedKB::successors_of(
    const ElementId& e) const {
  static const std::set<std::pair<Symbol, ElementId>> kEmpty;
  auto it = successors.find(e);
  return it == successors.end() ? kEmpty : it->second;
}

SaturatedKB saturate(const KnowledgeBase& kb) {
  Saturation s(kb);
  return s.finish();
}

bool entails_subsumption(const SaturatedKB& sat, Concept c, Concept d) {
  if (c == d || d.kind() == CKind::Top || c.kind() == CKind::Bot) return true;
  auto it = sat.concept_reps.find(c);
  if (it != sat.concept_reps.end()) {
    return element_satisfies(sat, it->second, d, nullptr);
  }
  if (c.kind() == CKind::Name) {
    // A name absent from the KB behaves like an unconstrained subclass of top.
    Symbol extra = c.name_sym();
    return element_satisfies(sat, sat.concept_reps.at(Concept::top()), d, &extra);
  }
  throw std::invalid_argument("entails_subsumption: no representative for " +
                              serialize_concept(c));
}

bool entails_assertion(const SaturatedKB& sat, Concept c, Symbol individual) {
  ElementId e = ElementId::named(individual);
  if (!sat.universe.count(e)) {
    throw std::invalid_argument("entails_assertion: unknown individual " +
                                individual.name());
  }
  return element_satisfies(sat, e, c, nullptr);
}

bool entails_role_inclusion(const SaturatedKB& sat, Symbol r, Symbol s) {
  return sat.roles.entails(r, s);
}

}  // namespace roughel
