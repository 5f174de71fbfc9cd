// Logical ASTs for ELH-rho-bot: interned names, hash-consed concepts, axioms,
// assertions, knowledge bases, and conjunctive queries.
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace roughel {

enum class SymKind : uint8_t { ConceptName, RoleName, Individual, Variable };

// Interned name. Equality is identity within a kind; ordering is by kind then
// spelling, so sorted containers are deterministic across runs.
class Symbol {
public:
  Symbol() : kind_(SymKind::ConceptName), id_(kInvalid) {}

  static Symbol intern(SymKind kind, std::string_view name);
  static Symbol concept_name(std::string_view name) { return intern(SymKind::ConceptName, name); }
  static Symbol role_name(std::string_view name) { return intern(SymKind::RoleName, name); }
  static Symbol individual(std::string_view name) { return intern(SymKind::Individual, name); }
  static Symbol variable(std::string_view name) { return intern(SymKind::Variable, name); }

  SymKind kind() const { return kind_; }
  const std::string& name() const;
  bool valid() const { return id_ != kInvalid; }

  friend bool operator==(Symbol a, Symbol b) { return a.kind_ == b.kind_ && a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return !(a == b); }
  friend bool operator<(Symbol a, Symbol b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.id_ == b.id_) return false;
    return a.name() < b.name();
  }

  uint32_t raw_id() const { return id_; }

private:
  static constexpr uint32_t kInvalid = 0xffffffffu;
  Symbol(SymKind kind, uint32_t id) : kind_(kind), id_(id) {}
  SymKind kind_;
  uint32_t id_;
};

enum class CKind : uint8_t { Top, Bot, Name, And, Exists, Upper, Lower };

namespace detail {
struct ConceptNode;
struct ConceptFactory;
}

// Handle to a hash-consed concept node; structurally equal concepts share one
// node, so equality is pointer identity. Ordering is structural (by spelling),
// independent of construction order.
class Concept {
public:
  Concept() : node_(nullptr) {}

  static Concept top();
  static Concept bot();
  static Concept name(Symbol concept_name);
  static Concept conj(Concept lhs, Concept rhs);
  static Concept exists(Symbol role, Concept filler);
  static Concept upper(Concept arg);
  static Concept lower(Concept arg);

  bool valid() const { return node_ != nullptr; }
  CKind kind() const;
  Symbol name_sym() const;  // Name
  Symbol role() const;      // Exists
  Concept lhs() const;      // And
  Concept rhs() const;      // And
  Concept arg() const;      // Exists / Upper / Lower

  bool is_name_or_top() const { return kind() == CKind::Top || kind() == CKind::Name; }

  static int compare(Concept a, Concept b);
  friend bool operator==(Concept a, Concept b) { return a.node_ == b.node_; }
  friend bool operator!=(Concept a, Concept b) { return a.node_ != b.node_; }
  friend bool operator<(Concept a, Concept b) { return compare(a, b) < 0; }

  const detail::ConceptNode* raw() const { return node_; }

private:
  friend struct detail::ConceptFactory;
  explicit Concept(const detail::ConceptNode* node) : node_(node) {}
  const detail::ConceptNode* node_;
};

struct Gci {
  Concept lhs;
  Concept rhs;
  friend bool operator==(const Gci&, const Gci&) = default;
  friend bool operator<(const Gci& a, const Gci& b) {
    if (int c = Concept::compare(a.lhs, b.lhs); c != 0) return c < 0;
    return Concept::compare(a.rhs, b.rhs) < 0;
  }
};

struct Ri {
  Symbol sub;
  Symbol sup;
  friend bool operator==(const Ri&, const Ri&) = default;
  friend bool operator<(const Ri& a, const Ri& b) {
    if (a.sub != b.sub) return a.sub < b.sub;
    return a.sup < b.sup;
  }
};

struct ConceptAssertion {
  Concept c;
  Symbol individual;
  friend bool operator==(const ConceptAssertion&, const ConceptAssertion&) = default;
  friend bool operator<(const ConceptAssertion& a, const ConceptAssertion& b) {
    if (a.individual != b.individual) return a.individual < b.individual;
    return Concept::compare(a.c, b.c) < 0;
  }
};

struct RoleAssertion {
  Symbol role;
  Symbol subject;
  Symbol object;
  friend bool operator==(const RoleAssertion&, const RoleAssertion&) = default;
  friend bool operator<(const RoleAssertion& a, const RoleAssertion& b) {
    if (a.role != b.role) return a.role < b.role;
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.object < b.object;
  }
};

// Indiscernibility assertion rho(a, b); rho is distinguished, never a role name.
struct IndiscAssertion {
  Symbol a;
  Symbol b;
  friend bool operator==(const IndiscAssertion&, const IndiscAssertion&) = default;
  friend bool operator<(const IndiscAssertion& x, const IndiscAssertion& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  }
};

struct KnowledgeBase {
  std::vector<Gci> gcis;
  std::vector<Ri> ris;
  std::vector<ConceptAssertion> concept_assertions;
  std::vector<RoleAssertion> role_assertions;
  std::vector<IndiscAssertion> indisc_assertions;

  // Sorts and deduplicates every section in place; parsing and generation both
  // finish with this so equal KBs compare equal.
  void canonicalize();

  std::vector<Symbol> individuals() const;    // N_I(A), sorted
  std::vector<Symbol> role_names() const;     // roles in TBox and ABox, sorted
  std::vector<Symbol> concept_names() const;  // concept names anywhere, sorted

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

// All concepts and syntactic subconcepts occurring in GCIs and concept
// assertions, closed under subterms; Top/Bot are excluded.
std::set<Concept> subconcepts(const KnowledgeBase& kb);

struct Term {
  bool is_var = true;
  Symbol sym;

  static Term var(Symbol v) { return Term{true, v}; }
  static Term ind(Symbol i) { return Term{false, i}; }

  friend bool operator==(const Term&, const Term&) = default;
  friend bool operator<(const Term& a, const Term& b) {
    if (a.is_var != b.is_var) return !a.is_var;  // individuals sort before variables
    return a.sym < b.sym;
  }
};

struct ConceptAtom {
  Concept c;
  Term t;
  friend bool operator==(const ConceptAtom&, const ConceptAtom&) = default;
  friend bool operator<(const ConceptAtom& a, const ConceptAtom& b) {
    if (a.t != b.t) return a.t < b.t;
    return Concept::compare(a.c, b.c) < 0;
  }
};

struct RoleAtom {
  Symbol role;
  Term s;
  Term t;
  friend bool operator==(const RoleAtom&, const RoleAtom&) = default;
  friend bool operator<(const RoleAtom& a, const RoleAtom& b) {
    if (a.role != b.role) return a.role < b.role;
    if (a.s != b.s) return a.s < b.s;
    return a.t < b.t;
  }
};

struct RhoAtom {
  Term s;
  Term t;
  friend bool operator==(const RhoAtom&, const RhoAtom&) = default;
  friend bool operator<(const RhoAtom& a, const RhoAtom& b) {
    if (a.s != b.s) return a.s < b.s;
    return a.t < b.t;
  }
};

struct ConjunctiveQuery {
  std::vector<Symbol> answer_vars;  // ordered; projection order of answers
  std::vector<ConceptAtom> concept_atoms;
  std::vector<RoleAtom> role_atoms;
  std::vector<RhoAtom> rho_atoms;

  void canonicalize();  // sort + dedup atoms (answer_vars keep their order)

  std::vector<Term> terms() const;          // all terms, sorted unique
  std::vector<Symbol> variables() const;    // all variables, sorted unique
  std::vector<Symbol> individuals() const;  // all individuals, sorted unique

  // Empty string when well-formed; otherwise a description of the violated
  // invariant (answer var missing from atoms, or duplicated).
  std::string validate() const;

  friend bool operator==(const ConjunctiveQuery&, const ConjunctiveQuery&) = default;
};

}  // namespace roughel

namespace std {
template <>
struct hash<roughel::Symbol> {
  size_t operator()(roughel::Symbol s) const {
    return hash<uint64_t>()((uint64_t(s.kind()) << 32) | s.raw_id());
  }
};
template <>
struct hash<roughel::Concept> {
  size_t operator()(roughel::Concept c) const { return hash<const void*>()(c.raw()); }
};
}  // namespace std
