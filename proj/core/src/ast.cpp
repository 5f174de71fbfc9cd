#include "roughel/ast.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace roughel {

namespace {

struct SymbolTable {
  std::shared_mutex mu;
  std::deque<std::string> names;  // deque: stable references across growth
  std::unordered_map<std::string_view, uint32_t> index;
};

SymbolTable& table_for(SymKind kind) {
  static SymbolTable tables[4];
  return tables[static_cast<size_t>(kind)];
}

}  // namespace

Symbol Symbol::intern(SymKind kind, std::string_view name) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  SymbolTable& t = table_for(kind);
  {
    std::shared_lock lock(t.mu);
    auto it = t.index.find(name);
    if (it != t.index.end()) return Symbol(kind, it->second);
  }
  std::unique_lock lock(t.mu);
  auto it = t.index.find(name);
  if (it != t.index.end()) return Symbol(kind, it->second);
  uint32_t id = static_cast<uint32_t>(t.names.size());
  t.names.emplace_back(name);
  t.index.emplace(std::string_view(t.names.back()), id);
  return Symbol(kind, id);
}

const std::string& Symbol::name() const {
  SymbolTable& t = table_for(kind_);
  std::shared_lock lock(t.mu);
  return t.names.at(id_);
}

namespace detail {
struct ConceptNode {
  CKind kind;
  Symbol sym;               // Name: the concept name; Exists: the role
  const ConceptNode* a;     // And lhs; Exists/Upper/Lower argument
  const ConceptNode* b;     // And rhs
};

struct ConceptFactory {
  static Concept wrap(const ConceptNode* n) { return Concept(n); }
};
}  // namespace detail

namespace {

using detail::ConceptNode;

struct NodeKey {
  CKind kind;
  Symbol sym;
  const ConceptNode* a;
  const ConceptNode* b;
  friend bool operator==(const NodeKey&, const NodeKey&) = default;
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    size_t h = std::hash<uint8_t>()(static_cast<uint8_t>(k.kind));
    h = h * 1000003u ^ std::hash<Symbol>()(k.sym);
    h = h * 1000003u ^ std::hash<const void*>()(k.a);
    h = h * 1000003u ^ std::hash<const void*>()(k.b);
    return h;
  }
};

struct ConceptArena {
  std::mutex mu;
  std::deque<ConceptNode> nodes;
  std::unordered_map<NodeKey, const ConceptNode*, NodeKeyHash> index;

  const ConceptNode* make(CKind kind, Symbol sym, const ConceptNode* a, const ConceptNode* b) {
    NodeKey key{kind, sym, a, b};
    std::lock_guard lock(mu);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    nodes.push_back(ConceptNode{kind, sym, a, b});
    const ConceptNode* n = &nodes.back();
    index.emplace(key, n);
    return n;
  }
};

ConceptArena& arena() {
  static ConceptArena a;
  return a;
}

Concept wrap(const ConceptNode* n) { return detail::ConceptFactory::wrap(n); }

}  // namespace

Concept Concept::top() { return wrap(arena().make(CKind::Top, Symbol(), nullptr, nullptr)); }
Concept Concept::bot() { return wrap(arena().make(CKind::Bot, Symbol(), nullptr, nullptr)); }

Concept Concept::name(Symbol concept_name) {
  if (concept_name.kind() != SymKind::ConceptName)
    throw std::invalid_argument("Concept::name requires a concept-name symbol");
  return wrap(arena().make(CKind::Name, concept_name, nullptr, nullptr));
}

Concept Concept::conj(Concept lhs, Concept rhs) {
  if (!lhs.valid() || !rhs.valid()) throw std::invalid_argument("null concept in conj");
  return wrap(arena().make(CKind::And, Symbol(), lhs.node_, rhs.node_));
}

Concept Concept::exists(Symbol role, Concept filler) {
  if (role.kind() != SymKind::RoleName)
    throw std::invalid_argument("Concept::exists requires a role-name symbol");
  if (!filler.valid()) throw std::invalid_argument("null filler in exists");
  return wrap(arena().make(CKind::Exists, role, filler.node_, nullptr));
}

Concept Concept::upper(Concept arg) {
  if (!arg.valid()) throw std::invalid_argument("null arg in upper");
  return wrap(arena().make(CKind::Upper, Symbol(), arg.node_, nullptr));
}

Concept Concept::lower(Concept arg) {
  if (!arg.valid()) throw std::invalid_argument("null arg in lower");
  return wrap(arena().make(CKind::Lower, Symbol(), arg.node_, nullptr));
}

CKind Concept::kind() const { return node_->kind; }
Symbol Concept::name_sym() const { return node_->sym; }
Symbol Concept::role() const { return node_->sym; }
Concept Concept::lhs() const { return wrap(node_->a); }
Concept Concept::rhs() const { return wrap(node_->b); }
Concept Concept::arg() const { return wrap(node_->a); }

int Concept::compare(Concept x, Concept y) {
  if (x.node_ == y.node_) return 0;
  if (x.node_ == nullptr) return -1;
  if (y.node_ == nullptr) return 1;
  if (x.kind() != y.kind()) return x.kind() < y.kind() ? -1 : 1;
  switch (x.kind()) {
    case CKind::Top:
    case CKind::Bot:
      return 0;  // unreachable: hash-consing makes equal leaves pointer-equal
    case CKind::Name: {
      const std::string& a = x.name_sym().name();
      const std::string& b = y.name_sym().name();
      return a.compare(b);
    }
    case CKind::And: {
      if (int c = compare(x.lhs(), y.lhs()); c != 0) return c;
      return compare(x.rhs(), y.rhs());
    }
    case CKind::Exists: {
      if (int c = x.role().name().compare(y.role().name()); c != 0) return c;
      return compare(x.arg(), y.arg());
    }
    case CKind::Upper:
    case CKind::Lower:
      return compare(x.arg(), y.arg());
  }
  return 0;
}

void KnowledgeBase::canonicalize() {
  auto dedup = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedup(gcis);
  dedup(ris);
  dedup(concept_assertions);
  dedup(role_assertions);
  dedup(indisc_assertions);
}

std::vector<Symbol> KnowledgeBase::individuals() const {
  std::set<Symbol> out;
  for (const auto& ca : concept_assertions) out.insert(ca.individual);
  for (const auto& ra : role_assertions) {
    out.insert(ra.subject);
    out.insert(ra.object);
  }
  for (const auto& ia : indisc_assertions) {
    out.insert(ia.a);
    out.insert(ia.b);
  }
  return {out.begin(), out.end()};
}

namespace {
void collect_roles(Concept c, std::set<Symbol>& out) {
  switch (c.kind()) {
    case CKind::Exists:
      out.insert(c.role());
      collect_roles(c.arg(), out);
      break;
    case CKind::And:
      collect_roles(c.lhs(), out);
      collect_roles(c.rhs(), out);
      break;
    case CKind::Upper:
    case CKind::Lower:
      collect_roles(c.arg(), out);
      break;
    default:
      break;
  }
}

void collect_names(Concept c, std::set<Symbol>& out) {
  switch (c.kind()) {
    case CKind::Name:
      out.insert(c.name_sym());
      break;
    case CKind::And:
      collect_names(c.lhs(), out);
      collect_names(c.rhs(), out);
      break;
    case CKind::Exists:
    case CKind::Upper:
    case CKind::Lower:
      collect_names(c.arg(), out);
      break;
    default:
      break;
  }
}
}  // namespace

std::vector<Symbol> KnowledgeBase::role_names() const {
  std::set<Symbol> out;
  for (const auto& g : gcis) {
    collect_roles(g.lhs, out);
    collect_roles(g.rhs, out);
  }
  for (const auto& ri : ris) {
    out.insert(ri.sub);
    out.insert(ri.sup);
  }
  for (const auto& ra : role_assertions) out.insert(ra.role);
  for (const auto& ca : concept_assertions) collect_roles(ca.c, out);
  return {out.begin(), out.end()};
}

std::vector<Symbol> KnowledgeBase::concept_names() const {
  std::set<Symbol> out;
  for (const auto& g : gcis) {
    collect_names(g.lhs, out);
    collect_names(g.rhs, out);
  }
  for (const auto& ca : concept_assertions) collect_names(ca.c, out);
  return {out.begin(), out.end()};
}

namespace {
void collect_subterms(Concept c, std::set<Concept>& out) {
  switch (c.kind()) {
    case CKind::Top:
    case CKind::Bot:
      return;  // excluded from the subconcept set
    case CKind::Name:
      out.insert(c);
      return;
    case CKind::And:
      out.insert(c);
      collect_subterms(c.lhs(), out);
      collect_subterms(c.rhs(), out);
      return;
    case CKind::Exists:
    case CKind::Upper:
    case CKind::Lower:
      out.insert(c);
      collect_subterms(c.arg(), out);
      return;
  }
}
}  // namespace

std::set<Concept> subconcepts(const KnowledgeBase& kb) {
  std::set<Concept> out;
  for (const auto& g : kb.gcis) {
    collect_subterms(g.lhs, out);
    collect_subterms(g.rhs, out);
  }
  for (const auto& ca : kb.concept_assertions) collect_subterms(ca.c, out);
  return out;
}

void ConjunctiveQuery::canonicalize() {
  auto dedup = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedup(concept_atoms);
  dedup(role_atoms);
  dedup(rho_atoms);
}

std::vector<Term> ConjunctiveQuery::terms() const {
  std::set<Term> out;
  for (const auto& a : concept_atoms) out.insert(a.t);
  for (const auto& a : role_atoms) {
    out.insert(a.s);
    out.insert(a.t);
  }
  for (const auto& a : rho_atoms) {
    out.insert(a.s);
    out.insert(a.t);
  }
  return {out.begin(), out.end()};
}

std::vector<Symbol> ConjunctiveQuery::variables() const {
  std::vector<Symbol> out;
  for (const Term& t : terms())
    if (t.is_var) out.push_back(t.sym);
  return out;
}

std::vector<Symbol> ConjunctiveQuery::individuals() const {
  std::vector<Symbol> out;
  for (const Term& t : terms())
    if (!t.is_var) out.push_back(t.sym);
  return out;
}

std::string ConjunctiveQuery::validate() const {
  std::set<Symbol> seen;
  for (Symbol v : answer_vars) {
    if (!seen.insert(v).second) return "duplicate answer variable: " + v.name();
  }
  std::vector<Symbol> vars = variables();
  for (Symbol v : answer_vars) {
    if (!std::binary_search(vars.begin(), vars.end(), v))
      return "answer variable occurs in no atom: " + v.name();
  }
  return "";
}

}  // namespace roughel
