#include "roughel/structure.hpp"

#include <algorithm>
#include <numeric>

#include "roughel/textio.hpp"

namespace roughel {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

void FiniteStructure::close_rho() {
  std::vector<ElementId> elems(domain.begin(), domain.end());
  std::map<ElementId, int> index;
  for (size_t i = 0; i < elems.size(); ++i) index[elems[i]] = static_cast<int>(i);

  UnionFind uf(elems.size());
  for (const auto& [a, b] : rho_seed) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end()) continue;  // closure is domain-restricted
    uf.unite(ia->second, ib->second);
  }

  std::map<int, std::set<ElementId>> groups;
  for (size_t i = 0; i < elems.size(); ++i) groups[uf.find(static_cast<int>(i))].insert(elems[i]);

  rho_partition.clear();
  rho_class_.clear();
  // std::map iteration makes granule order follow each group's root index,
  // which itself follows domain order; re-sort by least element for a
  // representation-independent canonical order.
  std::vector<std::set<ElementId>> granules;
  granules.reserve(groups.size());
  for (auto& [root, members] : groups) granules.push_back(std::move(members));
  std::sort(granules.begin(), granules.end(),
            [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
  rho_partition = std::move(granules);
  for (size_t g = 0; g < rho_partition.size(); ++g)
    for (const auto& e : rho_partition[g]) rho_class_[e] = static_cast<int>(g);
}

int FiniteStructure::rho_class_of(const ElementId& e) const {
  auto it = rho_class_.find(e);
  return it == rho_class_.end() ? -1 : it->second;
}

const std::set<ElementId>& FiniteStructure::granule_of(const ElementId& e) const {
  static const std::set<ElementId> empty;
  int g = rho_class_of(e);
  return g < 0 ? empty : rho_partition[static_cast<size_t>(g)];
}

bool FiniteStructure::same_granule(const ElementId& a, const ElementId& b) const {
  int ga = rho_class_of(a);
  return ga >= 0 && ga == rho_class_of(b);
}

std::set<ElementId> eval_concept(const FiniteStructure& s, Concept c) {
  switch (c.kind()) {
    case CKind::Top:
      return s.domain;
    case CKind::Bot:
      return {};
    case CKind::Name: {
      auto it = s.concept_ext.find(c.name_sym());
      return it == s.concept_ext.end() ? std::set<ElementId>{} : it->second;
    }
    case CKind::And: {
      std::set<ElementId> l = eval_concept(s, c.lhs());
      std::set<ElementId> r = eval_concept(s, c.rhs());
      std::set<ElementId> out;
      std::set_intersection(l.begin(), l.end(), r.begin(), r.end(),
                            std::inserter(out, out.begin()));
      return out;
    }
    case CKind::Exists: {
      std::set<ElementId> filler = eval_concept(s, c.arg());
      std::set<ElementId> out;
      auto it = s.role_ext.find(c.role());
      if (it == s.role_ext.end()) return out;
      for (const auto& [x, y] : it->second)
        if (filler.count(y)) out.insert(x);
      return out;
    }
    case CKind::Upper: {
      std::set<ElementId> arg = eval_concept(s, c.arg());
      std::set<ElementId> out;
      for (const auto& granule : s.rho_partition) {
        bool hit = std::any_of(granule.begin(), granule.end(),
                               [&arg](const ElementId& e) { return arg.count(e) > 0; });
        if (hit) out.insert(granule.begin(), granule.end());
      }
      return out;
    }
    case CKind::Lower: {
      std::set<ElementId> arg = eval_concept(s, c.arg());
      std::set<ElementId> out;
      for (const auto& granule : s.rho_partition) {
        bool all = std::all_of(granule.begin(), granule.end(),
                               [&arg](const ElementId& e) { return arg.count(e) > 0; });
        if (all) out.insert(granule.begin(), granule.end());
      }
      return out;
    }
  }
  return {};
}

std::optional<std::string> first_violation(const FiniteStructure& s, const KnowledgeBase& kb) {
  for (const auto& g : kb.gcis) {
    std::set<ElementId> l = eval_concept(s, g.lhs);
    std::set<ElementId> r = eval_concept(s, g.rhs);
    for (const auto& e : l)
      if (!r.count(e))
        return "GCI " + serialize_concept(g.lhs) + " [= " + serialize_concept(g.rhs) +
               " violated at " + render_element(e);
  }
  for (const auto& ri : kb.ris) {
    auto sub = s.role_ext.find(ri.sub);
    if (sub == s.role_ext.end()) continue;
    auto sup = s.role_ext.find(ri.sup);
    for (const auto& pr : sub->second) {
      if (sup == s.role_ext.end() || !sup->second.count(pr))
        return "RI " + ri.sub.name() + " [= " + ri.sup.name() + " violated at (" +
               render_element(pr.first) + ", " + render_element(pr.second) + ")";
    }
  }
  for (const auto& ca : kb.concept_assertions) {
    ElementId e = ElementId::named(ca.individual);
    if (!s.has_element(e) || !eval_concept(s, ca.c).count(e))
      return "assertion " + serialize_concept(ca.c) + "(" + ca.individual.name() + ") violated";
  }
  for (const auto& ra : kb.role_assertions) {
    auto it = s.role_ext.find(ra.role);
    ElementPair pr{ElementId::named(ra.subject), ElementId::named(ra.object)};
    if (it == s.role_ext.end() || !it->second.count(pr))
      return "assertion " + ra.role.name() + "(" + ra.subject.name() + ", " + ra.object.name() +
             ") violated";
  }
  for (const auto& ia : kb.indisc_assertions) {
    if (!s.same_granule(ElementId::named(ia.a), ElementId::named(ia.b)))
      return "assertion rho(" + ia.a.name() + ", " + ia.b.name() + ") violated";
  }
  return std::nullopt;
}

bool model_check(const FiniteStructure& s, const KnowledgeBase& kb) {
  return !first_violation(s, kb).has_value();
}

}  // namespace roughel
