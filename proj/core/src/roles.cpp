#include "roughel/roles.hpp"

namespace roughel {

RoleHierarchy::RoleHierarchy(const std::vector<Ri>& ris) {
  for (const auto& ri : ris) {
    roles_.insert(ri.sub);
    roles_.insert(ri.sup);
    supers_[ri.sub].insert(ri.sup);
  }
  for (Symbol r : roles_) supers_[r].insert(r);
  // Transitive closure by saturation; role sets are tiny.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [r, sups] : supers_) {
      std::set<Symbol> add;
      for (Symbol s : sups) {
        auto it = supers_.find(s);
        if (it == supers_.end()) continue;
        for (Symbol t : it->second)
          if (!sups.count(t)) add.insert(t);
      }
      if (!add.empty()) {
        sups.insert(add.begin(), add.end());
        changed = true;
      }
    }
  }
}

bool RoleHierarchy::entails(Symbol sub, Symbol sup) const {
  if (sub == sup) return true;
  auto it = supers_.find(sub);
  return it != supers_.end() && it->second.count(sup) > 0;
}

std::vector<Symbol> RoleHierarchy::supers(Symbol r) const {
  auto it = supers_.find(r);
  if (it == supers_.end()) return {r};
  return {it->second.begin(), it->second.end()};
}

bool RoleHierarchy::has_synonyms() const {
  for (const auto& [r, sups] : supers_)
    for (Symbol s : sups)
      if (s != r && entails(s, r)) return true;
  return false;
}

}  // namespace roughel
