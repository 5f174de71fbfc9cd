// Reflexive-transitive closure of a role-inclusion set, shared by the
// materializer, the rewriter, and the oracle.
#pragma once

#include <map>
#include <set>
#include <vector>

#include "roughel/ast.hpp"

namespace roughel {

class RoleHierarchy {
public:
  RoleHierarchy() = default;
  explicit RoleHierarchy(const std::vector<Ri>& ris);

  // True iff the closure entails sub [= sup (reflexively).
  bool entails(Symbol sub, Symbol sup) const;

  // All s with r [= s, including r itself; sorted.
  std::vector<Symbol> supers(Symbol r) const;

  // Distinct roles r != s with r [= s and s [= r. Such KBs are rejected at
  // load time (the rewriting's prime implicants require their absence).
  bool has_synonyms() const;

  const std::set<Symbol>& known_roles() const { return roles_; }

private:
  std::set<Symbol> roles_;
  std::map<Symbol, std::set<Symbol>> supers_;  // r -> all s with r [= s, r included
};

}  // namespace roughel
