// Reference semantics for certain-answer tests: the reachable canonical
// structure is unraveled into truncated path trees and queries are answered
// by exhaustive homomorphism search. Exponential in query size by design;
// this is the test referee, not the production path.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "roughel/ast.hpp"
#include "roughel/evaluator.hpp"
#include "roughel/roles.hpp"
#include "roughel/structure.hpp"

namespace roughel {

inline constexpr std::size_t kOracleBudget = 200000;

// One unraveled path d0 [step1] d1 ...; steps carry the role label of the
// edge taken, or nullopt for an indiscernibility step.
struct UPath {
  std::vector<ElementId> elems;
  std::vector<std::optional<Symbol>> steps;  // steps.size() + 1 == elems.size()
  std::string render() const;
};

// All paths of length <= depth, encoded as a finite structure whose named
// elements are rendered paths, so the standard evaluator and model checker
// apply to it. paths[i] describes the element named paths[i].render().
struct TruncatedUnraveling {
  FiniteStructure s;
  int depth = 0;
  std::vector<UPath> paths;
};

// Materializes the truncated unraveling. Role edges between paths are closed
// under the given hierarchy, which is why it is a parameter: the structure
// alone does not carry the RI set. Throws std::runtime_error when the path
// count exceeds budget, std::invalid_argument when depth < 1.
TruncatedUnraveling unravel(const FiniteStructure& i_re,
                            const RoleHierarchy& roles, int depth,
                            std::size_t budget = kOracleBudget);

// Ground truth: evaluates the unfolded query over the truncated unraveling
// of kb's reachable canonical structure by lazy homomorphism search, never
// materializing more paths than the search visits. Default depth:
// |domain| + unfolded atom count + 2. Throws std::runtime_error for
// inconsistent KBs or an exhausted budget, std::invalid_argument for
// malformed queries, unknown individuals, or role synonyms.
AnswerSet certain_answers_oracle(const KnowledgeBase& kb,
                                 const ConjunctiveQuery& q,
                                 std::optional<int> depth = std::nullopt,
                                 std::size_t budget = kOracleBudget);

}  // namespace roughel
