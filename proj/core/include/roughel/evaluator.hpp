// Backtracking evaluation of rewritten queries over finite structures, and
// the end-to-end certain-answer pipeline.
#pragma once

#include <set>
#include <vector>

#include "roughel/ast.hpp"
#include "roughel/rewriter.hpp"
#include "roughel/structure.hpp"

namespace roughel {

using AnswerTuple = std::vector<Symbol>;  // one individual per answer variable
using AnswerSet = std::set<AnswerTuple>;

enum class JoinOrder { MostConstrained, Lexicographic };

struct EvalOptions {
  JoinOrder order = JoinOrder::MostConstrained;
  bool apply_filters = true;  // false evaluates the bare core (diagnostics)
};

// Enumerates matches of q's core in s, keeps those passing the filter
// conjuncts, and projects to the answer variables. Answer variables bound to
// auxiliary elements denote no individual and produce no tuple. Throws
// std::invalid_argument for concept or role names outside s's declared
// signature.
AnswerSet evaluate(const FiniteStructure& s, const FOQuery& q,
                   const EvalOptions& opts = {});

// Full pipeline: validate, materialize the reachable canonical structure,
// rewrite, evaluate. Throws std::invalid_argument for malformed queries,
// queries naming unknown individuals, or KBs with role synonyms;
// std::runtime_error for inconsistent KBs.
AnswerSet answer(const KnowledgeBase& kb, const ConjunctiveQuery& q,
                 const EvalOptions& opts = {});

}  // namespace roughel
