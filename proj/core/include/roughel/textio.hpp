// Text syntax: s-expressions for knowledge bases (.rkb), conjunctive queries
// (.rcq), and rewritten queries (.rfo); a line-based fact format for finite
// structures (.rfs). Serialization is canonical and deterministic.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "roughel/ast.hpp"
#include "roughel/rewriter.hpp"
#include "roughel/structure.hpp"

namespace roughel {

struct SourceSpan {
  size_t start = 0;
  size_t end = 0;
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, SourceSpan span)
      : std::runtime_error(message + " (line " + std::to_string(span.line) + ", column " +
                           std::to_string(span.column) + ")"),
        span_(span) {}
  const SourceSpan& span() const { return span_; }

private:
  SourceSpan span_;
};

// Grammar (s-expressions; ';' starts a line comment):
//   kb      ::= { axiom | assertion }
//   axiom   ::= (subclass concept concept) | (subrole role role)
//   assertion ::= (assert concept ind) | (assert-role role ind ind) | (indisc ind ind)
//   concept ::= top | bot | name | (and concept concept+)
//             | (some role concept) | (upper concept) | (lower concept)
//   query   ::= (query (var*) body*)
//   body    ::= atom | (some-atoms atom*) | (exists (var*) body*)
//   atom    ::= (atom concept term) | (role role term term) | (rho term term)
//   term    ::= var | (ind name)
// Identifiers match [A-Za-z_][A-Za-z0-9_]*; the token rho is reserved and
// never names a role or concept. N-ary (and ...) right-folds to binary.
KnowledgeBase parse_kb(std::string_view text);
ConjunctiveQuery parse_query(std::string_view text);

std::string serialize_concept(Concept c);
std::string serialize_kb(const KnowledgeBase& kb);
std::string serialize_query(const ConjunctiveQuery& q);

// Element rendering: a, x[C], x[C,a], x[C,x[D]], l[a], l[x[D]]; complex
// concepts inside brackets use the s-expression syntax.
std::string render_element(const ElementId& e);
ElementId parse_element(std::string_view text);

// Fact lines sorted lexicographically: concept(A) and role(r) declare the
// signature, dom(e) lists every element, then A(e), r(e, f), rho~(e, f),
// rho_ell(e, f), aux(e), aux_rho(e). The predicates concept, role, dom,
// rho_ell, aux and aux_rho are reserved; serialization rejects structures
// whose signature collides with them.
std::string serialize_structure(const FiniteStructure& s);
FiniteStructure parse_structure(std::string_view text);

// S-expression form of a rewritten query:
//   (query (ans*) (exists (var*) core* filter*))
// with filters (not-aux t), (not-aux-rho t),
// (implies (aux t) (and (eq t t)*)), (implies (aux t) (or (role r t t)*)).
std::string serialize_foquery(const FOQuery& q);

}  // namespace roughel
