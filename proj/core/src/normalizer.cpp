#include <roughel/normalizer.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace roughel {

namespace {

bool is_atomic(Concept c) {
  return c.kind() == CKind::Name || c.kind() == CKind::Top;
}

bool is_conj_rhs(Concept c) {
  return c.kind() == CKind::Name || c.kind() == CKind::Top || c.kind() == CKind::Bot;
}

// Allocates _Nk names, skipping every index that already occurs in the input
// so repeated normalization cannot collide with earlier output.
class FreshNames {
 public:
  void scan(Concept c) {
    switch (c.kind()) {
      case CKind::Name: scan(c.name_sym()); break;
      case CKind::And: scan(c.lhs()); scan(c.rhs()); break;
      case CKind::Exists: scan(c.arg()); break;
      case CKind::Upper:
      case CKind::Lower: scan(c.arg()); break;
      default: break;
    }
  }

  void scan(Symbol s) {
    const std::string& n = s.name();
    if (n.size() < 3 || n[0] != '_' || n[1] != 'N') return;
    std::uint64_t k = 0;
    for (std::size_t i = 2; i < n.size(); ++i) {
      if (n[i] < '0' || n[i] > '9') return;
      k = k * 10 + static_cast<std::uint64_t>(n[i] - '0');
    }
    next_ = std::max(next_, k + 1);
  }

  Concept make(std::vector<Symbol>& out) {
    Symbol s = Symbol::concept_name("_N" + std::to_string(next_++));
    out.push_back(s);
    return Concept::name(s);
  }

 private:
  std::uint64_t next_ = 0;
};

// Bottom-up logical simplification; applied only to axioms that are not
// already in a normal shape, so normal input is reproduced verbatim.
Concept simplify(Concept c) {
  switch (c.kind()) {
    case CKind::Top:
    case CKind::Bot:
    case CKind::Name:
      return c;
    case CKind::And: {
      Concept l = simplify(c.lhs());
      Concept r = simplify(c.rhs());
      if (l.kind() == CKind::Bot || r.kind() == CKind::Bot) return Concept::bot();
      if (l.kind() == CKind::Top) return r;
      if (r.kind() == CKind::Top) return l;
      if (l == r) return l;
      return Concept::conj(l, r);
    }
    case CKind::Exists: {
      Concept f = simplify(c.arg());
      if (f.kind() == CKind::Bot) return Concept::bot();
      return Concept::exists(c.role(), f);
    }
    case CKind::Upper: {
      Concept a = simplify(c.arg());
      if (a.kind() == CKind::Bot || a.kind() == CKind::Top) return a;
      return Concept::upper(a);
    }
    case CKind::Lower: {
      Concept a = simplify(c.arg());
      if (a.kind() == CKind::Bot || a.kind() == CKind::Top) return a;
      return Concept::lower(a);
    }
  }
  throw std::logic_error("unreachable concept kind");
}

std::size_t ast_nodes(Concept c) {
  switch (c.kind()) {
    case CKind::Top:
    case CKind::Bot:
    case CKind::Name:
      return 1;
    case CKind::And: return 1 + ast_nodes(c.lhs()) + ast_nodes(c.rhs());
    case CKind::Exists:
    case CKind::Upper:
    case CKind::Lower:
      return 1 + ast_nodes(c.arg());
  }
  return 1;
}

class Normalizer {
 public:
  Normalizer(std::vector<Gci>& out, std::vector<Symbol>& fresh, FreshNames& gen)
      : out_(out), fresh_(fresh), gen_(gen) {}

  void run(Concept lhs, Concept rhs) {
    Gci g{lhs, rhs};
    if (classify_gci(g) != GciShape::NotNormal) {
      out_.push_back(g);
      return;
    }
    lhs = simplify(lhs);
    rhs = simplify(rhs);
    if (lhs.kind() == CKind::Bot) return;  // vacuous
    if (rhs.kind() == CKind::Top) return;  // trivial
    Gci s{lhs, rhs};
    if (classify_gci(s) != GciShape::NotNormal) {
      out_.push_back(s);
      return;
    }
    // Splitting both-complex inclusions first keeps the output linear: each
    // side is decomposed once, against a fresh name.
    if (!is_atomic(lhs) && !is_conj_rhs(rhs)) {
      Concept x = gen_.make(fresh_);
      run(lhs, x);
      run(x, rhs);
      return;
    }
    if (is_atomic(lhs)) {
      decompose_rhs(lhs, rhs);
    } else {
      decompose_lhs(lhs, rhs);
    }
  }

 private:
  // lhs is a name or top; rhs is complex (otherwise the axiom were normal).
  void decompose_rhs(Concept lhs, Concept rhs) {
    switch (rhs.kind()) {
      case CKind::And:
        run(lhs, rhs.lhs());
        run(lhs, rhs.rhs());
        return;
      case CKind::Exists: {
        Concept x = gen_.make(fresh_);
        run(lhs, Concept::exists(rhs.role(), x));
        run(x, rhs.arg());
        return;
      }
      case CKind::Upper: {
        Concept x = gen_.make(fresh_);
        run(lhs, Concept::upper(x));
        run(x, rhs.arg());
        return;
      }
      case CKind::Lower: {
        Concept x = gen_.make(fresh_);
        run(lhs, Concept::lower(x));
        run(x, rhs.arg());
        return;
      }
      default:
        throw std::logic_error("normalizer: unexpected simple right-hand side");
    }
  }

  // rhs is a name, top, or bot; lhs is complex.
  void decompose_lhs(Concept lhs, Concept rhs) {
    switch (lhs.kind()) {
      case CKind::And: {
        std::vector<Concept> parts;
        flatten(lhs, parts);
        for (Concept& p : parts) {
          if (!is_atomic(p)) {
            Concept x = gen_.make(fresh_);
            run(p, x);
            p = x;
          }
        }
        while (parts.size() > 2) {
          Concept x = gen_.make(fresh_);
          out_.push_back(Gci{Concept::conj(parts[0], parts[1]), x});
          parts.erase(parts.begin());
          parts[0] = x;
        }
        if (parts.size() == 2) {
          run(Concept::conj(parts[0], parts[1]), rhs);
        } else {
          run(parts[0], rhs);
        }
        return;
      }
      case CKind::Exists: {
        if (!is_atomic(lhs.arg())) {
          Concept x = gen_.make(fresh_);
          run(lhs.arg(), x);
          run(Concept::exists(lhs.role(), x), rhs);
          return;
        }
        // Atomic filler but rhs is bot: route through a fresh name, since
        // only the conjunction shape admits bot on the right.
        Concept x = gen_.make(fresh_);
        out_.push_back(Gci{lhs, x});
        run(x, rhs);
        return;
      }
      case CKind::Upper: {
        // ρ is symmetric, so (upper C) ⊑ B is equivalent to C ⊑ (lower X),
        // X ⊑ B: anything ρ-related to a C-instance falls under B exactly
        // when every granule around a C-instance sits inside B's preimage.
        Concept x = gen_.make(fresh_);
        run(lhs.arg(), Concept::lower(x));
        run(x, rhs);
        return;
      }
      case CKind::Lower: {
        if (!is_atomic(lhs.arg())) {
          Concept x = gen_.make(fresh_);
          run(lhs.arg(), x);
          run(Concept::lower(x), rhs);
          return;
        }
        Concept x = gen_.make(fresh_);
        out_.push_back(Gci{lhs, x});
        run(x, rhs);
        return;
      }
      default:
        throw std::logic_error("normalizer: unexpected simple left-hand side");
    }
  }

  static void flatten(Concept c, std::vector<Concept>& out) {
    if (c.kind() == CKind::And) {
      flatten(c.lhs(), out);
      flatten(c.rhs(), out);
    } else {
      out.push_back(c);
    }
  }

  std::vector<Gci>& out_;
  std::vector<Symbol>& fresh_;
  FreshNames& gen_;
};

NormalizedTBox normalize_with(const std::vector<Gci>& gcis, const std::vector<Ri>& ris,
                              FreshNames& gen) {
  NormalizedTBox result;
  result.ris = ris;
  std::size_t input_nodes = 0;
  for (const Gci& g : gcis) input_nodes += ast_nodes(g.lhs) + ast_nodes(g.rhs);
  Normalizer n(result.axioms, result.fresh_names, gen);
  for (const Gci& g : gcis) n.run(g.lhs, g.rhs);
  std::sort(result.axioms.begin(), result.axioms.end());
  result.axioms.erase(std::unique(result.axioms.begin(), result.axioms.end()),
                      result.axioms.end());
  std::sort(result.ris.begin(), result.ris.end());
  result.ris.erase(std::unique(result.ris.begin(), result.ris.end()), result.ris.end());
  if (result.axioms.size() > 4 * std::max<std::size_t>(input_nodes, 1)) {
    throw std::logic_error("normalizer exceeded the linear output bound");
  }
  return result;
}

}  // namespace

GciShape classify_gci(const Gci& g) {
  Concept l = g.lhs;
  Concept r = g.rhs;
  bool conj_lhs = is_atomic(l) ||
                  (l.kind() == CKind::And && is_atomic(l.lhs()) && is_atomic(l.rhs()));
  if (conj_lhs && is_conj_rhs(r)) return GciShape::ConjSub;
  bool simple_rhs = r.kind() == CKind::Name || r.kind() == CKind::Top;
  if (l.kind() == CKind::Exists && is_atomic(l.arg()) && simple_rhs)
    return GciShape::ExistsLeft;
  if (is_atomic(l) && r.kind() == CKind::Exists && is_atomic(r.arg()))
    return GciShape::ExistsRight;
  if (is_atomic(l) && r.kind() == CKind::Lower && is_atomic(r.arg()))
    return GciShape::LowerRight;
  if (is_atomic(l) && r.kind() == CKind::Upper && is_atomic(r.arg()))
    return GciShape::UpperRight;
  if (l.kind() == CKind::Lower && is_atomic(l.arg()) && simple_rhs)
    return GciShape::LowerLeft;
  return GciShape::NotNormal;
}

bool is_normal(const std::vector<Gci>& gcis) {
  for (const Gci& g : gcis) {
    if (classify_gci(g) == GciShape::NotNormal) return false;
  }
  return true;
}

NormalizedTBox normalize(const std::vector<Gci>& gcis, const std::vector<Ri>& ris) {
  FreshNames gen;
  for (const Gci& g : gcis) {
    gen.scan(g.lhs);
    gen.scan(g.rhs);
  }
  return normalize_with(gcis, ris, gen);
}

NormalizedKB normalize_kb(const KnowledgeBase& kb) {
  FreshNames gen;
  for (const Gci& g : kb.gcis) {
    gen.scan(g.lhs);
    gen.scan(g.rhs);
  }
  for (const ConceptAssertion& ca : kb.concept_assertions) gen.scan(ca.c);

  NormalizedKB result;
  std::vector<Gci> gcis = kb.gcis;
  std::map<Concept, Concept> memo;  // complex assertion concept -> fresh name
  for (const ConceptAssertion& ca : kb.concept_assertions) {
    Concept c = ca.c;
    if (c.kind() == CKind::Name || c.kind() == CKind::Top) {
      result.kb.concept_assertions.push_back(ca);
      continue;
    }
    auto it = memo.find(c);
    if (it == memo.end()) {
      Concept x = gen.make(result.fresh_names);
      it = memo.emplace(c, x).first;
      gcis.push_back(Gci{x, c});
    }
    result.kb.concept_assertions.push_back(ConceptAssertion{it->second, ca.individual});
  }

  NormalizedTBox t = normalize_with(gcis, kb.ris, gen);
  result.kb.gcis = t.axioms;
  result.kb.ris = t.ris;
  result.kb.role_assertions = kb.role_assertions;
  result.kb.indisc_assertions = kb.indisc_assertions;
  result.kb.canonicalize();
  for (Symbol s : t.fresh_names) result.fresh_names.push_back(s);
  return result;
}

}  // namespace roughel
