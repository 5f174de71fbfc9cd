#include "roughel/textio.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace roughel {

namespace {

// '-' is allowed while lexing so dashed keywords (some-atoms, not-aux, ...)
// tokenize; user-supplied names reject it via check_name.
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

void check_name(const std::string& name, SourceSpan span) {
  if (name == "rho") throw ParseError("rho is reserved", span);
  if (name.find('-') != std::string::npos)
    throw ParseError("'-' is not allowed in names: " + name, span);
}

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  SourceSpan span;

  const SExpr& at(size_t i, const char* what) const {
    if (is_atom || i >= items.size())
      throw ParseError(std::string("expected ") + what, span);
    return items[i];
  }
  const std::string& ident(size_t i, const char* what) const {
    const SExpr& e = at(i, what);
    if (!e.is_atom) throw ParseError(std::string("expected identifier for ") + what, e.span);
    return e.atom;
  }
  const std::string& head() const {
    if (is_atom || items.empty() || !items[0].is_atom)
      throw ParseError("expected a form starting with a keyword", span);
    return items[0].atom;
  }
  size_t arity() const { return items.empty() ? 0 : items.size() - 1; }
  void expect_arity(size_t n, const char* what) const {
    if (arity() != n)
      throw ParseError(std::string(what) + " expects " + std::to_string(n) + " arguments, got " +
                           std::to_string(arity()),
                       span);
  }
};

class SexprReader {
public:
  explicit SexprReader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_ws();
    while (pos_ < text_.size()) {
      out.push_back(read_one());
      skip_ws();
    }
    return out;
  }

private:
  SourceSpan here() const { return SourceSpan{pos_, pos_, line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read_one() {
    SourceSpan start = here();
    char c = text_[pos_];
    if (c == '(') {
      advance();
      SExpr list;
      list.span = start;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        list.items.push_back(read_one());
        skip_ws();
      }
      if (pos_ >= text_.size()) throw ParseError("unterminated '('", start);
      advance();  // ')'
      list.span.end = pos_;
      return list;
    }
    if (c == ')') throw ParseError("unexpected ')'", start);
    if (!is_ident_start(c))
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    SExpr atom;
    atom.is_atom = true;
    atom.span = start;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
      atom.atom += text_[pos_];
      advance();
    }
    atom.span.end = pos_;
    return atom;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Symbol role_symbol(const SExpr& e, size_t i, const char* what) {
  const std::string& name = e.ident(i, what);
  check_name(name, e.at(i, what).span);
  return Symbol::role_name(name);
}

Concept parse_concept_expr(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom == "top") return Concept::top();
    if (e.atom == "bot") return Concept::bot();
    check_name(e.atom, e.span);
    return Concept::name(Symbol::concept_name(e.atom));
  }
  const std::string& head = e.head();
  if (head == "and") {
    if (e.arity() < 2) throw ParseError("and expects at least 2 arguments", e.span);
    Concept acc = parse_concept_expr(e.items.back());
    for (size_t i = e.items.size() - 1; i >= 2; --i)
      acc = Concept::conj(parse_concept_expr(e.items[i - 1]), acc);
    return acc;
  }
  if (head == "some") {
    e.expect_arity(2, "some");
    return Concept::exists(role_symbol(e, 1, "role name"), parse_concept_expr(e.items[2]));
  }
  if (head == "upper") {
    e.expect_arity(1, "upper");
    return Concept::upper(parse_concept_expr(e.items[1]));
  }
  if (head == "lower") {
    e.expect_arity(1, "lower");
    return Concept::lower(parse_concept_expr(e.items[1]));
  }
  throw ParseError("unknown concept constructor: " + head, e.span);
}

Symbol individual_symbol(const SExpr& e, size_t i, const char* what) {
  const std::string& name = e.ident(i, what);
  check_name(name, e.at(i, what).span);
  return Symbol::individual(name);
}

}  // namespace

KnowledgeBase parse_kb(std::string_view text) {
  KnowledgeBase kb;
  for (const SExpr& form : SexprReader(text).read_all()) {
    const std::string& head = form.head();
    if (head == "subclass") {
      form.expect_arity(2, "subclass");
      kb.gcis.push_back(Gci{parse_concept_expr(form.items[1]), parse_concept_expr(form.items[2])});
    } else if (head == "subrole") {
      form.expect_arity(2, "subrole");
      kb.ris.push_back(Ri{role_symbol(form, 1, "subrole"), role_symbol(form, 2, "subrole")});
    } else if (head == "assert") {
      form.expect_arity(2, "assert");
      kb.concept_assertions.push_back(
          ConceptAssertion{parse_concept_expr(form.items[1]), individual_symbol(form, 2, "individual")});
    } else if (head == "assert-role") {
      form.expect_arity(3, "assert-role");
      kb.role_assertions.push_back(RoleAssertion{role_symbol(form, 1, "assert-role"),
                                                 individual_symbol(form, 2, "individual"),
                                                 individual_symbol(form, 3, "individual")});
    } else if (head == "indisc") {
      form.expect_arity(2, "indisc");
      kb.indisc_assertions.push_back(
          IndiscAssertion{individual_symbol(form, 1, "individual"), individual_symbol(form, 2, "individual")});
    } else {
      throw ParseError("unknown form: " + head, form.span);
    }
  }
  kb.canonicalize();
  return kb;
}

namespace {

Term parse_term(const SExpr& e) {
  if (e.is_atom) {
    check_name(e.atom, e.span);
    return Term::var(Symbol::variable(e.atom));
  }
  if (e.head() == "ind") {
    e.expect_arity(1, "ind");
    return Term::ind(individual_symbol(e, 1, "individual"));
  }
  throw ParseError("expected a variable or (ind name)", e.span);
}

void parse_query_body(const SExpr& e, ConjunctiveQuery& q) {
  const std::string& head = e.head();
  if (head == "atom") {
    e.expect_arity(2, "atom");
    q.concept_atoms.push_back(ConceptAtom{parse_concept_expr(e.items[1]), parse_term(e.items[2])});
  } else if (head == "role") {
    e.expect_arity(3, "role");
    q.role_atoms.push_back(
        RoleAtom{role_symbol(e, 1, "role"), parse_term(e.items[2]), parse_term(e.items[3])});
  } else if (head == "rho") {
    e.expect_arity(2, "rho");
    q.rho_atoms.push_back(RhoAtom{parse_term(e.items[1]), parse_term(e.items[2])});
  } else if (head == "some-atoms") {
    for (size_t i = 1; i < e.items.size(); ++i) parse_query_body(e.items[i], q);
  } else if (head == "exists") {
    // Variables are existential by default; the binder list is validated and
    // otherwise ignored so rewritten-style queries stay readable.
    const SExpr& binder = e.at(1, "variable list");
    if (binder.is_atom) throw ParseError("exists expects a variable list", binder.span);
    for (const SExpr& v : binder.items)
      if (!v.is_atom) throw ParseError("expected a variable", v.span);
    for (size_t i = 2; i < e.items.size(); ++i) parse_query_body(e.items[i], q);
  } else {
    throw ParseError("unknown query conjunct: " + head, e.span);
  }
}

}  // namespace

ConjunctiveQuery parse_query(std::string_view text) {
  std::vector<SExpr> forms = SexprReader(text).read_all();
  if (forms.size() != 1)
    throw ParseError("expected exactly one (query ...) form",
                     forms.empty() ? SourceSpan{} : forms[1].span);
  const SExpr& form = forms[0];
  if (form.head() != "query") throw ParseError("expected (query ...)", form.span);
  const SExpr& header = form.at(1, "answer variable list");
  if (header.is_atom) throw ParseError("expected an answer variable list", header.span);

  ConjunctiveQuery q;
  for (const SExpr& v : header.items) {
    if (!v.is_atom) throw ParseError("expected a variable", v.span);
    check_name(v.atom, v.span);
    q.answer_vars.push_back(Symbol::variable(v.atom));
  }
  for (size_t i = 2; i < form.items.size(); ++i) parse_query_body(form.items[i], q);
  q.canonicalize();
  if (std::string err = q.validate(); !err.empty()) throw ParseError(err, form.span);
  return q;
}

std::string serialize_concept(Concept c) {
  switch (c.kind()) {
    case CKind::Top:
      return "top";
    case CKind::Bot:
      return "bot";
    case CKind::Name:
      return c.name_sym().name();
    case CKind::And:
      return "(and " + serialize_concept(c.lhs()) + " " + serialize_concept(c.rhs()) + ")";
    case CKind::Exists:
      return "(some " + c.role().name() + " " + serialize_concept(c.arg()) + ")";
    case CKind::Upper:
      return "(upper " + serialize_concept(c.arg()) + ")";
    case CKind::Lower:
      return "(lower " + serialize_concept(c.arg()) + ")";
  }
  return "";
}

std::string serialize_kb(const KnowledgeBase& kb) {
  KnowledgeBase c = kb;
  c.canonicalize();
  std::ostringstream out;
  for (const auto& g : c.gcis)
    out << "(subclass " << serialize_concept(g.lhs) << " " << serialize_concept(g.rhs) << ")\n";
  for (const auto& ri : c.ris)
    out << "(subrole " << ri.sub.name() << " " << ri.sup.name() << ")\n";
  for (const auto& ca : c.concept_assertions)
    out << "(assert " << serialize_concept(ca.c) << " " << ca.individual.name() << ")\n";
  for (const auto& ra : c.role_assertions)
    out << "(assert-role " << ra.role.name() << " " << ra.subject.name() << " "
        << ra.object.name() << ")\n";
  for (const auto& ia : c.indisc_assertions)
    out << "(indisc " << ia.a.name() << " " << ia.b.name() << ")\n";
  return out.str();
}

namespace {
std::string term_str(const Term& t) {
  return t.is_var ? t.sym.name() : "(ind " + t.sym.name() + ")";
}
}  // namespace

std::string serialize_query(const ConjunctiveQuery& q) {
  ConjunctiveQuery c = q;
  c.canonicalize();
  std::ostringstream out;
  out << "(query (";
  for (size_t i = 0; i < c.answer_vars.size(); ++i)
    out << (i ? " " : "") << c.answer_vars[i].name();
  out << ")";
  for (const auto& a : c.concept_atoms)
    out << " (atom " << serialize_concept(a.c) << " " << term_str(a.t) << ")";
  for (const auto& a : c.role_atoms)
    out << " (role " << a.role.name() << " " << term_str(a.s) << " " << term_str(a.t) << ")";
  for (const auto& a : c.rho_atoms)
    out << " (rho " << term_str(a.s) << " " << term_str(a.t) << ")";
  out << ")\n";
  return out.str();
}

namespace {
std::string seed_str(const Seed& s) {
  if (s.is_named) return s.ind.name();
  return "x[" + serialize_concept(s.c) + "]";
}
}  // namespace

std::string render_element(const ElementId& e) {
  switch (e.sort) {
    case Sort::Named:
      return e.ind.name();
    case Sort::ConceptRep:
      return "x[" + serialize_concept(e.c) + "]";
    case Sort::UpperRep:
      return "x[" + serialize_concept(e.c) + "," + seed_str(e.seed) + "]";
    case Sort::LowerRep:
      return "l[" + seed_str(e.seed) + "]";
  }
  return "";
}

namespace {

// Scanner over the compact element syntax; concepts inside brackets reuse the
// s-expression reader.
struct ElementScanner {
  std::string_view text;
  size_t pos = 0;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("bad element: " + msg, SourceSpan{pos, pos, 1, static_cast<int>(pos) + 1});
  }

  std::string read_ident() {
    size_t start = pos;
    if (eof() || !is_ident_start(peek())) fail("expected identifier");
    while (!eof() && is_ident_char(peek())) ++pos;
    return std::string(text.substr(start, pos - start));
  }

  Concept read_concept() {
    if (!eof() && peek() == '(') {
      size_t start = pos;
      int depth = 0;
      while (!eof()) {
        if (peek() == '(') ++depth;
        if (peek() == ')') {
          --depth;
          ++pos;
          if (depth == 0) break;
          continue;
        }
        ++pos;
      }
      if (depth != 0) fail("unterminated concept");
      std::vector<SExpr> forms = SexprReader(text.substr(start, pos - start)).read_all();
      if (forms.size() != 1) fail("expected one concept");
      return parse_concept_expr(forms[0]);
    }
    std::string name = read_ident();
    if (name == "top") return Concept::top();
    if (name == "bot") return Concept::bot();
    return Concept::name(Symbol::concept_name(name));
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  Seed read_seed() {
    if (!eof() && peek() == 'x' && pos + 1 < text.size() && text[pos + 1] == '[') {
      pos += 2;
      Concept c = read_concept();
      expect(']');
      return Seed::concept_rep(c);
    }
    return Seed::named(Symbol::individual(read_ident()));
  }

  ElementId read_element() {
    if (!eof() && peek() == 'x' && pos + 1 < text.size() && text[pos + 1] == '[') {
      pos += 2;
      Concept c = read_concept();
      if (!eof() && peek() == ',') {
        ++pos;
        Seed seed = read_seed();
        expect(']');
        return ElementId::upper_rep(c, seed);
      }
      expect(']');
      return ElementId::concept_rep(c);
    }
    if (!eof() && peek() == 'l' && pos + 1 < text.size() && text[pos + 1] == '[') {
      pos += 2;
      Seed seed = read_seed();
      expect(']');
      return ElementId::lower_rep(seed);
    }
    return ElementId::named(Symbol::individual(read_ident()));
  }
};

}  // namespace

ElementId parse_element(std::string_view text) {
  ElementScanner sc{text};
  ElementId e = sc.read_element();
  if (!sc.eof()) sc.fail("trailing characters");
  return e;
}

namespace {

const std::set<std::string>& reserved_fact_predicates() {
  static const std::set<std::string> r = {"concept", "role",    "dom", "aux",
                                          "aux_rho", "rho_ell", "rho", "ind", "top", "bot"};
  return r;
}

void check_signature_name(Symbol s) {
  if (reserved_fact_predicates().count(s.name()))
    throw std::invalid_argument("signature name collides with reserved fact predicate: " +
                                s.name());
}

}  // namespace

std::string serialize_structure(const FiniteStructure& s) {
  std::vector<std::string> lines;
  auto check_dom = [&s](const ElementId& e) {
    if (!s.has_element(e))
      throw std::invalid_argument("structure references element outside domain: " +
                                  render_element(e));
  };
  for (const auto& [name, ext] : s.concept_ext) {
    check_signature_name(name);
    lines.push_back("concept(" + name.name() + ")");
    for (const auto& e : ext) {
      check_dom(e);
      lines.push_back(name.name() + "(" + render_element(e) + ")");
    }
  }
  for (const auto& [name, ext] : s.role_ext) {
    check_signature_name(name);
    lines.push_back("role(" + name.name() + ")");
    for (const auto& [a, b] : ext) {
      check_dom(a);
      check_dom(b);
      lines.push_back(name.name() + "(" + render_element(a) + ", " + render_element(b) + ")");
    }
  }
  for (const auto& e : s.domain) lines.push_back("dom(" + render_element(e) + ")");
  for (const auto& [a, b] : s.rho_seed) {
    check_dom(a);
    check_dom(b);
    lines.push_back("rho~(" + render_element(a) + ", " + render_element(b) + ")");
  }
  for (const auto& [a, b] : s.rho_ell) {
    check_dom(a);
    check_dom(b);
    lines.push_back("rho_ell(" + render_element(a) + ", " + render_element(b) + ")");
  }
  for (const auto& e : s.aux) {
    check_dom(e);
    lines.push_back("aux(" + render_element(e) + ")");
  }
  for (const auto& e : s.aux_rho) {
    check_dom(e);
    lines.push_back("aux_rho(" + render_element(e) + ")");
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

namespace {

// Splits "a, x[D,a]" into arguments at top-level commas (commas inside
// brackets or parens belong to an element).
std::vector<std::string> split_args(std::string_view s, SourceSpan span) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (depth != 0) throw ParseError("unbalanced brackets in fact", span);
  out.push_back(cur);
  for (auto& a : out) {
    size_t b = a.find_first_not_of(" \t");
    size_t e = a.find_last_not_of(" \t");
    a = (b == std::string::npos) ? "" : a.substr(b, e - b + 1);
    if (a.empty()) throw ParseError("empty argument in fact", span);
  }
  return out;
}

}  // namespace

FiniteStructure parse_structure(std::string_view text) {
  FiniteStructure s;
  auto element = [&s](const std::string& str) {
    ElementId e = parse_element(str);
    s.domain.insert(e);
    return e;
  };
  int lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;
    SourceSpan span{0, 0, lineno, 1};

    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.empty() || line[0] == ';') continue;

    size_t lp = line.find('(');
    if (lp == std::string_view::npos || line.back() != ')')
      throw ParseError("expected fact of the form pred(args)", span);
    std::string pred(line.substr(0, lp));
    std::vector<std::string> args = split_args(line.substr(lp + 1, line.size() - lp - 2), span);

    if (pred == "concept") {
      if (args.size() != 1) throw ParseError("concept/1 expected", span);
      s.declare_concept(Symbol::concept_name(args[0]));
    } else if (pred == "role") {
      if (args.size() != 1) throw ParseError("role/1 expected", span);
      s.declare_role(Symbol::role_name(args[0]));
    } else if (pred == "dom") {
      if (args.size() != 1) throw ParseError("dom/1 expected", span);
      element(args[0]);
    } else if (pred == "rho~") {
      if (args.size() != 2) throw ParseError("rho~/2 expected", span);
      s.rho_seed.emplace(element(args[0]), element(args[1]));
    } else if (pred == "rho_ell") {
      if (args.size() != 2) throw ParseError("rho_ell/2 expected", span);
      s.rho_ell.emplace(element(args[0]), element(args[1]));
    } else if (pred == "aux") {
      if (args.size() != 1) throw ParseError("aux/1 expected", span);
      s.aux.insert(element(args[0]));
    } else if (pred == "aux_rho") {
      if (args.size() != 1) throw ParseError("aux_rho/1 expected", span);
      s.aux_rho.insert(element(args[0]));
    } else if (args.size() == 1) {
      Symbol name = Symbol::concept_name(pred);
      s.declare_concept(name);
      s.concept_ext[name].insert(element(args[0]));
    } else if (args.size() == 2) {
      Symbol name = Symbol::role_name(pred);
      s.declare_role(name);
      s.role_ext[name].emplace(element(args[0]), element(args[1]));
    } else {
      throw ParseError("fact arity must be 1 or 2", span);
    }
  }
  s.close_rho();
  return s;
}

namespace {
std::string guard_str(const Term& t) { return "(aux " + term_str(t) + ")"; }
}  // namespace

std::string serialize_foquery(const FOQuery& q) {
  std::ostringstream out;
  out << "(query (";
  for (size_t i = 0; i < q.answer_vars.size(); ++i)
    out << (i ? " " : "") << q.answer_vars[i].name();
  out << ")\n  (exists (";
  for (size_t i = 0; i < q.exist_vars.size(); ++i)
    out << (i ? " " : "") << q.exist_vars[i].name();
  out << ")";
  std::vector<std::string> conjuncts;
  for (const auto& a : q.concept_atoms)
    conjuncts.push_back("(atom " + serialize_concept(a.c) + " " + term_str(a.t) + ")");
  for (const auto& a : q.role_atoms)
    conjuncts.push_back("(role " + a.role.name() + " " + term_str(a.s) + " " + term_str(a.t) +
                        ")");
  for (const auto& a : q.rho_atoms)
    conjuncts.push_back("(rho " + term_str(a.s) + " " + term_str(a.t) + ")");
  for (const auto& a : q.rho_ell_atoms)
    conjuncts.push_back("(rho-ell " + term_str(a.s) + " " + term_str(a.t) + ")");
  for (const auto& t : q.not_aux) conjuncts.push_back("(not-aux " + term_str(t) + ")");
  for (const auto& t : q.not_aux_rho) conjuncts.push_back("(not-aux-rho " + term_str(t) + ")");
  for (const auto& g : q.guarded_eqs) {
    std::string body = "(and";
    for (const auto& [a, b] : g.eqs) body += " (eq " + term_str(a) + " " + term_str(b) + ")";
    body += ")";
    conjuncts.push_back("(implies " + guard_str(g.guard) + " " + body + ")");
  }
  for (const auto& g : q.guarded_ors) {
    std::string body = "(or";
    for (const auto& r : g.roles)
      body += " (role " + r.name() + " " + term_str(g.pre) + " " + term_str(g.guard) + ")";
    body += ")";
    conjuncts.push_back("(implies " + guard_str(g.guard) + " " + body + ")");
  }
  for (const auto& c : conjuncts) out << "\n    " << c;
  out << "))\n";
  return out.str();
}

}  // namespace roughel
