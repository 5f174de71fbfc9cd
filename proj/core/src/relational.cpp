#include "roughel/relational.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "roughel/textio.hpp"

namespace roughel {

namespace {

std::string ident(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string lit(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += '\'';
  return out;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& parts,
                 const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Builds the SELECT: core atoms become joined table aliases, filters become
// WHERE conjuncts. Terms resolve to the column of their first occurrence.
class QueryBuilder {
 public:
  explicit QueryBuilder(const FOQuery& q) : q_(q) {
    for (const ConceptAtom& a : q.concept_atoms) {
      switch (a.c.kind()) {
        case CKind::Name:
          add_unary("c_" + a.c.name_sym().name(), a.t);
          break;
        case CKind::Top:
          add_unary("dom", a.t);
          break;
        case CKind::Bot: {
          std::vector<std::string> conds{"1 = 0"};
          add_alias("dom", conds, a.t);
          break;
        }
        default:
          throw std::logic_error("emit_relational: query must be unfolded");
      }
    }
    for (const RoleAtom& a : q.role_atoms)
      add_binary("r_" + a.role.name(), a.s, a.t);
    for (const RhoAtom& a : q.rho_atoms) add_binary("rho", a.s, a.t);
    for (const RhoEllAtom& a : q.rho_ell_atoms)
      add_binary("rho_ell", a.s, a.t);

    for (const Term& t : q.not_aux) {
      std::string a = fresh_alias();
      where_.push_back("NOT EXISTS (SELECT 1 FROM " + ident("aux") + " " + a +
                       " WHERE " + a + ".elem = " + expr(t) + ")");
    }
    for (const Term& t : q.not_aux_rho) {
      std::string a = fresh_alias();
      where_.push_back("NOT EXISTS (SELECT 1 FROM " + ident("aux_rho") + " " +
                       a + " WHERE " + a + ".elem = " + expr(t) + ")");
    }
    for (const FOQuery::GuardedEq& g : q.guarded_eqs) {
      std::vector<std::string> eqs;
      for (const auto& [a, b] : g.eqs) eqs.push_back(expr(a) + " = " + expr(b));
      if (eqs.empty()) continue;
      where_.push_back("(" + guard_free(g.guard) + " OR (" +
                       join(eqs, " AND ") + "))");
    }
    for (const FOQuery::GuardedOr& g : q.guarded_ors) {
      std::vector<std::string> alts{guard_free(g.guard)};
      for (Symbol r : g.roles) {
        referenced_.insert("r_" + r.name());
        std::string a = fresh_alias();
        alts.push_back("EXISTS (SELECT 1 FROM " + ident("r_" + r.name()) +
                       " " + a + " WHERE " + a + ".s = " + expr(g.pre) +
                       " AND " + a + ".t = " + expr(g.guard) + ")");
      }
      where_.push_back("(" + join(alts, " OR ") + ")");
    }
  }

  std::string text() const {
    std::vector<std::string> select;
    for (Symbol v : q_.answer_vars)
      select.push_back(expr_.at(v) + " AS " + ident(v.name()));
    if (select.empty()) select.push_back("1 AS sat");

    std::string out = "SELECT DISTINCT " + join(select, ", ");
    if (!from_.empty()) {
      out += "\nFROM " + from_.front();
      for (size_t i = 1; i < from_.size(); ++i) {
        const auto& conds = on_[i];
        out += "\n  INNER JOIN " + from_[i] + " ON " +
               (conds.empty() ? std::string("1 = 1") : join(conds, " AND "));
      }
    }
    std::vector<std::string> where = on_.empty() ? std::vector<std::string>{}
                                                 : on_.front();
    where.insert(where.end(), where_.begin(), where_.end());
    if (!where.empty()) out += "\nWHERE " + join(where, "\n  AND ");
    out += ";\n";
    return out;
  }

  // Tables the query references; the schema must cover them even when the
  // structure does not declare the name.
  const std::set<std::string>& referenced() const { return referenced_; }

 private:
  std::string fresh_alias() { return "f" + std::to_string(filter_n_++); }

  void add_alias(const std::string& table, std::vector<std::string>& conds,
                 const Term& t) {
    std::string alias = "t" + std::to_string(from_.size());
    referenced_.insert(table);
    bind(t, alias + ".elem", conds);
    from_.push_back(ident(table) + " " + alias);
    on_.push_back(conds);
  }

  void add_unary(const std::string& table, const Term& t) {
    std::vector<std::string> conds;
    add_alias(table, conds, t);
  }

  void add_binary(const std::string& table, const Term& s, const Term& t) {
    std::string alias = "t" + std::to_string(from_.size());
    referenced_.insert(table);
    std::vector<std::string> conds;
    bind(s, alias + ".s", conds);
    bind(t, alias + ".t", conds);
    from_.push_back(ident(table) + " " + alias);
    on_.push_back(conds);
  }

  void bind(const Term& t, const std::string& col,
            std::vector<std::string>& conds) {
    if (!t.is_var) {
      conds.push_back(col + " = " + lit(t.sym.name()));
      return;
    }
    auto [it, fresh] = expr_.try_emplace(t.sym, col);
    if (!fresh) conds.push_back(col + " = " + it->second);
  }

  std::string expr(const Term& t) const {
    if (!t.is_var) return lit(t.sym.name());
    auto it = expr_.find(t.sym);
    if (it == expr_.end())
      throw std::logic_error("emit_relational: filter term outside the core: " +
                             t.sym.name());
    return it->second;
  }

  std::string guard_free(const Term& guard) {
    std::string a = fresh_alias();
    return "NOT EXISTS (SELECT 1 FROM " + ident("aux") + " " + a +
           " WHERE " + a + ".elem = " + expr(guard) + ")";
  }

  const FOQuery& q_;
  std::vector<std::string> from_;               // "table alias" per core atom
  std::vector<std::vector<std::string>> on_;    // join conditions per alias
  std::vector<std::string> where_;              // filter conjuncts
  std::map<Symbol, std::string> expr_;          // variable -> bound column
  std::set<std::string> referenced_;
  int filter_n_ = 0;
};

std::string unary_csv(const std::set<ElementId>& elems) {
  std::string out = "elem\n";
  for (const ElementId& e : elems) out += csv_field(render_element(e)) + "\n";
  return out;
}

std::string binary_csv(const std::set<ElementPair>& pairs) {
  std::string out = "s,t\n";
  for (const auto& [a, b] : pairs) {
    out += csv_field(render_element(a)) + "," + csv_field(render_element(b)) +
           "\n";
  }
  return out;
}

}  // namespace

RelationalEmission emit_relational(const FiniteStructure& s,
                                   const FOQuery& q) {
  QueryBuilder builder(q);

  std::map<std::string, int> arity;  // table -> column count
  arity["dom"] = 1;
  arity["aux"] = 1;
  arity["aux_rho"] = 1;
  arity["rho"] = 2;
  arity["rho_ell"] = 2;
  for (const auto& [name, ext] : s.concept_ext) {
    (void)ext;
    arity["c_" + name.name()] = 1;
  }
  for (const auto& [name, ext] : s.role_ext) {
    (void)ext;
    arity["r_" + name.name()] = 2;
  }
  for (const std::string& t : builder.referenced()) {
    arity.try_emplace(t, t[0] == 'c' || t == "dom" || t == "aux" ? 1 : 2);
  }

  RelationalEmission out;
  for (const auto& [table, cols] : arity) {
    out.schema += "CREATE TABLE " + ident(table) +
                  (cols == 1 ? " (elem TEXT NOT NULL);\n"
                             : " (s TEXT NOT NULL, t TEXT NOT NULL);\n");
  }
  out.query = builder.text();

  std::set<ElementPair> rho_closed;
  for (const ElementId& d : s.domain) {
    for (const ElementId& e : s.granule_of(d)) rho_closed.insert({d, e});
  }
  static const std::set<ElementId> kNoElems;
  static const std::set<ElementPair> kNoPairs;
  for (const auto& [table, cols] : arity) {
    std::string csv;
    if (table == "dom") {
      csv = unary_csv(s.domain);
    } else if (table == "aux") {
      csv = unary_csv(s.aux);
    } else if (table == "aux_rho") {
      csv = unary_csv(s.aux_rho);
    } else if (table == "rho") {
      csv = binary_csv(rho_closed);
    } else if (table == "rho_ell") {
      csv = binary_csv(s.rho_ell);
    } else if (cols == 1) {
      auto it = s.concept_ext.find(Symbol::concept_name(table.substr(2)));
      csv = unary_csv(it == s.concept_ext.end() ? kNoElems : it->second);
    } else {
      auto it = s.role_ext.find(Symbol::role_name(table.substr(2)));
      csv = binary_csv(it == s.role_ext.end() ? kNoPairs : it->second);
    }
    out.facts.emplace_back(table, std::move(csv));
  }
  return out;
}

}  // namespace roughel
