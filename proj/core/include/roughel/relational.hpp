// Relational export of a structure and a rewritten query: SQL-92 schema and
// SELECT text plus CSV fact files, so any SQL engine can reproduce evaluate().
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "roughel/rewriter.hpp"
#include "roughel/structure.hpp"

namespace roughel {

struct RelationalEmission {
  std::string schema;  // CREATE TABLE statements, one per table
  std::string query;   // one SELECT over the schema
  // (table name, CSV text) per table, in schema order. Each CSV starts with a
  // header row naming the columns.
  std::vector<std::pair<std::string, std::string>> facts;
};

// Tables: dom(elem), aux(elem), aux_rho(elem), rho(s,t) as the closed
// indiscernibility relation, rho_ell(s,t), one c_<name>(elem) per concept
// name and one r_<name>(s,t) per role name. Names referenced only by the
// query get empty tables, mirroring how answer() treats fresh names. The
// query joins the core atoms and renders filters as NOT EXISTS anti-joins
// against aux plus guard-implication OR blocks.
RelationalEmission emit_relational(const FiniteStructure& s, const FOQuery& q);

}  // namespace roughel
