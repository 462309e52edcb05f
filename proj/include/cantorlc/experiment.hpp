#pragma once

// Batch experiments driven by a JSON document: a node family on one set,
// optionally swept over s, with one output row per array.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cantorlc/bounds.hpp"
#include "cantorlc/lebesgue.hpp"
#include "cantorlc/nodes.hpp"
#include "cantorlc/parallel.hpp"

namespace cantorlc {

using Json = nlohmann::json;

enum class NodeKind { Endpoints, Uniform, Deleted };
enum class Task { Constant, Witness, Julia };
enum class OutputFormat { Csv, Json };

struct NodeSpec {
  NodeKind kind = NodeKind::Endpoints;
  int s = 1;
  /// Explicit point count; when absent, 2^s minus `short_by`.
  std::optional<std::uint64_t> count;
  std::uint64_t short_by = 0;
  PlacementRule rule = PlacementRule::Left;
  std::optional<std::uint64_t> empty;
  std::optional<std::uint64_t> omit;

  std::uint64_t count_at(int s) const { return count.value_or((std::uint64_t{1} << s) - short_by); }
};

struct ExperimentConfig {
  SetDescriptor set = SetDescriptor::beta(Rational(1, 3));
  Task task = Task::Constant;
  NodeSpec nodes;
  SearchConfig search;
  int target_digits = 40;
  std::optional<std::pair<int, int>> sweep;
  std::optional<WitnessRule> witness;
  std::optional<std::string> bound;
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> path;

  std::vector<int> levels() const {
    std::vector<int> out;
    if (!sweep) return {nodes.s};
    for (int s = sweep->first; s <= sweep->second; ++s) out.push_back(s);
    return out;
  }
};

struct ExperimentRow {
  int s = 0;
  std::uint64_t n = 0;
  std::string lambda_max;
  double lambda_max_log10 = 0.0;
  std::string argmax;
  std::string argmax_ref;
  std::string bound_name;
  std::string bound_value;
  std::string bound_side;
  std::optional<bool> satisfied;
  std::optional<bool> stabilized;
  int depth = 0;
  int precision_bits = 0;
  double elapsed_ms = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;
  std::optional<JuliaReport> julia;
};

namespace detail {

inline Rational number_of(const Json& j, const std::string& key) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(mpz_class(j.dump()));
  if (j.is_number_float()) return parse_rational(j.dump());
  throw DomainError("'" + key + "' must be a number or a numeric string");
}

inline long integer_of(const Json& j, const std::string& key) {
  const Rational q = number_of(j, key);
  if (q.get_den() != 1 || !q.get_num().fits_slong_p()) throw DomainError("'" + key + "' must be an integer");
  return q.get_num().get_si();
}

inline void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw DomainError("'" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw DomainError("unknown key '" + k + "' in " + where);
}

inline NodeKind parse_node_kind(const std::string& s) {
  if (s == "endpoints") return NodeKind::Endpoints;
  if (s == "uniform") return NodeKind::Uniform;
  if (s == "deleted") return NodeKind::Deleted;
  throw DomainError("unknown node kind '" + s + "' (endpoints, uniform, deleted)");
}

inline Task parse_task(const std::string& s) {
  if (s == "constant") return Task::Constant;
  if (s == "witness") return Task::Witness;
  if (s == "julia") return Task::Julia;
  throw DomainError("unknown task '" + s + "' (constant, witness, julia)");
}

inline const std::set<std::string>& bound_names() {
  static const std::set<std::string> names{"lemma_Y", "theorem_beta", "bdd2", "notbdd"};
  return names;
}

inline WitnessRule default_witness(NodeKind k) {
  switch (k) {
    case NodeKind::Endpoints:
      return WitnessRule::Endpoint;
    case NodeKind::Deleted:
      return WitnessRule::DeletedNode;
    case NodeKind::Uniform:
      return WitnessRule::EmptyInterval;
  }
  return WitnessRule::Endpoint;
}

inline void validate_nodes(const NodeSpec& n, int s) {
  if (s < 0 || s > 30) throw DomainError("node level s must lie in [0, 30]");
  const std::uint64_t slots = std::uint64_t{1} << s;
  if (n.kind == NodeKind::Uniform) {
    const std::uint64_t count = n.count_at(s);
    if (count < 1 || count > slots) throw DomainError("uniform count must lie in [1, 2^s]");
    if (n.empty && count + 1 != slots) throw DomainError("'empty' needs count = 2^s - 1");
    if (n.empty && (*n.empty < 1 || *n.empty > slots)) throw DomainError("'empty' must lie in [1, 2^s]");
  }
  if (n.kind == NodeKind::Deleted) {
    if (!n.omit) throw DomainError("deleted nodes need 'omit'");
    if (*n.omit < 1 || *n.omit > 2 * slots) throw DomainError("'omit' must lie in [1, 2^(s+1)]");
  }
}

}  // namespace detail

/// Parses and validates a config. `default_digits` applies when the document
/// has no precision section.
inline ExperimentConfig parse_config(const Json& j, int default_digits = 40) {
  detail::reject_unknown(j, {"set", "task", "nodes", "search", "precision", "sweep", "witness", "bound", "output"},
                         "config");
  ExperimentConfig c;
  c.target_digits = default_digits;
  if (!j.contains("set") || !j["set"].is_string()) throw DomainError("config needs a 'set' descriptor string");
  c.set = SetDescriptor::parse(j["set"].get<std::string>());
  if (j.contains("task")) c.task = detail::parse_task(j["task"].get<std::string>());

  if (j.contains("nodes")) {
    const auto& n = j["nodes"];
    detail::reject_unknown(n, {"kind", "s", "count", "rule", "empty", "omit"}, "nodes");
    if (n.contains("kind")) c.nodes.kind = detail::parse_node_kind(n["kind"].get<std::string>());
    if (n.contains("s")) c.nodes.s = static_cast<int>(detail::integer_of(n["s"], "s"));
    if (n.contains("count")) {
      if (n["count"] == "2^s")
        c.nodes.short_by = 0;
      else if (n["count"] == "2^s-1")
        c.nodes.short_by = 1;
      else
        c.nodes.count = detail::integer_of(n["count"], "count");
    }
    if (n.contains("rule")) c.nodes.rule = parse_placement(n["rule"].get<std::string>());
    if (n.contains("empty")) c.nodes.empty = detail::integer_of(n["empty"], "empty");
    if (n.contains("omit")) c.nodes.omit = detail::integer_of(n["omit"], "omit");
  }
  if (j.contains("search")) {
    const auto& s = j["search"];
    detail::reject_unknown(s, {"depth", "samples_per_interval", "keep_margin", "rel_tol", "threads"}, "search");
    if (s.contains("depth")) c.search.depth = static_cast<int>(detail::integer_of(s["depth"], "depth"));
    if (s.contains("samples_per_interval"))
      c.search.samples_per_interval =
          static_cast<int>(detail::integer_of(s["samples_per_interval"], "samples_per_interval"));
    if (s.contains("keep_margin")) c.search.keep_margin = detail::number_of(s["keep_margin"], "keep_margin").get_d();
    if (s.contains("rel_tol")) c.search.rel_tol = detail::number_of(s["rel_tol"], "rel_tol").get_d();
    if (s.contains("threads")) c.search.threads = static_cast<unsigned>(detail::integer_of(s["threads"], "threads"));
  }
  c.search.validate();
  if (j.contains("precision")) {
    const auto& p = j["precision"];
    detail::reject_unknown(p, {"target_digits"}, "precision");
    if (p.contains("target_digits"))
      c.target_digits = static_cast<int>(detail::integer_of(p["target_digits"], "target_digits"));
  }
  if (c.target_digits < 5 || c.target_digits > 2000) throw DomainError("target_digits must lie in [5, 2000]");
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    detail::reject_unknown(s, {"from", "to"}, "sweep");
    if (!s.contains("from") || !s.contains("to")) throw DomainError("sweep needs 'from' and 'to'");
    c.sweep = {static_cast<int>(detail::integer_of(s["from"], "from")),
               static_cast<int>(detail::integer_of(s["to"], "to"))};
    if (c.sweep->first > c.sweep->second) throw DomainError("sweep 'from' exceeds 'to'");
  }
  if (j.contains("witness")) c.witness = parse_witness(j["witness"].get<std::string>());
  if (j.contains("bound") && !j["bound"].is_null()) {
    c.bound = j["bound"].get<std::string>();
    if (!detail::bound_names().count(*c.bound)) throw DomainError("unknown bound '" + *c.bound + "'");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    detail::reject_unknown(o, {"format", "path"}, "output");
    if (o.contains("format")) {
      const auto f = o["format"].get<std::string>();
      if (f == "csv")
        c.format = OutputFormat::Csv;
      else if (f == "json")
        c.format = OutputFormat::Json;
      else
        throw DomainError("unknown output format '" + f + "' (csv, json)");
    }
    if (o.contains("path")) c.path = o["path"].get<std::string>();
  }

  if (c.task == Task::Julia) {
    if (c.set.kind() != SetKind::Julia) throw DomainError("the julia task needs a julia: set");
  } else {
    for (int s : c.levels()) detail::validate_nodes(c.nodes, s);
  }
  if (c.bound) {
    const bool julia_bound = *c.bound == "bdd2" || *c.bound == "notbdd";
    if (julia_bound != (c.set.kind() == SetKind::Julia))
      throw DomainError("bound '" + *c.bound + "' does not apply to set " + c.set.canonical());
    if (*c.bound == "theorem_beta" && c.set.kind() != SetKind::GeometricBeta)
      throw DomainError("theorem_beta needs a beta: set");
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text, int default_digits = 40) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_config(j, default_digits);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("invalid config: ") + e.what());
  }
}

inline NodeArray build_nodes(const SetDescriptor& d, const NodeSpec& spec, int s, int digits) {
  detail::validate_nodes(spec, s);
  switch (spec.kind) {
    case NodeKind::Endpoints:
      return endpoints_Y(d, s, digits);
    case NodeKind::Uniform:
      return uniform_nodes(d, s, spec.count_at(s), spec.rule, spec.empty, digits);
    case NodeKind::Deleted:
      return delete_node(endpoints_Y(d, s, digits), *spec.omit);
  }
  throw DomainError("unknown node kind");
}

namespace detail {

inline std::optional<BoundResult> row_bound(const ExperimentConfig& c, const NodeArray& z, const PrecisionContext& ctx) {
  if (!c.bound) return std::nullopt;
  const int s = ceil_log2(z.size());
  if (*c.bound == "lemma_Y") return lemma_Y_bound(c.set, s, ctx);
  if (*c.bound == "theorem_beta") return theorem_beta_bound(c.set.beta_value(), s, ctx);
  if (*c.bound == "bdd2") return bdd2_bound(c.set.gamma(), ctx);
  return notbdd_bound(c.set.gamma(), static_cast<long>(z.size()), ctx);
}

inline ExperimentRow run_one(const ExperimentConfig& c, int s) {
  const auto t0 = std::chrono::steady_clock::now();
  const NodeArray z = build_nodes(c.set, c.nodes, s, c.target_digits);
  ExperimentRow row;
  row.s = s;
  row.n = z.size();
  BigReal value;
  if (c.task == Task::Constant) {
    const SetGeometry g = search_geometry(c.set, z, c.search.depth, c.target_digits);
    const auto r = lebesgue_constant(g, z, c.search);
    value = r.lambda_max;
    row.argmax = r.argmax.to_string(c.target_digits);
    row.argmax_ref = r.argmax_ref ? r.argmax_ref->str() : "";
    row.stabilized = r.stabilized;
    row.depth = r.search_depth;
    row.precision_bits = r.precision_bits;
    if (auto b = row_bound(c, z, g.context())) {
      row.bound_name = b->name;
      row.bound_value = b->value.to_string(c.target_digits);
      row.bound_side = to_string(b->side);
      // Left blank when an upper bound meets a search that did not settle.
      if (b->side != BoundSide::UpperBoundForLambda || r.stabilized) row.satisfied = b->satisfied_by(r.lambda_max);
    }
  } else {
    const SetGeometry g = search_geometry(c.set, z, 1, c.target_digits);
    const auto w = witness_lambda(g, z, c.witness.value_or(default_witness(c.nodes.kind)));
    value = w.lambda;
    row.argmax = w.x.to_string(c.target_digits);
    row.argmax_ref = w.ref ? w.ref->str() : "";
    row.precision_bits = g.context().bits;
    if (auto b = row_bound(c, z, g.context())) {
      row.bound_name = b->name;
      row.bound_value = b->value.to_string(c.target_digits);
      row.bound_side = to_string(b->side);
      row.satisfied = b->satisfied_by(w.lambda);
    }
  }
  row.lambda_max = value.to_string(c.target_digits);
  row.lambda_max_log10 = log10(abs(value)).to_double();
  row.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace detail

/// Runs the configured computation. Sweep levels run concurrently; rows come
/// back in s order.
inline ExperimentResult run(const ExperimentConfig& c) {
  ExperimentResult out{c, {}, std::nullopt};
  if (c.task == Task::Julia) {
    const int s_max = c.sweep ? c.sweep->second : c.nodes.s;
    const auto ctx = make_context(c.set, s_max, std::uint64_t{2} << s_max, c.target_digits);
    out.julia = verify_julia_invariants(build_levels(c.set.gamma(), s_max, ctx));
    return out;
  }
  const auto levels = c.levels();
  out.rows.resize(levels.size());
  const unsigned outer = levels.size() > 1 ? c.search.threads : 1;
  parallel_for(levels.size(), outer, kFloorBits, [&](std::size_t i) { out.rows[i] = detail::run_one(c, levels[i]); });
  return out;
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"s",           "N",           "lambda_max", "lambda_max_log10",
                                             "argmax",      "bound_name",  "bound_value", "bound_side",
                                             "satisfied",   "stabilized",  "depth",       "precision_bits",
                                             "elapsed_ms"};
  return cols;
}

namespace detail {

inline std::string opt_bool(const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : ""; }

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace detail

inline void write_csv(std::ostream& os, const ExperimentResult& r) {
  if (r.julia) {
    os << "level,check,pass,worst_margin,checked\n";
    for (const auto& e : r.julia->entries)
      os << e.level << "," << e.name << "," << (e.pass ? "true" : "false") << ","
         << detail::fixed(e.worst_margin, 6) << "," << e.checked << "\n";
    return;
  }
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : r.rows) {
    os << row.s << "," << row.n << "," << row.lambda_max << "," << detail::fixed(row.lambda_max_log10, 10) << ","
       << row.argmax << "," << row.bound_name << "," << row.bound_value << "," << row.bound_side << ","
       << detail::opt_bool(row.satisfied) << "," << detail::opt_bool(row.stabilized) << "," << row.depth << ","
       << row.precision_bits << "," << detail::fixed(row.elapsed_ms, 6) << "\n";
  }
}

inline Json to_json(const ExperimentRow& row) {
  Json j{{"s", row.s},
         {"N", row.n},
         {"lambda_max", row.lambda_max},
         {"lambda_max_log10", row.lambda_max_log10},
         {"argmax", row.argmax},
         {"argmax_ref", row.argmax_ref},
         {"depth", row.depth},
         {"precision_bits", row.precision_bits},
         {"elapsed_ms", row.elapsed_ms}};
  j["stabilized"] = row.stabilized ? Json(*row.stabilized) : Json(nullptr);
  if (!row.bound_name.empty())
    j["bound"] = {{"name", row.bound_name},
                  {"value", row.bound_value},
                  {"side", row.bound_side},
                  {"satisfied", row.satisfied ? Json(*row.satisfied) : Json(nullptr)}};
  return j;
}

inline ExperimentRow row_from_json(const Json& j) {
  ExperimentRow row;
  row.s = j.at("s").get<int>();
  row.n = j.at("N").get<std::uint64_t>();
  row.lambda_max = j.at("lambda_max").get<std::string>();
  row.lambda_max_log10 = j.at("lambda_max_log10").get<double>();
  row.argmax = j.at("argmax").get<std::string>();
  row.argmax_ref = j.value("argmax_ref", "");
  row.depth = j.at("depth").get<int>();
  row.precision_bits = j.at("precision_bits").get<int>();
  row.elapsed_ms = j.at("elapsed_ms").get<double>();
  if (!j.at("stabilized").is_null()) row.stabilized = j["stabilized"].get<bool>();
  if (j.contains("bound")) {
    const auto& b = j["bound"];
    row.bound_name = b.at("name").get<std::string>();
    row.bound_value = b.at("value").get<std::string>();
    row.bound_side = b.at("side").get<std::string>();
    if (!b.at("satisfied").is_null()) row.satisfied = b["satisfied"].get<bool>();
  }
  return row;
}

inline Json to_json(const ExperimentResult& r) {
  Json j{{"set", r.config.set.canonical()}, {"target_digits", r.config.target_digits}};
  if (r.julia) {
    Json checks = Json::array();
    for (const auto& e : r.julia->entries)
      checks.push_back({{"level", e.level},
                        {"check", e.name},
                        {"pass", e.pass},
                        {"worst_margin", e.worst_margin},
                        {"checked", e.checked}});
    j["julia"] = {{"all_pass", r.julia->all_pass()}, {"checks", checks}};
    return j;
  }
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  j["rows"] = rows;
  return j;
}

inline void write_result(std::ostream& os, const ExperimentResult& r) {
  if (r.config.format == OutputFormat::Json)
    os << to_json(r).dump(2) << "\n";
  else
    write_csv(os, r);
}

}  // namespace cantorlc
