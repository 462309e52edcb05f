// Command-line front end for the cantorlc library.
//
// Exit codes: 0 success, 1 a verification failed, 2 bad arguments or
// configuration, 3 precision or level budget exceeded.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cantorlc/cantorlc.hpp"
#include "cantorlc/experiment.hpp"
#include "cantorlc/suites.hpp"

namespace {

using namespace cantorlc;

int env_digits() {
  if (const char* v = std::getenv("LC_DIGITS")) {
    char* end = nullptr;
    const long d = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || d < 5 || d > 2000) throw DomainError("LC_DIGITS must be an integer in [5, 2000]");
    return static_cast<int>(d);
  }
  return 40;
}

struct NodeOptions {
  std::string kind = "endpoints";
  int s = 1;
  std::optional<std::uint64_t> count;
  std::string rule = "left";
  std::optional<std::uint64_t> empty;
  std::optional<std::uint64_t> omit;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "endpoints, uniform or deleted")->capture_default_str();
    app->add_option("--s", s, "construction level of the array")->capture_default_str();
    app->add_option("--count", count, "uniform arrays: number of points (default 2^s)");
    app->add_option("--rule", rule, "uniform arrays: left, right or alternating")->capture_default_str();
    app->add_option("--empty", empty, "uniform arrays with 2^s - 1 points: the empty interval");
    app->add_option("--omit", omit, "deleted arrays: 1-based index removed from Y_s");
  }

  NodeSpec spec() const {
    NodeSpec n;
    n.kind = detail::parse_node_kind(kind);
    n.s = s;
    n.count = count;
    n.rule = parse_placement(rule);
    n.empty = empty;
    n.omit = omit;
    return n;
  }
};

NodeArray load_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open node file '" + path + "'");
  return read_nodes(in);
}

void cmd_lengths(const std::string& set, int s_max, int digits) {
  const auto d = SetDescriptor::parse(set);
  if (s_max < 0) throw DomainError("--s-max must be nonnegative");
  if (d.is_geometric()) {
    const auto ctx = make_context(d, s_max + 1, 1, digits);
    const auto scope = ctx.scope();
    std::cout << "s,ell_s,h_s\n";
    for (int s = 0; s <= s_max; ++s) {
      const BigReal l = length<BigReal>(d, s);
      const BigReal h = gap<BigReal>(d, s);
      std::cout << s << "," << l.to_string(digits) << "," << h.to_string(digits) << "\n";
    }
    return;
  }
  const SetGeometry g(d, make_context(d, s_max, std::uint64_t{2} << s_max, digits), s_max);
  const auto scope = g.context().scope();
  std::cout << "s,min_length,max_length,delta_s\n";
  for (int s = 0; s <= s_max; ++s) {
    const auto& lv = g.julia()->level(s);
    BigReal lo = lv.length(0), hi = lv.length(0);
    for (std::size_t j = 1; j < lv.intervals.size(); ++j) {
      lo = min(lo, lv.length(j));
      hi = max(hi, lv.length(j));
    }
    std::cout << s << "," << lo.to_string(digits) << "," << hi.to_string(digits) << ","
              << lv.delta.to_string(digits) << "\n";
  }
}

int cmd_verify(const std::string& suite, int digits) {
  std::vector<std::string> ids = suite_ids();
  if (suite != "all") {
    if (std::find(ids.begin(), ids.end(), suite) == ids.end()) throw DomainError("unknown suite '" + suite + "'");
    ids = {suite};
  }
  bool all = true;
  for (const auto& id : ids) {
    const auto r = run_suite(id, {digits, 0});
    for (const auto& l : r.lines)
      std::cout << "  " << (l.pass ? "ok  " : "FAIL") << " " << l.check << (l.detail.empty() ? "" : ": ")
                << l.detail << "\n";
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << " (" << std::fixed << std::setprecision(2) << r.seconds
              << " s)\n"
              << std::defaultfloat;
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lebesgue constants of interpolation arrays on Cantor-type sets"};
  app.require_subcommand(1);
  int digits = 40;

  std::string set, gamma, nodes_file, x_text, config_path, suite, bound_name, out_path;
  int s_max = 6;
  bool verify = false;
  NodeOptions node_opts;
  SearchConfig search;
  std::optional<int> digits_opt;
  int s_arg = 3;
  std::string beta_text = "1/3", alpha_text = "2", ell1_text = "1/3";
  long n_arg = 8;
  int n_max = 20;

  auto* lengths = app.add_subcommand("lengths", "basic interval lengths and gaps by level");
  lengths->add_option("set", set, "set descriptor, e.g. beta:1/3, alpha:2,ell1:1/3, julia:geom:1/32,1/2")->required();
  lengths->add_option("--s-max", s_max, "deepest level")->capture_default_str();

  auto* nodes = app.add_subcommand("nodes", "write a node array");
  nodes->add_option("set", set, "set descriptor")->required();
  node_opts.attach(nodes);
  nodes->add_option("-o,--output", out_path, "output file (default stdout)");

  auto* lambda = app.add_subcommand("lambda", "Lebesgue function at one point");
  lambda->add_option("set", set, "set descriptor")->required();
  lambda->add_option("--nodes-file", nodes_file, "node file written by 'nodes'")->required();
  lambda->add_option("--x", x_text, "evaluation point, decimal or p/q")->required();

  auto* constant = app.add_subcommand("constant", "Lebesgue constant by branch and bound");
  constant->add_option("set", set, "set descriptor")->required();
  node_opts.attach(constant);
  constant->add_option("--nodes-file", nodes_file, "read the array from a node file instead");
  constant->add_option("--depth", search.depth, "levels searched below the node level")->capture_default_str();
  constant->add_option("--samples", search.samples_per_interval, "samples per interval")->capture_default_str();
  constant->add_option("--keep-margin", search.keep_margin, "pruning margin in (0, 1)")->capture_default_str();
  constant->add_option("--rel-tol", search.rel_tol, "stabilization tolerance")->capture_default_str();
  constant->add_option("--threads", search.threads, "worker threads, 0 for all cores")->capture_default_str();
  constant->add_option("--digits", digits_opt, "target decimal digits (overrides LC_DIGITS)");

  auto* sweep = app.add_subcommand("sweep", "run an experiment described by a JSON file");
  sweep->add_option("config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--output", out_path, "output file (overrides the config)");

  auto* julia = app.add_subcommand("julia", "build K(gamma) and optionally verify its invariants");
  julia->add_option("gamma", gamma, "gamma rule, e.g. geom:1/32,1/2 or table:1/32;1/64")->required();
  julia->add_option("--s-max", s_max, "deepest level")->capture_default_str();
  julia->add_flag("--verify", verify, "run the invariant checks");

  auto* bounds = app.add_subcommand("bounds", "evaluate one closed-form bound");
  bounds->add_option("name", bound_name, "lemma_Y, theorem_beta, mergelyan, lemma_sum, lemma_llh, bdd2, notbdd")
      ->required();
  bounds->add_option("--set", set, "set descriptor (lemma_Y, mergelyan)");
  bounds->add_option("--s", s_arg, "level")->capture_default_str();
  bounds->add_option("--beta", beta_text, "beta (theorem_beta)")->capture_default_str();
  bounds->add_option("--alpha", alpha_text, "alpha (lemma_sum, lemma_llh)")->capture_default_str();
  bounds->add_option("--ell1", ell1_text, "l_1 (lemma_sum, lemma_llh)")->capture_default_str();
  bounds->add_option("--gamma", gamma, "gamma rule (bdd2, notbdd)");
  bounds->add_option("--n", n_arg, "number of nodes (notbdd)")->capture_default_str();
  bounds->add_option("--n-max", n_max, "last index (lemma_sum, lemma_llh)")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "run a named verification suite, or 'all'");
  verify_cmd->add_option("suite", suite, "suite id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    digits = digits_opt.value_or(env_digits());
    if (*lengths) {
      cmd_lengths(set, s_max, digits);
    } else if (*nodes) {
      const auto z = build_nodes(SetDescriptor::parse(set), node_opts.spec(), node_opts.s, digits);
      if (out_path.empty()) {
        write_nodes(std::cout, z);
      } else {
        std::ofstream out(out_path);
        if (!out) throw DomainError("cannot write '" + out_path + "'");
        write_nodes(out, z);
      }
    } else if (*lambda) {
      const auto d = SetDescriptor::parse(set);
      const auto z = load_nodes(nodes_file);
      if (!(z.descriptor() == d)) throw DomainError("node file was written for " + z.descriptor().canonical());
      const PrecisionScope scope(z.empty() ? kFloorBits : z[0].bits());
      const BigReal x(x_text);
      std::cout << lebesgue_function(z, x).to_string(digits) << "\n";
    } else if (*constant) {
      search.validate();
      const auto d = SetDescriptor::parse(set);
      const NodeArray z = nodes_file.empty() ? build_nodes(d, node_opts.spec(), node_opts.s, digits) : load_nodes(nodes_file);
      const auto r = lebesgue_constant(d, z, search, digits);
      std::cout << "N=" << r.node_count << "\n"
                << "lambda_max=" << r.lambda_max.to_string(digits) << "\n"
                << "argmax=" << r.argmax.to_string(digits) << (r.argmax_ref ? " " + r.argmax_ref->str() : "") << "\n"
                << "stabilized=" << (r.stabilized ? "true" : "false") << "\n"
                << "depth=" << r.search_depth << "\n"
                << "evaluations=" << r.evaluations << "\n"
                << "precision_bits=" << r.precision_bits << "\n";
    } else if (*sweep) {
      std::ifstream in(config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      auto cfg = parse_config_text(buf.str(), digits);
      if (!out_path.empty()) cfg.path = out_path;
      const auto result = run(cfg);
      if (cfg.path) {
        std::ofstream out(*cfg.path);
        if (!out) throw DomainError("cannot write '" + *cfg.path + "'");
        write_result(out, result);
      } else {
        write_result(std::cout, result);
      }
      if (result.julia && !result.julia->all_pass()) return 1;
    } else if (*julia) {
      const auto g = GammaSequence::parse(gamma);
      const auto d = SetDescriptor::julia(g);
      if (s_max < 0) throw DomainError("--s-max must be nonnegative");
      const auto ctx = make_context(d, s_max, std::uint64_t{2} << s_max, digits);
      const auto c = build_levels(g, s_max, ctx);
      const auto scope = ctx.scope();
      std::cout << "C0=" << c0_constant(g, ctx).to_string(digits) << "\n";
      for (int s = 0; s <= s_max; ++s)
        std::cout << "s=" << s << " r_s=" << c.level(s).r.to_string(digits)
                  << " delta_s=" << c.level(s).delta.to_string(digits) << "\n";
      if (verify) {
        const auto rep = verify_julia_invariants(c);
        for (const auto& e : rep.entries)
          std::cout << (e.pass ? "ok   " : "FAIL ") << e.name << " s=" << e.level << " margin=" << e.worst_margin
                    << " checked=" << e.checked << "\n";
        std::cout << (rep.all_pass() ? "PASS" : "FAIL") << "\n";
        return rep.all_pass() ? 0 : 1;
      }
    } else if (*bounds) {
      const auto print = [&](const BoundResult& b) {
        std::cout << b.name << "=" << b.value.to_string(digits) << " side=" << to_string(b.side) << "\n";
        for (const auto& r : b.rows)
          std::cout << "  " << r.label << " n=" << r.index << " lhs=" << r.lhs.to_string(12)
                    << " rhs=" << r.rhs.to_string(12) << " margin=" << r.margin << (r.holds ? "" : " VIOLATED")
                    << (r.equality ? " equality" : "") << "\n";
        if (!b.note.empty()) std::cout << "note: " << b.note << "\n";
        return b.side == BoundSide::InequalityCheck && !b.pass ? 1 : 0;
      };
      const auto need = [&](const std::string& v, const char* what) {
        if (v.empty()) throw DomainError(bound_name + " needs --" + what);
      };
      if (bound_name == "lemma_Y") {
        need(set, "set");
        const auto d = SetDescriptor::parse(set);
        return print(lemma_Y_bound(d, s_arg, make_context(d, s_arg, 1, digits)));
      }
      if (bound_name == "theorem_beta") {
        const auto d = SetDescriptor::beta(parse_rational(beta_text));
        return print(theorem_beta_bound(d.beta_value(), s_arg, make_context(d, s_arg, 1, digits)));
      }
      if (bound_name == "mergelyan") {
        need(set, "set");
        const auto d = SetDescriptor::parse(set);
        const auto ctx = make_context(d, s_arg + 2, 1, digits);
        const auto m = mergelyan_Ms(d, s_arg, ctx);
        const auto scope = ctx.scope();
        std::cout << "log_Ms=" << m.log_Ms.to_string(digits) << "\nleading_term=" << m.leading_term.to_string(digits)
                  << "\nratio=" << (m.log_Ms / m.leading_term).to_string(12) << "\n";
        return 0;
      }
      if (bound_name == "lemma_sum" || bound_name == "lemma_llh") {
        const Rational a = parse_rational(alpha_text), l1 = parse_rational(ell1_text);
        const auto d = SetDescriptor::alpha(a, l1);
        const auto ctx = make_context(d, 1, 1, digits);
        return print(bound_name == "lemma_sum" ? lemma_sum_check(a, l1, n_max, ctx)
                                               : lemma_llh_check(a, l1, n_max, ctx));
      }
      if (bound_name == "bdd2" || bound_name == "notbdd") {
        need(gamma, "gamma");
        const auto g = GammaSequence::parse(gamma);
        const auto ctx = make_context(SetDescriptor::julia(g), 1, 1, digits);
        return print(bound_name == "bdd2" ? bdd2_bound(g, ctx) : notbdd_bound(g, n_arg, ctx));
      }
      throw DomainError("unknown bound '" + bound_name + "'");
    } else if (*verify_cmd) {
      return cmd_verify(suite, digits);
    }
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
