#pragma once

// Named verification suites. Each suite runs a batch of checks against the
// library and reports one line per check plus an overall verdict.

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cantorlc/bounds.hpp"
#include "cantorlc/lebesgue.hpp"
#include "cantorlc/nodes.hpp"

namespace cantorlc {

struct SuiteLine {
  std::string check;
  bool pass = true;
  std::string detail;
};

struct SuiteReport {
  std::string id;
  bool pass = true;
  std::vector<SuiteLine> lines;
  double seconds = 0.0;

  void add(std::string check, bool ok, std::string detail = {}) {
    pass = pass && ok;
    lines.push_back({std::move(check), ok, std::move(detail)});
  }
};

struct SuiteOptions {
  int digits = 40;
  unsigned threads = 0;
};

namespace detail {

inline std::string fmt(const BigReal& v, int digits = 10) { return v.to_string(digits); }

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline double log10_of(const BigReal& v) { return log10(abs(v)).to_double(); }

// ---------------------------------------------------------------- core

inline void suite_core(SuiteReport& rep, const SuiteOptions& opt) {
  const auto d = SetDescriptor::beta(Rational(1, 3));
  std::mt19937_64 rng(20240611);
  for (int s = 1; s <= 4; ++s) {
    const std::uint64_t n = std::uint64_t{2} << s;
    const int deep = s + 1 + 10;
    const SetGeometry g(d, make_context(d, deep, n, opt.digits), deep);
    const auto scope = g.context().scope();
    const NodeArray z = endpoints_Y(g, s);
    const std::string tag = "N=" + std::to_string(n);
    const BigReal tol(std::ldexp(1.0, -(g.context().bits - 16)));

    std::uniform_int_distribution<std::uint64_t> pick(1, std::uint64_t{1} << deep);
    BigReal worst(0);
    for (int t = 0; t < 200; ++t) {
      const EndpointRef e{{deep, pick(rng)}, (rng() & 1U) ? Side::Right : Side::Left};
      const BigReal x = g.point(e);
      BigReal sum(0);
      for (std::size_t k = 1; k <= z.size(); ++k) sum += to_real(fundamental(z, k, x), g.context());
      worst = max(worst, abs(sum - 1));
    }
    rep.add("partition-of-unity " + tag, worst < tol, "max |sum l_k - 1| = " + fmt(worst, 4));

    bool kronecker = true;
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t k = 1; k <= z.size(); ++k) {
        const auto m = fundamental(z, k, z[i]);
        kronecker = kronecker && (i + 1 == k ? (m.sign == 1 && m.log_abs.is_zero()) : m.is_zero());
      }
    rep.add("kronecker " + tag, kronecker);

    if (n > 8) continue;
    const LebesgueEvaluator ev(z);
    BigReal worst_mono(0);
    for (int t = 0; t < 20; ++t) {
      const IntervalAddress a{deep, pick(rng)};
      const Rational xq = interval<Rational>(d, a).left;
      const BigReal x(xq);
      for (std::size_t deg = 0; deg < n; ++deg) {
        std::vector<BigReal> f;
        for (const auto& p : z.points()) f.push_back(pow(p, static_cast<long>(deg)));
        const BigReal exact(rational_pow(xq, deg));
        worst_mono = max(worst_mono, abs(ev.interpolate(f, x) - exact));
      }
    }
    rep.add("monomials " + tag, worst_mono < tol, "max error = " + fmt(worst_mono, 4));
  }
}

// ---------------------------------------------------------------- lemma-rr

// Places `c` points inside level-s interval j: the first c level-(s+t)
// endpoints of that interval, with t the least level that has room.
inline void place(std::vector<EndpointRef>& out, int s, std::uint64_t j, int c) {
  int t = 0;
  while ((std::int64_t{2} << t) < c) ++t;
  const std::uint64_t first = ((j - 1) << t) + 1;
  for (int i = 0; i < c; ++i) {
    const std::uint64_t idx = first + static_cast<std::uint64_t>(i / 2);
    out.push_back({{s + t, idx}, i % 2 == 0 ? Side::Left : Side::Right});
  }
}

inline void suite_rr(SuiteReport& rep, const SuiteOptions&) {
  for (int s = 2; s <= 4; ++s) {
    const int slots = 1 << s;
    const int total = slots - 1;
    // s = 4 caps each occupancy at 2. Patterns with 3 or more points in one
    // level-4 interval cannot be uniform.
    const int cap = s == 4 ? 2 : total;
    std::vector<int> counts(static_cast<std::size_t>(slots), 0);
    std::uint64_t patterns = 0, uniform = 0, failures = 0;
    EndpointPattern z;
    std::function<void(int, int)> rec = [&](int slot, int left) {
      if (slot == slots - 1) {
        if (left > cap) return;
        counts[static_cast<std::size_t>(slot)] = left;
        z.refs.clear();
        for (int j = 0; j < slots; ++j)
          place(z.refs, s, static_cast<std::uint64_t>(j + 1), counts[static_cast<std::size_t>(j)]);
        ++patterns;
        const bool u = is_uniform(z, s);
        const auto r = max_pair_level(z, {0, 1}, s + 8);
        if (u) ++uniform;
        const bool ok = r && (u ? *r == s - 1 : *r >= s);
        if (!ok) ++failures;
        return;
      }
      for (int c = 0; c <= std::min(cap, left); ++c) {
        counts[static_cast<std::size_t>(slot)] = c;
        rec(slot + 1, left - c);
      }
    };
    rec(0, total);
    rep.add("R_{1,0} s=" + std::to_string(s), failures == 0 && uniform == static_cast<std::uint64_t>(slots),
            std::to_string(patterns) + " patterns, " + std::to_string(uniform) + " uniform, " +
                std::to_string(failures) + " failures" + (s == 4 ? " (occupancy <= 2)" : ""));
  }
}

// ---------------------------------------------------------------- lemma-llq

// ell_q <= x_j + x_{2^(s-q)+1-j} + ell_s for all q, j, in exact rationals.
inline bool llq_holds(const SetDescriptor& d, int s, const std::vector<Rational>& x) {
  const Rational ls = length<Rational>(d, s);
  for (int q = 0; q <= s; ++q) {
    const Rational lq = length<Rational>(d, q);
    const std::size_t m = std::size_t{1} << (s - q);
    for (std::size_t j = 1; j <= m; ++j)
      if (lq > x[j - 1] + x[m - j] + ls) return false;
  }
  return true;
}

inline std::vector<Rational> exact_points(const SetDescriptor& d, const std::vector<EndpointRef>& refs) {
  std::vector<Rational> x;
  for (const auto& r : refs) {
    const auto iv = interval<Rational>(d, r.addr);
    x.push_back(r.side == Side::Left ? iv.left : iv.right);
  }
  return x;
}

inline void suite_llq(SuiteReport& rep, const SuiteOptions&) {
  const auto d = SetDescriptor::alpha(Rational(2), Rational(1, 3));
  std::mt19937_64 rng(7);
  for (int s = 1; s <= 6; ++s) {
    const std::uint64_t n = std::uint64_t{1} << s;
    std::uint64_t arrays = 0, failures = 0;
    auto check = [&](const std::vector<EndpointRef>& refs) {
      ++arrays;
      if (!llq_holds(d, s, exact_points(d, refs))) ++failures;
    };
    if (s <= 4) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<EndpointRef> refs;
        for (std::uint64_t j = 1; j <= n; ++j)
          refs.push_back({{s, j}, ((mask >> (j - 1)) & 1U) ? Side::Right : Side::Left});
        check(refs);
      }
    } else {
      for (auto rule : {PlacementRule::Left, PlacementRule::Right, PlacementRule::Alternating})
        check(uniform_slots(s, n, rule));
      std::uniform_int_distribution<std::uint64_t> sub(0, 3);
      for (int t = 0; t < 256; ++t) {
        std::vector<EndpointRef> refs;
        for (std::uint64_t j = 1; j <= n; ++j)
          refs.push_back({{s + 2, 4 * (j - 1) + 1 + sub(rng)}, (rng() & 1U) ? Side::Right : Side::Left});
        check(refs);
      }
    }
    rep.add("llq s=" + std::to_string(s), failures == 0,
            std::to_string(arrays) + " arrays, " + std::to_string(failures) + " failures");
  }
}

// ---------------------------------------------------------------- lemma-sum

inline void suite_sum(SuiteReport& rep, const SuiteOptions& opt) {
  struct Case {
    Rational alpha, ell1;
    int c, n_alpha;
  };
  const std::vector<Case> cases{{Rational(2), Rational(1, 3), 7, 4},
                                {Rational(3), Rational(1, 3), 7, 4},
                                {Rational(3, 2), Rational(1, 9), 5, 5}};
  for (const auto& cs : cases) {
    const auto d = SetDescriptor::alpha(cs.alpha, cs.ell1);
    const auto ctx = make_context(d, 1, 1, opt.digits);
    const auto res = lemma_sum_check(cs.alpha, cs.ell1, 20, ctx);
    const auto [c, n_alpha] = sum_constants(cs.alpha);
    rep.add("sum " + d.canonical(), res.pass && c == cs.c && n_alpha == cs.n_alpha,
            "C=" + std::to_string(c) + " n_alpha=" + std::to_string(n_alpha) + " rows=" +
                std::to_string(res.rows.size()) + " worst margin=" + fmt(res.worst_margin()));
  }
}

// ---------------------------------------------------------------- theorem-beta

inline void suite_beta(SuiteReport& rep, const SuiteOptions& opt) {
  const Rational beta(1, 3);
  const auto d = SetDescriptor::beta(beta);
  std::vector<BigReal> witnesses;
  for (int s = 3; s <= 8; ++s) {
    const NodeArray z = endpoints_Y(d, s - 1, opt.digits);
    const SetGeometry g = search_geometry(d, z, 1, opt.digits);
    const auto w = witness_lambda(g, z, WitnessRule::Endpoint);
    const auto lemma = lemma_Y_bound(d, s, g.context());
    const auto theorem = theorem_beta_bound(beta, s, g.context());
    rep.add("witness s=" + std::to_string(s), lemma.satisfied_by(w.lambda) && theorem.satisfied_by(lemma.value),
            "lambda(l_s) = " + fmt(w.lambda) + " >= " + fmt(lemma.value) + " >= " + fmt(theorem.value));
    witnesses.push_back(w.lambda);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < witnesses.size(); ++i) increasing = increasing && witnesses[i - 1] < witnesses[i];
  rep.add("growth", increasing && witnesses.front() < 10 && witnesses.back() > BigReal(1e15),
          "log10 from " + fmt(log10_of(witnesses.front())) + " to " + fmt(log10_of(witnesses.back())));
}

// ---------------------------------------------------------------- theorem-bdd1

inline void suite_bdd1(SuiteReport& rep, const SuiteOptions& opt) {
  const auto d = SetDescriptor::alpha(Rational(2), Rational(1, 3));
  SearchConfig cfg;
  cfg.depth = 6;
  cfg.threads = opt.threads;
  std::vector<BigReal> values;
  for (int s = 4; s <= 8; ++s) {
    const auto r = lebesgue_constant(d, endpoints_Y(d, s - 1, opt.digits), cfg, opt.digits);
    rep.add("stabilized s=" + std::to_string(s), r.stabilized,
            "Lambda = " + fmt(r.lambda_max, 12) + " depth " + std::to_string(r.search_depth));
    values.push_back(r.lambda_max);
  }
  bool nonincreasing = true;
  for (std::size_t i = 2; i < values.size(); ++i) nonincreasing = nonincreasing && !(values[i - 1] < values[i]);
  rep.add("nonincreasing s>=5", nonincreasing);
  const BigReal excess = values.back() - 1;
  rep.add("Lambda_256 - 1 < 1e-2", excess < BigReal(1e-2), fmt(excess, 4));
}

// ---------------------------------------------------------------- theorem-unif

inline void suite_unif(SuiteReport& rep, const SuiteOptions& opt) {
  const auto d = SetDescriptor::alpha(Rational(2), Rational(1, 3));
  std::vector<BigReal> values;
  for (int s = 4; s <= 8; ++s) {
    const NodeArray z = uniform_nodes(d, s, (std::uint64_t{1} << s) - 1, PlacementRule::Left, std::nullopt,
                                      opt.digits);
    const SetGeometry g = search_geometry(d, z, 1, opt.digits);
    const auto w = witness_lambda(g, z, WitnessRule::EmptyInterval);
    rep.add("witness s=" + std::to_string(s), w.lambda.is_finite(),
            "lambda = " + fmt(w.lambda) + " at " + w.ref->str());
    values.push_back(w.lambda);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) increasing = increasing && values[i - 1] < values[i];
  rep.add("increasing", increasing);
  rep.add("exceeds 10 at s=8", values.back() > 10, fmt(values.back()));
}

// ---------------------------------------------------------------- julia

inline GammaSequence reference_gamma() { return GammaSequence::geometric(Rational(1, 32), Rational(1, 2)); }

inline void suite_julia(SuiteReport& rep, const SuiteOptions& opt) {
  const auto g = reference_gamma();
  const auto d = SetDescriptor::julia(g);
  const auto c = build_levels(g, 6, make_context(d, 6, 128, opt.digits));
  const auto r = verify_julia_invariants(c, 8);
  std::map<std::string, std::pair<bool, double>> by_name;
  std::vector<std::string> order;
  for (const auto& e : r.entries) {
    auto [it, fresh] = by_name.try_emplace(e.name, true, HUGE_VAL);
    if (fresh) order.push_back(e.name);
    it->second.first = it->second.first && e.pass;
    it->second.second = std::min(it->second.second, e.worst_margin);
  }
  for (const auto& name : order)
    rep.add(name, by_name[name].first, "worst margin " + fmt(by_name[name].second));
}

// ---------------------------------------------------------------- theorem-bdd2

inline void suite_bdd2(SuiteReport& rep, const SuiteOptions& opt) {
  const auto g = reference_gamma();
  const auto d = SetDescriptor::julia(g);
  SearchConfig cfg;
  cfg.threads = opt.threads;
  for (int s = 2; s <= 6; ++s) {
    const NodeArray z = endpoints_Y(d, s - 1, opt.digits);
    const SetGeometry geo = search_geometry(d, z, cfg.depth, opt.digits);
    const auto r = lebesgue_constant(geo, z, cfg);
    const auto bound = bdd2_bound(g, geo.context());
    rep.add("s=" + std::to_string(s), r.stabilized && bound.satisfied_by(r.lambda_max),
            "Lambda = " + fmt(r.lambda_max, 12) + " <= " + fmt(bound.value, 12) +
                (r.stabilized ? "" : " (not stabilized)"));
  }
}

// ---------------------------------------------------------------- theorem-notbdd

inline void suite_notbdd(SuiteReport& rep, const SuiteOptions& opt) {
  const auto g = reference_gamma();
  const auto d = SetDescriptor::julia(g);
  for (int s = 3; s <= 5; ++s) {
    NodeArray base = endpoints_Y(d, s - 1, opt.digits);
    const SetGeometry geo = search_geometry(d, base, 1, opt.digits);
    base = rebase(geo, base);
    for (std::size_t idx : {std::size_t{1}, base.size() / 2, base.size()}) {
      const NodeArray z = delete_node(base, idx);
      const auto w = witness_lambda(geo, z, WitnessRule::DeletedNode);
      const auto bound = notbdd_bound(g, static_cast<long>(z.size()), geo.context());
      rep.add("s=" + std::to_string(s) + " removed " + std::to_string(idx), w.lambda > bound.value,
              "lambda = " + fmt(w.lambda) + " > " + fmt(bound.value));
    }
  }
}

// ---------------------------------------------------------------- mergelyan

inline void suite_mergelyan(SuiteReport& rep, const SuiteOptions& opt) {
  for (const Rational& beta : {Rational(1, 9), Rational(1, 27)}) {
    const auto d = SetDescriptor::beta(beta);
    std::optional<BigReal> prev;
    bool increasing = true;
    std::string ratios;
    bool in_range = true;
    for (int s = 4; s <= 9; ++s) {
      const auto ctx = make_context(d, s + 2, 1, opt.digits);
      const auto scope = ctx.scope();
      const auto m = mergelyan_Ms(d, s, ctx);
      if (prev) increasing = increasing && *prev < m.log_Ms;
      prev = m.log_Ms;
      const double ratio = (m.log_Ms / m.leading_term).to_double();
      in_range = in_range && ratio > 0.5 && ratio < 2.0;
      ratios += (ratios.empty() ? "" : " ") + fmt(ratio);
    }
    rep.add("log M_s increasing " + d.canonical(), increasing);
    rep.add("leading-term ratio " + d.canonical(), in_range, ratios);
  }
}

// ---------------------------------------------------------------- search-oracle

inline void suite_oracle(SuiteReport& rep, const SuiteOptions& opt) {
  const auto d = SetDescriptor::beta(Rational(1, 3));
  std::vector<std::pair<std::string, NodeArray>> arrays;
  const NodeArray y2 = endpoints_Y(d, 2, opt.digits);
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<BigReal> pts(y2.points().begin(), y2.points().begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<std::optional<EndpointRef>> refs(y2.refs().begin(), y2.refs().begin() + static_cast<std::ptrdiff_t>(n));
    arrays.emplace_back("Y_2 prefix " + std::to_string(n), NodeArray(d, std::move(pts), Provenance{}, std::move(refs)));
  }
  arrays.emplace_back("Y_0", endpoints_Y(d, 0, opt.digits));
  arrays.emplace_back("Y_1", endpoints_Y(d, 1, opt.digits));
  arrays.emplace_back("uniform s=2 count=3", uniform_nodes(d, 2, 3, PlacementRule::Right, std::nullopt, opt.digits));
  arrays.emplace_back("uniform s=3 count=7",
                      uniform_nodes(d, 3, 7, PlacementRule::Alternating, std::nullopt, opt.digits));
  arrays.emplace_back("uniform s=3 count=5", uniform_nodes(d, 3, 5, PlacementRule::Left, std::nullopt, opt.digits));

  SearchConfig cfg;
  cfg.depth = 6;
  cfg.threads = opt.threads;
  for (const auto& [name, z] : arrays) {
    const SetGeometry geo = search_geometry(d, z, cfg.depth, opt.digits);
    const auto r = lebesgue_constant(geo, z, cfg);
    const auto ex = endpoint_maximum(geo, z, geo.max_level(), opt.threads);
    const auto scope = geo.context().scope();
    const BigReal rel = abs(ex.lambda - r.lambda_max) / ex.lambda;
    rep.add(name, rel <= BigReal(cfg.rel_tol),
            "search " + fmt(r.lambda_max, 12) + " exhaustive " + fmt(ex.lambda, 12) + " (level " +
                std::to_string(geo.max_level()) + ", rel diff " + fmt(rel, 3) + ")");
  }
}

}  // namespace detail

inline const std::vector<std::pair<std::string, void (*)(SuiteReport&, const SuiteOptions&)>>& suite_table() {
  static const std::vector<std::pair<std::string, void (*)(SuiteReport&, const SuiteOptions&)>> table{
      {"core-invariants", detail::suite_core},   {"lemma-rr", detail::suite_rr},
      {"lemma-llq", detail::suite_llq},          {"lemma-sum", detail::suite_sum},
      {"theorem-beta", detail::suite_beta},      {"theorem-bdd1", detail::suite_bdd1},
      {"theorem-unif", detail::suite_unif},      {"julia-construction", detail::suite_julia},
      {"theorem-bdd2", detail::suite_bdd2},      {"theorem-notbdd", detail::suite_notbdd},
      {"mergelyan-ms", detail::suite_mergelyan}, {"search-oracle", detail::suite_oracle},
  };
  return table;
}

inline std::vector<std::string> suite_ids() {
  std::vector<std::string> out;
  for (const auto& [id, fn] : suite_table()) out.push_back(id);
  return out;
}

/// Runs one suite. Unknown ids raise DomainError. Errors thrown by the
/// library inside a suite are reported as a failed line.
inline SuiteReport run_suite(std::string_view id, const SuiteOptions& opt = {}) {
  for (const auto& [name, fn] : suite_table()) {
    if (name != id) continue;
    SuiteReport rep;
    rep.id = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(rep, opt);
    } catch (const std::exception& e) {
      rep.add("error", false, e.what());
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  throw DomainError("unknown suite '" + std::string(id) + "'");
}

}  // namespace cantorlc
