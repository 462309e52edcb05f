#pragma once

// Parameters of the Cantor-set families: geometric K_beta, super-geometric
// K^alpha, an explicit length table, and the iterated-quadratic sets K(gamma).
// Every parameter is held as an exact rational.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cantorlc/bigreal.hpp"
#include "cantorlc/error.hpp"

namespace cantorlc {

inline Rational rational_pow(const Rational& base, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// log2 of a positive rational, safe for numerators and denominators far
/// beyond the double range.
inline double log2_rational(const Rational& q) {
  auto log2_z = [](const mpz_class& z) {
    long e = 0;
    const double m = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log2(m) + static_cast<double>(e);
  };
  return log2_z(q.get_num()) - log2_z(q.get_den());
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace detail

/// The sequence gamma_1, gamma_2, ... defining K(gamma). Either a finite table
/// (gamma_k = 0 beyond it) or the geometric rule gamma_k = c * q^(k-1).
/// Every entry satisfies 0 < gamma_k <= 1/32.
class GammaSequence {
 public:
  static GammaSequence table(std::vector<Rational> values) {
    if (values.empty()) throw DomainError("gamma table must not be empty");
    for (auto& v : values) {
      v.canonicalize();
      check_entry(v);
    }
    GammaSequence g;
    g.table_ = std::move(values);
    return g;
  }

  static GammaSequence geometric(Rational c, Rational q) {
    c.canonicalize();
    q.canonicalize();
    check_entry(c);
    if (q <= 0 || q >= 1) throw DomainError("geometric gamma ratio must lie in (0, 1)");
    GammaSequence g;
    g.geometric_ = true;
    g.c_ = c;
    g.q_ = q;
    return g;
  }

  bool is_geometric() const { return geometric_; }
  const Rational& scale() const { return c_; }
  const Rational& ratio() const { return q_; }
  const std::vector<Rational>& entries() const { return table_; }

  /// Largest k with gamma_k > 0; nullopt for the geometric rule.
  std::optional<int> last_index() const {
    if (geometric_) return std::nullopt;
    return static_cast<int>(table_.size());
  }

  Rational gamma(int k) const {
    if (k < 1) throw DomainError("gamma index starts at 1");
    if (geometric_) return c_ * rational_pow(q_, static_cast<unsigned long>(k - 1));
    if (k > static_cast<int>(table_.size())) return Rational(0);
    return table_[static_cast<std::size_t>(k - 1)];
  }

  /// Sum over all k >= 1.
  Rational total_sum() const { return tail_sum(0); }

  /// Sum over k > s. For the geometric rule this is c q^s / (1 - q).
  Rational tail_sum(int s) const {
    if (s < 0) throw DomainError("tail index must be nonnegative");
    if (geometric_) {
      Rational t = c_ * rational_pow(q_, static_cast<unsigned long>(s)) / (1 - q_);
      t.canonicalize();
      return t;
    }
    Rational t = 0;
    for (std::size_t k = static_cast<std::size_t>(s); k < table_.size(); ++k) t += table_[k];
    t.canonicalize();
    return t;
  }

  std::string canonical() const {
    if (geometric_) return "geom:" + to_string(c_) + "," + to_string(q_);
    std::string s = "table:";
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (i) s += ';';
      s += to_string(table_[i]);
    }
    return s;
  }

  /// Accepts "geom:<c>,<q>" and "table:<g1>;<g2>;...".
  static GammaSequence parse(std::string_view text) {
    if (detail::starts_with(text, "geom:")) {
      const auto parts = detail::split(text.substr(5), ',');
      if (parts.size() != 2) throw DomainError("expected geom:<c>,<q>");
      return geometric(parse_rational(parts[0]), parse_rational(parts[1]));
    }
    if (detail::starts_with(text, "table:")) {
      std::vector<Rational> v;
      for (auto p : detail::split(text.substr(6), ';')) v.push_back(parse_rational(p));
      return table(std::move(v));
    }
    throw DomainError("unknown gamma rule '" + std::string(text) + "'");
  }

  friend bool operator==(const GammaSequence& a, const GammaSequence& b) {
    return a.canonical() == b.canonical();
  }

 private:
  static void check_entry(const Rational& v) {
    if (v <= 0 || v >= Rational(1, 4)) throw DomainError("gamma entries must lie in (0, 1/4)");
    if (v > Rational(1, 32)) throw DomainError("gamma entries must not exceed 1/32");
  }

  bool geometric_ = false;
  std::vector<Rational> table_;
  Rational c_ = 0;
  Rational q_ = 0;
};

enum class SetKind { GeometricBeta, GeometricAlpha, ExplicitLengths, Julia };

/// Which Cantor family, plus its parameters. Construction validates the
/// family's admissibility conditions, including 3 l_{s+1} <= l_s.
class SetDescriptor {
 public:
  static SetDescriptor beta(Rational b) {
    b.canonicalize();
    if (b <= 0 || b > Rational(1, 3)) throw DomainError("beta must lie in (0, 1/3]");
    SetDescriptor d(SetKind::GeometricBeta);
    d.beta_ = b;
    return d;
  }

  static SetDescriptor alpha(Rational a, Rational ell1) {
    a.canonicalize();
    ell1.canonicalize();
    if (a <= 1) throw DomainError("alpha must exceed 1");
    if (ell1 <= 0 || ell1 > Rational(1, 3)) throw DomainError("ell1 must lie in (0, 1/3]");
    if (!alpha_admissible(a, ell1))
      throw DomainError("ell1^(alpha-1) must not exceed 1/3 (3 l_2 <= l_1 fails)");
    SetDescriptor d(SetKind::GeometricAlpha);
    d.alpha_ = a;
    d.ell1_ = ell1;
    return d;
  }

  static SetDescriptor explicit_lengths(std::vector<Rational> lengths) {
    if (lengths.size() < 2) throw DomainError("length table needs at least l_0 and l_1");
    for (auto& l : lengths) l.canonicalize();
    if (lengths.front() != 1) throw DomainError("length table must start with l_0 = 1");
    for (std::size_t s = 0; s + 1 < lengths.size(); ++s) {
      if (lengths[s + 1] <= 0) throw DomainError("lengths must be positive");
      if (3 * lengths[s + 1] > lengths[s])
        throw DomainError("length table violates 3 l_{s+1} <= l_s at s = " + std::to_string(s));
    }
    SetDescriptor d(SetKind::ExplicitLengths);
    d.lengths_ = std::move(lengths);
    return d;
  }

  static SetDescriptor julia(GammaSequence g) {
    SetDescriptor d(SetKind::Julia);
    d.gamma_ = std::move(g);
    return d;
  }

  SetKind kind() const { return kind_; }
  bool is_geometric() const { return kind_ != SetKind::Julia; }
  const Rational& beta_value() const { return beta_; }
  const Rational& alpha_value() const { return alpha_; }
  const Rational& ell1() const { return ell1_; }
  const std::vector<Rational>& length_table() const { return lengths_; }
  const GammaSequence& gamma() const {
    if (kind_ != SetKind::Julia) throw DomainError("descriptor is not a K(gamma) set");
    return *gamma_;
  }

  /// Deepest level whose data is defined; nullopt when unbounded.
  std::optional<int> max_level() const {
    if (kind_ == SetKind::ExplicitLengths) return static_cast<int>(lengths_.size()) - 1;
    if (kind_ == SetKind::Julia) return gamma_->last_index();
    return std::nullopt;
  }

  /// True when alpha is an integer, which makes every l_s rational.
  bool alpha_is_integer() const { return kind_ == SetKind::GeometricAlpha && alpha_.get_den() == 1; }

  /// log2(1/l_s) for geometric kinds; log2(1/delta_s) for K(gamma), where
  /// delta_s is a lower bound for every level-s length.
  double log2_inverse_length(int s) const {
    if (s < 0) throw DomainError("level must be nonnegative");
    if (auto m = max_level(); m && s > *m)
      throw BudgetError("level " + std::to_string(s) + " exceeds the descriptor's table (" +
                        std::to_string(*m) + ")");
    switch (kind_) {
      case SetKind::GeometricBeta:
        return -static_cast<double>(s) * log2_rational(beta_);
      case SetKind::GeometricAlpha:
        if (s == 0) return 0.0;
        return -std::pow(alpha_.get_d(), s - 1) * log2_rational(ell1_);
      case SetKind::ExplicitLengths:
        return -log2_rational(lengths_[static_cast<std::size_t>(s)]);
      case SetKind::Julia: {
        double acc = 0.0;
        for (int k = 1; k <= s; ++k) acc -= log2_rational(gamma_->gamma(k));
        return acc;
      }
    }
    return 0.0;
  }

  std::string canonical() const {
    switch (kind_) {
      case SetKind::GeometricBeta:
        return "beta:" + to_string(beta_);
      case SetKind::GeometricAlpha:
        return "alpha:" + to_string(alpha_) + ",ell1:" + to_string(ell1_);
      case SetKind::ExplicitLengths: {
        std::string s = "lengths:";
        for (std::size_t i = 0; i < lengths_.size(); ++i) {
          if (i) s += ';';
          s += to_string(lengths_[i]);
        }
        return s;
      }
      case SetKind::Julia:
        return "julia:" + gamma_->canonical();
    }
    return {};
  }

  /// Inverse of canonical(). Also accepts "ternary" for beta:1/3.
  static SetDescriptor parse(std::string_view text) {
    if (text == "ternary") return beta(Rational(1, 3));
    if (detail::starts_with(text, "beta:")) return beta(parse_rational(text.substr(5)));
    if (detail::starts_with(text, "alpha:")) {
      const auto parts = detail::split(text.substr(6), ',');
      if (parts.size() != 2 || !detail::starts_with(parts[1], "ell1:"))
        throw DomainError("expected alpha:<a>,ell1:<l1>");
      return alpha(parse_rational(parts[0]), parse_rational(parts[1].substr(5)));
    }
    if (detail::starts_with(text, "lengths:")) {
      std::vector<Rational> v;
      for (auto p : detail::split(text.substr(8), ';')) v.push_back(parse_rational(p));
      return explicit_lengths(std::move(v));
    }
    if (detail::starts_with(text, "julia:")) return julia(GammaSequence::parse(text.substr(6)));
    throw DomainError("unknown set descriptor '" + std::string(text) + "'");
  }

  friend bool operator==(const SetDescriptor& a, const SetDescriptor& b) {
    return a.canonical() == b.canonical();
  }

 private:
  explicit SetDescriptor(SetKind k) : kind_(k) {}

  // ell1^(alpha-1) <= 1/3, decided exactly when the exponents are modest.
  static bool alpha_admissible(const Rational& a, const Rational& ell1) {
    const mpz_class p = a.get_num();
    const mpz_class q = a.get_den();
    const mpz_class pm = p - q;
    if (pm.fits_ulong_p() && q.fits_ulong_p() && pm.get_ui() <= 4096 && q.get_ui() <= 4096) {
      const Rational lhs = rational_pow(ell1, pm.get_ui()) * rational_pow(Rational(3), q.get_ui());
      return lhs <= 1;
    }
    return (a.get_d() - 1.0) * log2_rational(ell1) <= -std::log2(3.0) + 1e-12;
  }

  SetKind kind_;
  Rational beta_ = 0;
  Rational alpha_ = 0;
  Rational ell1_ = 0;
  std::vector<Rational> lengths_;
  std::optional<GammaSequence> gamma_;
};

}  // namespace cantorlc
