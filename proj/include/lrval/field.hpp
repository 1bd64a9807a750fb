#pragma once
// Field layer: exact rationals, the series field F of finite Laurent sums
// c_1*t^{a_1} + ... + c_m*t^{a_m} with rational exponents, and the valuation
// ||a|| = least exponent of a nonzero term (INFINITY for 0).
//
// Everything is exact.  No general series inversion exists here; the only
// division provided is divide_trunc, which divides by the leading monomial
// and expands the remaining unit geometrically under an explicit truncation
// bound.  Callers that rely on truncated division escalate the bound until
// results stabilize.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrval {

using Rat = mpq_class;

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

// Parse "p", "p/q", or a plain decimal like "4.5" into an exact rational.
inline Rat rat_parse(const std::string& s) {
  std::string str = s;
  // trim whitespace
  const auto b = str.find_first_not_of(" \t\r\n");
  const auto e = str.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) throw std::invalid_argument("empty rational token");
  str = str.substr(b, e - b + 1);

  const auto dot = str.find('.');
  if (dot != std::string::npos) {
    // decimal form: sign, integer part, fractional part
    std::string intpart = str.substr(0, dot);
    std::string frac = str.substr(dot + 1);
    if (frac.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad rational token: " + s);
    bool neg = !intpart.empty() && intpart[0] == '-';
    if (!intpart.empty() && (intpart[0] == '-' || intpart[0] == '+'))
      intpart = intpart.substr(1);
    if (intpart.empty()) intpart = "0";
    mpz_class num(intpart + frac);
    mpz_class den(1);
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rat q(num, den);
    q.canonicalize();
    if (neg) q = -q;
    return q;
  }
  if (str.find_first_not_of("+-/0123456789") != std::string::npos)
    throw std::invalid_argument("bad rational token: " + s);
  Rat q(str);
  q.canonicalize();
  return q;
}

// Emit "p" when the denominator is 1, otherwise "p/q".
inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Rat rat_floor(const Rat& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return Rat(f);
}

inline Rat rat_ceil(const Rat& q) { return -rat_floor(Rat(-q)); }

// ---------------------------------------------------------------------------
// Valuation: a rational extended with INFINITY (the valuation of 0)
// ---------------------------------------------------------------------------

struct Valuation {
  bool infinite = false;
  Rat value = 0;  // meaningful only when !infinite

  static Valuation inf() { return Valuation{true, Rat(0)}; }
  static Valuation fin(Rat v) { return Valuation{false, std::move(v)}; }

  bool operator==(const Valuation& o) const {
    return infinite == o.infinite && (infinite || value == o.value);
  }
  bool operator!=(const Valuation& o) const { return !(*this == o); }
  bool operator<(const Valuation& o) const {
    if (infinite) return false;
    if (o.infinite) return true;
    return value < o.value;
  }
  bool operator<=(const Valuation& o) const { return *this < o || *this == o; }
  bool operator>(const Valuation& o) const { return o < *this; }
  bool operator>=(const Valuation& o) const { return o <= *this; }

  Valuation operator+(const Valuation& o) const {
    if (infinite || o.infinite) return inf();
    return fin(value + o.value);
  }
  Valuation operator+(const Rat& s) const {
    if (infinite) return inf();
    return fin(value + s);
  }

  std::string str() const { return infinite ? "INFINITY" : rat_str(value); }
};

inline Valuation val_min(const Valuation& a, const Valuation& b) {
  return a < b ? a : b;
}

// ---------------------------------------------------------------------------
// FieldElement
// ---------------------------------------------------------------------------

struct Term {
  Rat exp;
  Rat coeff;
};

// Canonical form: terms sorted by strictly increasing exponent, all
// coefficients nonzero.  Equality and valuation are O(1)-decidable
// on the representation.
class FieldElement {
 public:
  FieldElement() = default;
  explicit FieldElement(std::vector<Term> terms) : terms_(std::move(terms)) {
    normalize();
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool operator==(const FieldElement& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].exp != o.terms_[i].exp || terms_[i].coeff != o.terms_[i].coeff)
        return false;
    return true;
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

 private:
  std::vector<Term> terms_;

  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.exp < b.exp; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().exp == t.exp) {
        out.back().coeff += t.coeff;
        if (out.back().coeff == 0) out.pop_back();
      } else if (t.coeff != 0) {
        out.push_back(t);
      }
    }
    terms_ = std::move(out);
  }
};

inline FieldElement fe_zero() { return FieldElement(); }

// The element c * t^s (zero element if c = 0).  mpq_class's two-argument
// constructor does not canonicalize, and non-canonical rationals break
// mpq_equal (and hence term merging), so re-canonicalize defensively.
inline FieldElement monomial(const Rat& s, const Rat& c) {
  if (c == 0) return FieldElement();
  Rat se = s, ce = c;
  se.canonicalize();
  ce.canonicalize();
  return FieldElement({Term{std::move(se), std::move(ce)}});
}

inline FieldElement fe_one() { return monomial(0, 1); }

inline Valuation valuation(const FieldElement& a) {
  if (a.is_zero()) return Valuation::inf();
  return Valuation::fin(a.terms().front().exp);
}

inline bool is_unit(const FieldElement& a) {
  return !a.is_zero() && a.terms().front().exp == 0;
}

inline FieldElement add(const FieldElement& a, const FieldElement& b) {
  // termwise merge with cancellation
  std::vector<Term> out;
  out.reserve(a.terms().size() + b.terms().size());
  size_t i = 0, j = 0;
  while (i < a.terms().size() || j < b.terms().size()) {
    if (j == b.terms().size() ||
        (i < a.terms().size() && a.terms()[i].exp < b.terms()[j].exp)) {
      out.push_back(a.terms()[i++]);
    } else if (i == a.terms().size() || b.terms()[j].exp < a.terms()[i].exp) {
      out.push_back(b.terms()[j++]);
    } else {
      Rat c = a.terms()[i].coeff + b.terms()[j].coeff;
      if (c != 0) out.push_back(Term{a.terms()[i].exp, std::move(c)});
      ++i;
      ++j;
    }
  }
  return FieldElement(std::move(out));
}

inline FieldElement neg(const FieldElement& a) {
  std::vector<Term> out = a.terms();
  for (auto& t : out) t.coeff = -t.coeff;
  return FieldElement(std::move(out));
}

inline FieldElement sub(const FieldElement& a, const FieldElement& b) {
  return add(a, neg(b));
}

inline FieldElement mul(const FieldElement& a, const FieldElement& b) {
  // convolution product c_k = sum over exponent pairs
  std::vector<Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms())
      out.push_back(Term{ta.exp + tb.exp, ta.coeff * tb.coeff});
  return FieldElement(std::move(out));
}

inline FieldElement scale(const FieldElement& a, const Rat& c) {
  if (c == 0) return FieldElement();
  std::vector<Term> out = a.terms();
  for (auto& t : out) t.coeff *= c;
  return FieldElement(std::move(out));
}

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return add(a, b); }
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) { return sub(a, b); }
inline FieldElement operator-(const FieldElement& a) { return neg(a); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return mul(a, b); }

// Drop all terms with exponent >= bound.
inline FieldElement truncate(const FieldElement& a, const Rat& bound) {
  std::vector<Term> out;
  for (const auto& t : a.terms()) {
    if (t.exp < bound) out.push_back(t);
  }
  return FieldElement(std::move(out));
}

// Inverse of a valuation-0 element modulo exponents >= bound:
// u = c0(1 + h), ||h|| > 0, and u^{-1} = c0^{-1} sum (-h)^k, a finite sum
// after truncation because the order of h^k grows linearly in k.
// a / b modulo exponents >= bound, dividing only by the leading monomial of
// b.  Classical long division: each step kills the remainder's leading term,
// so the quotient terms come out in strictly increasing exponent order.
inline FieldElement divide_trunc(const FieldElement& a, const FieldElement& b,
                                 const Rat& bound) {
  if (b.is_zero()) throw std::invalid_argument("divide_trunc: division by zero");
  if (a.is_zero()) return a;
  const Rat beta = b.terms().front().exp;
  const Rat blead = b.terms().front().coeff;
  std::vector<Term> q;
  FieldElement rem = a;
  while (!rem.is_zero()) {
    const Term& lt = rem.terms().front();
    const Rat qexp = lt.exp - beta;
    if (qexp >= bound) break;
    const Rat qc = lt.coeff / blead;
    q.push_back(Term{qexp, qc});
    rem = sub(rem, mul(b, monomial(qexp, qc)));
  }
  return FieldElement(std::move(q));
}

// Inverse of a valuation-0 element modulo exponents >= bound.
inline FieldElement unit_inverse_trunc(const FieldElement& u, const Rat& bound) {
  if (!is_unit(u)) throw std::invalid_argument("unit_inverse_trunc: not a unit");
  return divide_trunc(fe_one(), u, bound);
}

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

// Coefficients of random units are small nonzero integers: series division
// raises coefficients to powers proportional to the truncation bound, so
// large draws would blow up rational bit-lengths in the reduction pipeline.
// Accidental cancellations from the small range are caught by the
// certification postconditions and retried with a fresh draw.
inline Rat random_coefficient(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(1, 9);
  return Rat(dist(rng));
}

// Valuation-0 element with the given exponent support; the minimum of the
// support must be 0 so the result is a unit.  Deterministic per seed.
inline FieldElement random_unit(std::uint64_t seed, const std::vector<Rat>& support) {
  if (support.empty() || *std::min_element(support.begin(), support.end()) != 0)
    throw std::invalid_argument("random_unit: invalid-support (minimum must be 0)");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(1, (std::int64_t(1) << 31) - 1);
  std::vector<Term> out;
  for (const auto& s : support)
    out.push_back(Term{s, Rat(static_cast<long>(dist(rng)))});
  return FieldElement(std::move(out));
}

// ---------------------------------------------------------------------------
// Text form: sum of terms "c*t^(p/q)", e.g. "2*t^(7/1) + 1*t^(6/1)"
// ---------------------------------------------------------------------------

inline std::string fe_str(const FieldElement& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  // emit in decreasing exponent order, matching the documented example
  const auto& ts = a.terms();
  for (size_t k = 0; k < ts.size(); ++k) {
    if (k) os << " + ";
    const Term& t = ts[ts.size() - 1 - k];
    os << rat_str(t.coeff) << "*t^(" << rat_str(t.exp.get_num()) << "/"
       << rat_str(t.exp.get_den()) << ")";
  }
  return os.str();
}

// Accepts the emitted form plus lenient variants: bare constants ("3"),
// bare powers ("t^(1/2)", "t^3"), '-' separators, and "c*t^p" without
// parentheses.
inline FieldElement fe_parse(const std::string& s) {
  std::vector<Term> out;
  size_t i = 0;
  const size_t n = s.size();
  auto skip_ws = [&] { while (i < n && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };

  skip_ws();
  if (i >= n) throw std::invalid_argument("empty field element");
  bool first = true;
  while (true) {
    skip_ws();
    if (i >= n) break;
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') sign = -1;
      ++i;
      skip_ws();
    } else if (!first) {
      throw std::invalid_argument("expected '+'/'-' between terms: " + s);
    }
    first = false;

    auto read_rat = [&]() -> Rat {
      size_t start = i;
      if (i < n && (s[i] == '-' || s[i] == '+')) ++i;
      while (i < n && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                       s[i] == '/' || s[i] == '.'))
        ++i;
      if (i == start) throw std::invalid_argument("expected number in: " + s);
      return rat_parse(s.substr(start, i - start));
    };

    Rat coeff(1);
    Rat expo(0);
    bool have_t = false;
    if (i < n && s[i] != 't') {
      coeff = read_rat();
      skip_ws();
      if (i < n && s[i] == '*') {
        ++i;
        skip_ws();
      }
    }
    if (i < n && s[i] == 't') {
      have_t = true;
      ++i;
      if (i < n && s[i] == '^') {
        ++i;
        skip_ws();
        if (i < n && s[i] == '(') {
          ++i;
          expo = read_rat();
          skip_ws();
          if (i >= n || s[i] != ')') throw std::invalid_argument("missing ')' in: " + s);
          ++i;
        } else {
          expo = read_rat();
        }
      } else {
        expo = 1;
      }
    }
    (void)have_t;
    if (sign < 0) coeff = -coeff;
    out.push_back(Term{expo, coeff});
  }
  return FieldElement(std::move(out));
}

}  // namespace lrval
