#include "tauforge/exactpoly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tauforge {

NuLinear& NuLinear::operator+=(const NuLinear& o) {
  c0 += o.c0;
  c1 += o.c1;
  return *this;
}

NuLinear& NuLinear::operator-=(const NuLinear& o) {
  c0 -= o.c0;
  c1 -= o.c1;
  return *this;
}

NuLinear operator*(const NuLinear& a, const NuLinear& b) {
  if (a.c1 != 0 && b.c1 != 0) throw NuDegreeOverflow("product of two nu-dependent coefficients");
  return {a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0};
}

long CharVector::degree(const Monomial& m) const {
  if (m.size() != alpha.size()) throw std::invalid_argument("characteristic vector length != rank");
  long d = 0;
  for (std::size_t i = 0; i < m.size(); ++i) d += static_cast<long>(alpha[i]) * m[i];
  return d;
}

MultiPoly MultiPoly::constant(std::size_t rank, const NuLinear& c) {
  return monomial(rank, Monomial(rank, 0), c);
}

MultiPoly MultiPoly::variable(std::size_t rank, std::size_t index) {
  if (index >= rank) throw std::out_of_range("variable index out of range");
  Monomial m(rank, 0);
  m[index] = 1;
  return monomial(rank, m);
}

MultiPoly MultiPoly::monomial(std::size_t rank, const Monomial& m, const NuLinear& c) {
  MultiPoly p(rank);
  p.add_term(m, c);
  return p;
}

bool MultiPoly::nu_free() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.nu_free(); });
}

void MultiPoly::add_term(const Monomial& m, const NuLinear& c) {
  if (m.size() != rank_) throw std::invalid_argument("monomial length != rank");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

NuLinear MultiPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? NuLinear{} : it->second;
}

MultiPoly MultiPoly::nu_part(int k) const {
  if (k != 0 && k != 1) throw std::invalid_argument("nu_part: k must be 0 or 1");
  MultiPoly out(rank_);
  for (const auto& [m, c] : terms_) out.add_term(m, k == 0 ? c.c0 : c.c1);
  return out;
}

MultiPoly MultiPoly::at_nu(const Rational& nu) const {
  MultiPoly out(rank_);
  for (const auto& [m, c] : terms_) out.add_term(m, c.at(nu));
  return out;
}

void MultiPoly::check_rank(const MultiPoly& o) const {
  if (o.rank_ != rank_) throw std::invalid_argument("polynomial rank mismatch");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  check_rank(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  check_rank(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const NuLinear& s) {
  Terms out;
  for (const auto& [m, c] : terms_) {
    NuLinear v = c * s;
    if (!v.is_zero()) out.emplace(m, std::move(v));
  }
  terms_ = std::move(out);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.check_rank(b);
  MultiPoly out(a.rank_);
  Monomial m(a.rank_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  return out;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

MultiPoly arith(const MultiPoly& p, const MultiPoly& q, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return p + q;
    case ArithOp::Sub: return p - q;
    case ArithOp::Mul: return p * q;
  }
  throw std::invalid_argument("unknown arithmetic op");
}

MultiPoly pow(const MultiPoly& p, unsigned k) {
  MultiPoly result = MultiPoly::constant(p.rank(), Rational(1));
  MultiPoly base = p;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

MultiPoly partial_derivative(const MultiPoly& p, std::size_t index) {
  if (index >= p.rank()) throw std::out_of_range("partial_derivative: index out of range");
  MultiPoly out(p.rank());
  for (const auto& [m, c] : p.terms()) {
    if (m[index] == 0) continue;
    Monomial d = m;
    Rational k = d[index]--;
    out.add_term(d, c * NuLinear(k));
  }
  return out;
}

long weighted_degree(const MultiPoly& p, const CharVector& cv) {
  long best = kZeroPolyDegree;
  for (const auto& [m, c] : p.terms()) best = std::max(best, cv.degree(m));
  return best;
}

Rational evaluate(const MultiPoly& p, std::span<const Rational> point, const Rational& nu) {
  if (point.size() != p.rank()) throw std::invalid_argument("evaluate: point length != rank");
  Rational sum = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational term = c.at(nu);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      Rational pw;
      mpz_pow_ui(pw.get_num_mpz_t(), point[i].get_num_mpz_t(), m[i]);
      mpz_pow_ui(pw.get_den_mpz_t(), point[i].get_den_mpz_t(), m[i]);
      term *= pw;
    }
    sum += term;
  }
  return sum;
}

MultiPoly substitute(const MultiPoly& p, const std::vector<MultiPoly>& images) {
  if (images.size() != p.rank()) throw std::invalid_argument("substitute: need one image per variable");
  for (const auto& img : images) {
    if (img.rank() != p.rank()) throw std::invalid_argument("substitute: image rank mismatch");
    if (!img.nu_free()) throw std::invalid_argument("substitute: images must be nu-free");
  }
  std::vector<std::vector<MultiPoly>> powers(p.rank());
  for (std::size_t i = 0; i < p.rank(); ++i) powers[i].push_back(MultiPoly::constant(p.rank(), Rational(1)));
  MultiPoly out(p.rank());
  for (const auto& [m, c] : p.terms()) {
    MultiPoly term = MultiPoly::constant(p.rank(), c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      auto& pw = powers[i];
      while (pw.size() <= m[i]) pw.push_back(pw.back() * images[i]);
      if (m[i]) term = term * pw[m[i]];
    }
    out += term;
  }
  return out;
}

std::vector<Monomial> canonical_order(const MultiPoly& p, const CharVector& cv) {
  std::vector<Monomial> ms;
  ms.reserve(p.size());
  for (const auto& [m, c] : p.terms()) ms.push_back(m);
  std::stable_sort(ms.begin(), ms.end(), [&](const Monomial& a, const Monomial& b) {
    return cv.degree(a) < cv.degree(b);
  });
  return ms;
}

nlohmann::json to_json(const MultiPoly& p, const CharVector& cv) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : canonical_order(p, cv)) {
    const NuLinear& c = p.terms().at(m);
    for (int k = 0; k < 2; ++k) {
      const Rational& q = k == 0 ? c.c0 : c.c1;
      if (q == 0) continue;
      out.push_back({{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}, {"nu_pow", k}, {"exp", m}});
    }
  }
  return out;
}

MultiPoly poly_from_json(const nlohmann::json& j, std::size_t rank) {
  if (!j.is_array()) throw std::invalid_argument("polynomial JSON must be an array of terms");
  MultiPoly p(rank);
  std::map<std::pair<Monomial, int>, bool> seen;
  for (const auto& t : j) {
    Monomial m = t.at("exp").get<Monomial>();
    int nu_pow = t.at("nu_pow").get<int>();
    if (m.size() != rank) throw std::invalid_argument("term exponent length != rank");
    if (nu_pow != 0 && nu_pow != 1) throw std::invalid_argument("nu_pow must be 0 or 1");
    if (!seen.emplace(std::make_pair(m, nu_pow), true).second)
      throw std::invalid_argument("duplicate term in polynomial JSON");
    Rational q(mpz_class(t.at("num").get<std::string>()), mpz_class(t.at("den").get<std::string>()));
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in polynomial JSON");
    q.canonicalize();
    p.add_term(m, nu_pow == 0 ? NuLinear(q) : NuLinear(Rational(0), q));
  }
  return p;
}

namespace {

std::string monomial_text(const Monomial& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += 't' + std::to_string(i + 1);
    if (m[i] > 1) s += '^' + std::to_string(m[i]);
  }
  return s;
}

void append_term(std::string& out, Rational q, const std::string& factors) {
  bool neg = q < 0;
  if (neg) q = -q;
  if (out.empty())
    out += neg ? "-" : "";
  else
    out += neg ? " - " : " + ";
  if (factors.empty()) {
    out += to_string(q);
  } else {
    if (q != 1) out += to_string(q) + '*';
    out += factors;
  }
}

}  // namespace

std::string to_text(const MultiPoly& p, const CharVector& cv) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& m : canonical_order(p, cv)) {
    const NuLinear& c = p.terms().at(m);
    std::string mono = monomial_text(m);
    if (c.c0 != 0) append_term(out, c.c0, mono);
    if (c.c1 != 0) append_term(out, c.c1, mono.empty() ? "nu" : "nu*" + mono);
  }
  return out;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, std::size_t rank) : s_(text), rank_(rank) {}

  MultiPoly parse() {
    MultiPoly p = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse_poly: " + what + " at offset " + std::to_string(pos_) + " in \"" +
                                std::string(s_) + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char ch) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string digits() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::string(s_.substr(start, pos_ - start));
  }

  MultiPoly expr() {
    MultiPoly p = term();
    for (;;) {
      if (accept('+'))
        p += term();
      else if (accept('-'))
        p -= term();
      else
        return p;
    }
  }
  MultiPoly term() {
    MultiPoly p = unary();
    while (accept('*')) p = p * unary();
    return p;
  }
  MultiPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  MultiPoly power() {
    MultiPoly base = primary();
    if (accept('^')) {
      unsigned long k = std::stoul(digits());
      return pow(base, static_cast<unsigned>(k));
    }
    return base;
  }
  MultiPoly primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char ch = s_[pos_];
    if (accept('(')) {
      MultiPoly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mpz_class num(digits());
      mpz_class den = 1;
      if (accept('/')) den = mpz_class(digits());
      if (den == 0) fail("zero denominator");
      Rational q(num, den);
      q.canonicalize();
      return MultiPoly::constant(rank_, q);
    }
    if (s_.substr(pos_, 2) == "nu") {
      pos_ += 2;
      return MultiPoly::constant(rank_, NuLinear(Rational(0), Rational(1)));
    }
    if (ch == 't') {
      ++pos_;
      std::size_t i = std::stoul(digits());
      if (i < 1 || i > rank_) fail("variable index out of range");
      return MultiPoly::variable(rank_, i - 1);
    }
    fail(std::string("unexpected character '") + ch + "'");
  }

  std::string_view s_;
  std::size_t rank_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text, std::size_t rank) { return PolyParser(text, rank).parse(); }

}  // namespace tauforge
