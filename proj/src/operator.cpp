#include "tauforge/operator.hpp"

#include "embedded_data.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tauforge {

AlgebraicOperator::AlgebraicOperator(SystemKind system, CharVector cv) : system_(system), cv_(std::move(cv)) {
  const std::size_t r = cv_.size();
  upper_.assign(r * (r + 1) / 2, MultiPoly(r));
  b_.assign(r, MultiPoly(r));
}

std::size_t AlgebraicOperator::packed(std::size_t i, std::size_t j) const {
  const std::size_t r = rank();
  if (i >= r || j >= r) throw std::out_of_range("operator entry index out of range");
  if (i > j) std::swap(i, j);
  return i * r - i * (i - 1) / 2 + (j - i);
}

const MultiPoly& AlgebraicOperator::a(std::size_t i, std::size_t j) const { return upper_[packed(i, j)]; }
MultiPoly& AlgebraicOperator::a(std::size_t i, std::size_t j) { return upper_[packed(i, j)]; }

std::string entry_name(bool is_a, std::size_t i, std::size_t j) {
  if (is_a) {
    if (i > j) std::swap(i, j);
    return "A" + std::to_string(i + 1) + std::to_string(j + 1);
  }
  return "B" + std::to_string(i + 1);
}

EntryId parse_entry(std::string_view name, std::size_t rank) {
  auto digit = [&](char ch) -> std::size_t {
    if (ch < '1' || ch > '9' || static_cast<std::size_t>(ch - '0') > rank)
      throw std::invalid_argument("bad entry name: " + std::string(name));
    return static_cast<std::size_t>(ch - '1');
  };
  if (name.size() == 3 && (name[0] == 'A' || name[0] == 'a')) {
    std::size_t i = digit(name[1]), j = digit(name[2]);
    if (i > j) std::swap(i, j);
    return {true, i, j};
  }
  if (name.size() == 2 && (name[0] == 'B' || name[0] == 'b')) return {false, digit(name[1]), 0};
  throw std::invalid_argument("bad entry name: " + std::string(name));
}

std::vector<EntryId> all_entries(std::size_t rank) {
  std::vector<EntryId> ids;
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = i; j < rank; ++j) ids.push_back({true, i, j});
  for (std::size_t i = 0; i < rank; ++i) ids.push_back({false, i, 0});
  return ids;
}

const MultiPoly& entry_poly(const AlgebraicOperator& op, const EntryId& id) {
  return id.is_a ? op.a(id.i, id.j) : op.b(id.i);
}

MultiPoly& entry_poly(AlgebraicOperator& op, const EntryId& id) { return id.is_a ? op.a(id.i, id.j) : op.b(id.i); }

CharVector characteristic_vector(SystemKind kind) {
  switch (kind) {
    case SystemKind::E7: return {{1, 2, 2, 2, 3, 3, 4}};
    case SystemKind::A1: return {{1}};
    case SystemKind::A2: return {{1, 1}};
    case SystemKind::G2: return {{1, 2}};
  }
  throw std::invalid_argument("no characteristic vector for system");
}

std::vector<Violation> audit(const AlgebraicOperator& op, const RootSystem& sys) {
  std::vector<Violation> out;
  const std::size_t r = op.rank();
  if (sys.rank != r) throw std::invalid_argument("audit: operator and root system ranks differ");
  const CharVector& cv = op.charvec();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) {
      const MultiPoly& p = op.a(i, j);
      const std::string name = entry_name(true, i, j);
      long bound = cv.alpha[i] + cv.alpha[j];
      long deg = weighted_degree(p, cv);
      if (deg > bound)
        out.push_back({name, "flag-degree", std::to_string(deg) + " > " + std::to_string(bound)});
      if (!p.nu_free()) out.push_back({name, "nu-free", "A entries must not depend on nu"});
      Monomial lead(r, 0);
      lead[i] += 1;
      lead[j] += 1;
      Rational expect = -sys.metric_dot(sys.fundamental_weights[i], sys.fundamental_weights[j]);
      NuLinear got = p.coefficient(lead);
      if (!(got == NuLinear(expect)))
        out.push_back({name, "leading-term",
                       "coefficient of t" + std::to_string(i + 1) + "*t" + std::to_string(j + 1) + " is " +
                           to_string(got.c0) + ", expected " + to_string(expect)});
    }
  for (std::size_t i = 0; i < r; ++i) {
    const MultiPoly& p = op.b(i);
    const std::string name = entry_name(false, i);
    long deg = weighted_degree(p, cv);
    if (deg > static_cast<long>(cv.alpha[i]))
      out.push_back({name, "flag-degree", std::to_string(deg) + " > " + std::to_string(cv.alpha[i])});
    MultiPoly expect = MultiPoly::variable(r, i) * NuLinear(-sys.weight_lengths_sq[i]);
    if (!(p.at_nu(0) == expect))
      out.push_back({name, "nu0-law", "B(nu=0) = " + to_text(p.at_nu(0), cv) + ", expected " + to_text(expect, cv)});
  }
  return out;
}

namespace {

std::string fnv1a_hex(const std::string& blob) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : blob) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json a_rows_json(const AlgebraicOperator& op) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < op.rank(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = i; j < op.rank(); ++j) row.push_back(to_json(op.a(i, j), op.charvec()));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json b_json(const AlgebraicOperator& op) {
  nlohmann::json b = nlohmann::json::array();
  for (std::size_t i = 0; i < op.rank(); ++i) b.push_back(to_json(op.b(i), op.charvec()));
  return b;
}

std::string poly_block(const nlohmann::json& terms, const std::string& indent) {
  if (terms.empty()) return "[]";
  std::string s = "[\n";
  for (std::size_t k = 0; k < terms.size(); ++k) {
    s += indent + " " + terms[k].dump();
    s += k + 1 < terms.size() ? ",\n" : "\n";
  }
  return s + indent + "]";
}

AlgebraicOperator parse_embedded(const char* text) {
  AlgebraicOperator op = operator_from_json(nlohmann::json::parse(text));
  op.audit_log = audit(op, build_system(op.system()));
  return op;
}

}  // namespace

std::string operator_checksum(const AlgebraicOperator& op) {
  nlohmann::json core = {{"system", std::string(to_string(op.system()))},
                         {"charvec", op.charvec().alpha},
                         {"A", a_rows_json(op)},
                         {"B", b_json(op)}};
  return fnv1a_hex(core.dump());
}

nlohmann::json operator_to_json(const AlgebraicOperator& op) {
  return {{"system", std::string(to_string(op.system()))},
          {"provenance", op.provenance},
          {"charvec", op.charvec().alpha},
          {"checksum", operator_checksum(op)},
          {"A", a_rows_json(op)},
          {"B", b_json(op)}};
}

std::string operator_to_text(const AlgebraicOperator& op) {
  nlohmann::json cv = op.charvec().alpha;
  std::string s = "{\n";
  s += " \"system\": \"" + std::string(to_string(op.system())) + "\",\n";
  s += " \"provenance\": " + nlohmann::json(op.provenance).dump() + ",\n";
  s += " \"charvec\": " + cv.dump() + ",\n";
  s += " \"checksum\": \"" + operator_checksum(op) + "\",\n";
  s += " \"A\": [\n";
  nlohmann::json rows = a_rows_json(op);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s += "  [\n";
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      s += "   " + poly_block(rows[i][k], "   ");
      s += k + 1 < rows[i].size() ? ",\n" : "\n";
    }
    s += i + 1 < rows.size() ? "  ],\n" : "  ]\n";
  }
  s += " ],\n \"B\": [\n";
  nlohmann::json b = b_json(op);
  for (std::size_t i = 0; i < b.size(); ++i) {
    s += "  " + poly_block(b[i], "  ");
    s += i + 1 < b.size() ? ",\n" : "\n";
  }
  s += " ]\n}\n";
  return s;
}

AlgebraicOperator operator_from_json(const nlohmann::json& j) {
  SystemKind kind = parse_system_kind(j.at("system").get<std::string>());
  CharVector cv{j.at("charvec").get<std::vector<unsigned>>()};
  const std::size_t r = cv.size();
  AlgebraicOperator op(kind, cv);
  if (j.contains("provenance")) op.provenance = j.at("provenance").get<std::string>();
  const auto& rows = j.at("A");
  if (rows.size() != r) throw std::invalid_argument("operator JSON: A needs one row per variable");
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != r - i) throw std::invalid_argument("operator JSON: A row " + std::to_string(i + 1) + " has wrong length");
    for (std::size_t k = 0; k < r - i; ++k) op.a(i, i + k) = poly_from_json(rows[i][k], r);
  }
  const auto& b = j.at("B");
  if (b.size() != r) throw std::invalid_argument("operator JSON: B needs one entry per variable");
  for (std::size_t i = 0; i < r; ++i) op.b(i) = poly_from_json(b[i], r);
  std::string sum = j.at("checksum").get<std::string>();
  if (sum != operator_checksum(op))
    throw std::runtime_error("operator JSON checksum mismatch: stored " + sum + ", content " + operator_checksum(op));
  return op;
}

AlgebraicOperator load_operator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open operator file " + path);
  AlgebraicOperator op = operator_from_json(nlohmann::json::parse(in));
  op.audit_log = audit(op, build_system(op.system()));
  return op;
}

AlgebraicOperator e7_operator() {
  static const AlgebraicOperator op = parse_embedded(embedded::kE7OperatorJson);
  return op;
}

AlgebraicOperator e7_operator_adjudicated() {
  static const AlgebraicOperator op = parse_embedded(embedded::kE7OperatorAdjudicatedJson);
  return op;
}

MultiPoly apply(const AlgebraicOperator& op, const MultiPoly& f) {
  const std::size_t r = op.rank();
  if (f.rank() != r) throw std::invalid_argument("apply: polynomial rank != operator rank");
  MultiPoly out(r);
  for (std::size_t i = 0; i < r; ++i) {
    MultiPoly di = partial_derivative(f, i);
    if (di.is_zero()) continue;
    out += op.b(i) * di;
    for (std::size_t j = 0; j < r; ++j) {
      MultiPoly dij = partial_derivative(di, j);
      if (!dij.is_zero()) out += op.a(i, j) * dij;
    }
  }
  return out;
}

FlagReport flag_degree_check(const AlgebraicOperator& op) {
  FlagReport report;
  const CharVector& cv = op.charvec();
  auto scan = [&](const MultiPoly& p, long bound, const std::string& name) {
    for (const auto& [m, c] : p.terms()) {
      long d = cv.degree(m);
      if (d > bound) report.violations.push_back({name, m, d, bound});
    }
  };
  for (std::size_t i = 0; i < op.rank(); ++i)
    for (std::size_t j = i; j < op.rank(); ++j)
      scan(op.a(i, j), cv.alpha[i] + cv.alpha[j], entry_name(true, i, j));
  for (std::size_t i = 0; i < op.rank(); ++i) scan(op.b(i), cv.alpha[i], entry_name(false, i));
  return report;
}

std::optional<std::size_t> FlagBasis::index_of(const Monomial& m) const {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), m,
                             [](const auto& entry, const Monomial& key) { return entry.first < key; });
  if (it == sorted_.end() || it->first != m) return std::nullopt;
  return it->second;
}

FlagBasis enumerate_flag_basis(const RootSystem& sys, const CharVector& cv, long n) {
  if (n < 0) throw std::invalid_argument("flag degree must be non-negative");
  const std::size_t r = cv.size();
  if (sys.rank != r) throw std::invalid_argument("characteristic vector length != rank");
  std::map<long, std::vector<Monomial>> by_grade;
  Monomial m(r, 0);
  std::function<void(std::size_t, long)> rec = [&](std::size_t k, long used) {
    if (k == r) {
      by_grade[used].push_back(m);
      return;
    }
    for (unsigned p = 0; used + static_cast<long>(p * cv.alpha[k]) <= n; ++p) {
      m[k] = p;
      rec(k + 1, used + p * cv.alpha[k]);
    }
    m[k] = 0;
  };
  rec(0, 0);

  auto weight_of = [&](const Monomial& mono) {
    RVec w(sys.ambient_dim);
    for (std::size_t i = 0; i < r; ++i)
      if (mono[i]) w += Rational(mono[i]) * sys.fundamental_weights[i];
    return w;
  };

  FlagBasis basis;
  basis.n = n;
  basis.cv = cv;
  for (auto& [grade, monos] : by_grade) {
    std::sort(monos.begin(), monos.end());
    std::vector<RVec> ws;
    for (const auto& mono : monos) ws.push_back(weight_of(mono));
    std::vector<bool> taken(monos.size(), false);
    for (std::size_t step = 0; step < monos.size(); ++step) {
      // lexicographically first element with nothing strictly below it among the remaining
      for (std::size_t a = 0; a < monos.size(); ++a) {
        if (taken[a]) continue;
        bool minimal = true;
        for (std::size_t b = 0; b < monos.size() && minimal; ++b)
          if (b != a && !taken[b] && dominates(sys, ws[a], ws[b])) minimal = false;
        if (minimal) {
          taken[a] = true;
          basis.monomials.push_back(monos[a]);
          basis.weights.push_back(ws[a]);
          basis.grades.push_back(grade);
          break;
        }
      }
    }
  }
  for (std::size_t k = 0; k < basis.monomials.size(); ++k) basis.sorted_.emplace_back(basis.monomials[k], k);
  std::sort(basis.sorted_.begin(), basis.sorted_.end());
  return basis;
}

namespace {

void fill_column(const AlgebraicOperator& op, const FlagBasis& basis, const Rational& nu, std::size_t col,
                 RationalMatrix& out) {
  MultiPoly image = apply(op, MultiPoly::monomial(op.rank(), basis.monomials[col])).at_nu(nu);
  for (const auto& [m, c] : image.terms()) {
    auto row = basis.index_of(m);
    if (!row) {
      std::ostringstream os;
      os << "h maps basis monomial #" << col << " outside P_" << basis.n << " (term of weighted degree "
         << basis.cv.degree(m) << ")";
      throw FlagEscape(os.str());
    }
    out(*row, col) = c.c0;
  }
}

}  // namespace

RationalMatrix flag_matrix(const AlgebraicOperator& op, const FlagBasis& basis, const Rational& nu) {
  const std::size_t d = basis.dim();
  RationalMatrix out(d, d);
  std::exception_ptr error;
  const long cols = static_cast<long>(d);
#pragma omp parallel for schedule(dynamic)
  for (long col = 0; col < cols; ++col) {
    try {
      fill_column(op, basis, nu, static_cast<std::size_t>(col), out);
    } catch (...) {
#pragma omp critical(tauforge_flag_matrix_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace serial {
RationalMatrix flag_matrix(const AlgebraicOperator& op, const FlagBasis& basis, const Rational& nu) {
  RationalMatrix out(basis.dim(), basis.dim());
  for (std::size_t col = 0; col < basis.dim(); ++col) fill_column(op, basis, nu, col, out);
  return out;
}
}  // namespace serial

std::string matrix_to_csv(const RationalMatrix& m) {
  std::string s;
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) s += ',';
      s += to_string(m(r, c));
    }
    s += '\n';
  }
  return s;
}

nlohmann::json matrix_to_json(const RationalMatrix& m, const FlagBasis& basis) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(to_string(m(r, c)));
    rows.push_back(row);
  }
  return {{"n", basis.n}, {"charvec", basis.cv.alpha}, {"basis", basis.monomials}, {"matrix", rows}};
}

std::string_view to_string(SpectrumPath path) {
  switch (path) {
    case SpectrumPath::Triangular: return "triangular";
    case SpectrumPath::BlockTriangular: return "block-triangular";
    case SpectrumPath::NumericBlocks: return "numeric-blocks";
  }
  return "?";
}

SpectrumResult spectrum(const AlgebraicOperator& op, const RootSystem& sys, long n, const Rational& nu) {
  SpectrumResult res;
  res.basis = enumerate_flag_basis(sys, op.charvec(), n);
  res.nu = nu;
  RationalMatrix m = flag_matrix(op, res.basis, nu);
  const std::size_t d = m.rows;
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t r = c + 1; r < d; ++r)
      if (res.basis.grades[r] > res.basis.grades[c] && m(r, c) != 0)
        throw std::logic_error("flag matrix is not block triangular by grade");

  bool triangular = true;
  for (std::size_t c = 0; c < d && triangular; ++c)
    for (std::size_t r = c + 1; r < d; ++r)
      if (m(r, c) != 0) {
        triangular = false;
        break;
      }
  if (triangular) {
    res.path = SpectrumPath::Triangular;
    for (std::size_t k = 0; k < d; ++k) {
      res.exact.push_back(m(k, k));
      res.numeric.push_back(m(k, k).get_d());
    }
    return res;
  }

  // Grade blocks that are not triangular in dominance order fall back to a numeric eigensolve.
  res.path = SpectrumPath::NumericBlocks;
  res.numeric.assign(d, 0.0);
  std::size_t start = 0;
  while (start < d) {
    std::size_t end = start;
    while (end < d && res.basis.grades[end] == res.basis.grades[start]) ++end;
    const std::size_t k = end - start;
    Eigen::MatrixXd block(k, k);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c) block(r, c) = m(start + r, start + c).get_d();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(block, false);
    std::vector<double> ev;
    for (Eigen::Index q = 0; q < solver.eigenvalues().size(); ++q) ev.push_back(solver.eigenvalues()[q].real());
    std::sort(ev.begin(), ev.end());
    for (std::size_t q = 0; q < k; ++q) res.numeric[start + q] = ev[q];
    start = end;
  }
  return res;
}

SymbolicSpectrum spectrum_in_nu(const AlgebraicOperator& op, const RootSystem& sys, long n,
                                const std::vector<Rational>& nus) {
  if (nus.size() < 3) throw std::invalid_argument("spectrum_in_nu needs at least three nu values");
  SymbolicSpectrum out;
  out.nus = nus;
  std::vector<SpectrumResult> runs;
  for (const auto& nu : nus) {
    runs.push_back(spectrum(op, sys, n, nu));
    if (runs.back().path != SpectrumPath::Triangular) out.exact = false;
  }
  if (nus[0] == nus[1]) throw std::invalid_argument("spectrum_in_nu: first two nu values coincide");
  out.basis = runs[0].basis;
  out.max_fit_residual = 0;
  if (!out.exact) throw std::runtime_error("spectrum_in_nu: non-triangular flag matrix, no exact fit available");
  for (std::size_t k = 0; k < out.basis.dim(); ++k) {
    Rational slope = (runs[1].exact[k] - runs[0].exact[k]) / (nus[1] - nus[0]);
    Rational icpt = runs[0].exact[k] - slope * nus[0];
    for (std::size_t t = 0; t < nus.size(); ++t) {
      Rational resid = abs(icpt + slope * nus[t] - runs[t].exact[k]);
      if (resid > out.max_fit_residual) out.max_fit_residual = resid;
    }
    out.eigenvalues.emplace_back(icpt, slope);
  }
  return out;
}

std::vector<Rational*> ProjectiveParams::all() {
  std::vector<Rational*> v = {&a2, &b21, &b22, &a3, &b31, &b32, &a4, &b41, &b42, &a5, &b51, &b52, &b53, &c5,
                              &a6, &b61, &b62, &b63, &c6, &a7, &b71, &b72, &b73, &c71, &c72};
  for (auto& d : d7) v.push_back(&d);
  return v;
}

std::vector<MultiPoly> e7_projective_images(const ProjectiveParams& p) {
  const std::size_t r = 7;
  auto t = [&](std::size_t i) { return MultiPoly::variable(r, i - 1); };
  auto k = [&](const Rational& q) { return NuLinear(q); };
  std::vector<MultiPoly> img(r, MultiPoly(r));
  img[0] = t(1);
  img[1] = t(2) + k(p.a2) * pow(t(1), 2) + k(p.b21) * t(3) + k(p.b22) * t(4);
  img[2] = t(3) + k(p.a3) * pow(t(1), 2) + k(p.b31) * t(2) + k(p.b32) * t(4);
  img[3] = t(4) + k(p.a4) * pow(t(1), 2) + k(p.b41) * t(2) + k(p.b42) * t(3);
  img[4] = t(5) + k(p.a5) * pow(t(1), 3) + k(p.b51) * t(1) * t(2) + k(p.b52) * t(1) * t(3) +
           k(p.b53) * t(1) * t(4) + k(p.c5) * t(6);
  img[5] = t(6) + k(p.a6) * pow(t(1), 3) + k(p.b61) * t(1) * t(2) + k(p.b62) * t(1) * t(3) +
           k(p.b63) * t(1) * t(4) + k(p.c6) * t(5);
  img[6] = t(7) + k(p.a7) * pow(t(1), 4) + k(p.b71) * pow(t(1), 2) * t(2) + k(p.b72) * pow(t(1), 2) * t(3) +
           k(p.b73) * pow(t(1), 2) * t(4) + k(p.c71) * t(1) * t(5) + k(p.c72) * t(1) * t(6) +
           k(p.d7[0]) * pow(t(2), 2) + k(p.d7[1]) * pow(t(3), 2) + k(p.d7[2]) * pow(t(4), 2) +
           k(p.d7[3]) * t(2) * t(3) + k(p.d7[4]) * t(2) * t(4) + k(p.d7[5]) * t(3) * t(4);
  return img;
}

bool unit_triangular_up_to_order(const RationalMatrix& m) {
  // Unit diagonal, and the off-diagonal pattern r <- c must be acyclic (Kahn's algorithm).
  const std::size_t n = m.rows;
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    if (m(r, r) != 1) return false;
    for (std::size_t c = 0; c < n; ++c)
      if (r != c && m(r, c) != 0) ++indeg[r];
  }
  std::vector<std::size_t> ready;
  for (std::size_t r = 0; r < n; ++r)
    if (indeg[r] == 0) ready.push_back(r);
  std::size_t done = 0;
  while (!ready.empty()) {
    std::size_t c = ready.back();
    ready.pop_back();
    ++done;
    for (std::size_t r = 0; r < n; ++r)
      if (r != c && m(r, c) != 0 && --indeg[r] == 0) ready.push_back(r);
  }
  return done == n;
}

Rational determinant(RationalMatrix m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = m.rows;
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m(piv, k), m(c, k));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      Rational f = m(r, c) / m(c, c);
      for (std::size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
    }
  }
  return det;
}

InvarianceReport weighted_projective_check(const ProjectiveParams& params, const RootSystem& sys, long n) {
  if (sys.kind != SystemKind::E7) throw std::invalid_argument("the weighted-projective map is defined for E7");
  const CharVector cv = characteristic_vector(SystemKind::E7);
  FlagBasis basis = enumerate_flag_basis(sys, cv, n);
  std::vector<MultiPoly> images = e7_projective_images(params);
  InvarianceReport rep;
  rep.n = n;
  rep.dim = basis.dim();
  rep.matrix = RationalMatrix(rep.dim, rep.dim);
  rep.grade_preserving = true;
  for (std::size_t col = 0; col < basis.dim(); ++col) {
    MultiPoly img = substitute(MultiPoly::monomial(7, basis.monomials[col]), images);
    for (const auto& [m, c] : img.terms()) {
      if (cv.degree(m) != basis.grades[col]) rep.grade_preserving = false;
      auto row = basis.index_of(m);
      if (!row) {
        rep.escapes.push_back(to_text(MultiPoly::monomial(7, basis.monomials[col]), cv));
        break;
      }
      rep.matrix(*row, col) = c.c0;
    }
  }
  rep.within_flag = rep.escapes.empty();
  rep.unit_triangular = unit_triangular_up_to_order(rep.matrix);
  if (rep.grade_preserving) {
    rep.determinant = 1;
    std::size_t start = 0;
    while (start < rep.dim) {
      std::size_t end = start;
      while (end < rep.dim && basis.grades[end] == basis.grades[start]) ++end;
      RationalMatrix block(end - start, end - start);
      for (std::size_t r = start; r < end; ++r)
        for (std::size_t c = start; c < end; ++c) block(r - start, c - start) = rep.matrix(r, c);
      rep.determinant *= determinant(block);
      start = end;
    }
  } else {
    rep.determinant = determinant(rep.matrix);
  }
  rep.invertible = rep.determinant != 0;
  return rep;
}

}  // namespace tauforge
