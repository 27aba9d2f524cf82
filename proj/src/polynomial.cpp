#include "bnfstab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "bnfstab/errors.hpp"

namespace bnfstab {

namespace {

using Accumulator = std::unordered_map<MultiIndex, Complex, MultiIndexHash>;

inline Complex cmul(Complex a, Complex b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline void accumulate(Accumulator& acc, const MultiIndex& m, Complex c) {
  auto [it, inserted] = acc.try_emplace(m, c);
  if (!inserted) it->second += c;
}

std::vector<Term> drain(Accumulator& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (const auto& [m, c] : acc) out.push_back({m, c});
  return out;
}

void check_dof(int num_dof) {
  if (num_dof < 1 || num_dof > kMaxDof) {
    throw DimensionError("number of degrees of freedom must be in [1, " +
                         std::to_string(kMaxDof) + "], got " + std::to_string(num_dof));
  }
}

}  // namespace

MultiIndex MultiIndex::from_exponents(std::span<const int> j, std::span<const int> k) {
  if (j.size() != k.size() || j.size() > static_cast<std::size_t>(kMaxDof)) {
    throw DimensionError("multi-index parts must have equal length <= " + std::to_string(kMaxDof));
  }
  int total = 0;
  MultiIndex m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] < 0 || k[i] < 0) throw DomainError("negative exponent in multi-index");
    total += j[i] + k[i];
    m.x_ |= static_cast<std::uint64_t>(j[i]) << (8 * i);
    m.y_ |= static_cast<std::uint64_t>(k[i]) << (8 * i);
  }
  if (total > 255) throw DomainError("monomial degree exceeds 255");
  return m;
}

MultiIndex MultiIndex::with_j(int i, int value) const noexcept {
  const std::uint64_t mask = std::uint64_t{0xff} << (8 * i);
  return MultiIndex((x_ & ~mask) | (static_cast<std::uint64_t>(value) << (8 * i)), y_);
}

MultiIndex MultiIndex::with_k(int i, int value) const noexcept {
  const std::uint64_t mask = std::uint64_t{0xff} << (8 * i);
  return MultiIndex(x_, (y_ & ~mask) | (static_cast<std::uint64_t>(value) << (8 * i)));
}

std::vector<int> MultiIndex::j_vector(int num_dof) const {
  std::vector<int> out(num_dof);
  for (int i = 0; i < num_dof; ++i) out[i] = j(i);
  return out;
}

std::vector<int> MultiIndex::k_vector(int num_dof) const {
  std::vector<int> out(num_dof);
  for (int i = 0; i < num_dof; ++i) out[i] = k(i);
  return out;
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(int num_dof, Field field) : num_dof_(num_dof), field_(field) {
  check_dof(num_dof);
}

Polynomial Polynomial::from_terms(int num_dof, Field field, std::vector<Term> terms) {
  Polynomial p(num_dof, field);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.index < b.index; });
  // merge duplicates
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().index == t.index) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  if (field == Field::real) {
    for (const Term& t : merged) {
      if (t.coeff.imag() != 0.0) {
        throw RealityError("complex coefficient in a polynomial tagged real");
      }
    }
  }
  // prune per homogeneous block; merged is sorted by degree first
  p.terms_.reserve(merged.size());
  std::size_t begin = 0;
  while (begin < merged.size()) {
    const int d = merged[begin].index.degree();
    std::size_t end = begin;
    double block_max = 0.0;
    while (end < merged.size() && merged[end].index.degree() == d) {
      block_max = std::max(block_max, std::abs(merged[end].coeff));
      ++end;
    }
    const double cutoff = kPruneThreshold * block_max;
    for (std::size_t t = begin; t < end; ++t) {
      const double a = std::abs(merged[t].coeff);
      if (a != 0.0 && a >= cutoff) p.terms_.push_back(merged[t]);
    }
    begin = end;
  }
  return p;
}

Polynomial Polynomial::constant(int num_dof, Complex value) {
  const Field f = value.imag() == 0.0 ? Field::real : Field::complex;
  return from_terms(num_dof, f, {{MultiIndex{}, value}});
}

Polynomial Polynomial::monomial(int num_dof, std::span<const int> j, std::span<const int> k,
                                Complex coeff) {
  if (static_cast<int>(j.size()) != num_dof || static_cast<int>(k.size()) != num_dof) {
    throw DimensionError("monomial exponent vectors must have length num_dof");
  }
  const Field f = coeff.imag() == 0.0 ? Field::real : Field::complex;
  return from_terms(num_dof, f, {{MultiIndex::from_exponents(j, k), coeff}});
}

Polynomial Polynomial::x(int num_dof, int i, Complex coeff) {
  std::vector<int> j(num_dof, 0), k(num_dof, 0);
  j.at(i) = 1;
  return monomial(num_dof, j, k, coeff);
}

Polynomial Polynomial::y(int num_dof, int i, Complex coeff) {
  std::vector<int> j(num_dof, 0), k(num_dof, 0);
  k.at(i) = 1;
  return monomial(num_dof, j, k, coeff);
}

Polynomial Polynomial::action(int num_dof, int i) {
  std::vector<int> z(num_dof, 0), two(num_dof, 0);
  two.at(i) = 2;
  return monomial(num_dof, two, z, 0.5) + monomial(num_dof, z, two, 0.5);
}

Complex Polynomial::coefficient(const MultiIndex& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const MultiIndex& key) { return t.index < key; });
  if (it != terms_.end() && it->index == m) return it->coeff;
  return 0.0;
}

int Polynomial::min_degree() const noexcept {
  return terms_.empty() ? -1 : terms_.front().index.degree();
}

int Polynomial::max_degree() const noexcept {
  return terms_.empty() ? -1 : terms_.back().index.degree();
}

bool Polynomial::is_homogeneous() const noexcept { return min_degree() == max_degree(); }

Polynomial Polynomial::homogeneous_part(int degree) const {
  Polynomial p(num_dof_, field_);
  for (const Term& t : terms_) {
    if (t.index.degree() == degree) p.terms_.push_back(t);
  }
  return p;
}

Polynomial Polynomial::truncated(int cap) const {
  Polynomial p(num_dof_, field_);
  for (const Term& t : terms_) {
    if (t.index.degree() <= cap) p.terms_.push_back(t);
  }
  return p;
}

double Polynomial::max_abs() const noexcept {
  double m = 0.0;
  for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

double Polynomial::max_imag() const noexcept {
  double m = 0.0;
  for (const Term& t : terms_) m = std::max(m, std::abs(t.coeff.imag()));
  return m;
}

Polynomial Polynomial::as_complex() const {
  Polynomial p = *this;
  p.field_ = Field::complex;
  return p;
}

Polynomial Polynomial::real_part() const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const Term& t : terms_) terms.push_back({t.index, t.coeff.real()});
  return from_terms(num_dof_, Field::real, std::move(terms));
}

Polynomial Polynomial::operator-() const {
  Polynomial p = *this;
  for (Term& t : p.terms_) t.coeff = -t.coeff;
  return p;
}

void require_same_dof(const Polynomial& f, const Polynomial& g) {
  if (f.num_dof() != g.num_dof()) {
    throw DimensionError("operands have different numbers of degrees of freedom (" +
                         std::to_string(f.num_dof()) + " vs " + std::to_string(g.num_dof()) +
                         ")");
  }
}

Polynomial operator+(const Polynomial& f, const Polynomial& g) {
  require_same_dof(f, g);
  std::vector<Term> terms;
  terms.reserve(f.size() + g.size());
  terms.insert(terms.end(), f.terms().begin(), f.terms().end());
  terms.insert(terms.end(), g.terms().begin(), g.terms().end());
  return Polynomial::from_terms(f.num_dof(), join(f.field(), g.field()), std::move(terms));
}

Polynomial operator-(const Polynomial& f, const Polynomial& g) { return f + (-g); }

Polynomial operator*(Complex s, const Polynomial& f) {
  const Field field = s.imag() == 0.0 ? f.field() : Field::complex;
  std::vector<Term> terms;
  terms.reserve(f.size());
  for (const Term& t : f.terms()) terms.push_back({t.index, cmul(s, t.coeff)});
  return Polynomial::from_terms(f.num_dof(), field, std::move(terms));
}

// ---------------------------------------------------------------------------

Polynomial multiply(const Polynomial& f, const Polynomial& g, int cap) {
  require_same_dof(f, g);
  Accumulator acc;
  acc.reserve(f.size() * g.size() / 2 + 1);
  for (const Term& a : f.terms()) {
    const int da = a.index.degree();
    for (const Term& b : g.terms()) {
      const int d = da + b.index.degree();
      if (d > cap) continue;
      if (d > 255) throw DomainError("product degree exceeds 255");
      accumulate(acc, a.index + b.index, cmul(a.coeff, b.coeff));
    }
  }
  return Polynomial::from_terms(f.num_dof(), join(f.field(), g.field()), drain(acc));
}

Polynomial poisson_bracket(const Polynomial& f, const Polynomial& g, int cap) {
  require_same_dof(f, g);
  const int n = f.num_dof();
  Accumulator acc;
  acc.reserve(f.size() * g.size() + 1);
  for (const Term& a : f.terms()) {
    const int da = a.index.degree();
    if (da == 0) continue;
    for (const Term& b : g.terms()) {
      const int db = b.index.degree();
      if (db == 0 || da + db - 2 > cap) continue;
      const MultiIndex sum = a.index + b.index;
      const Complex ab = cmul(a.coeff, b.coeff);
      for (int i = 0; i < n; ++i) {
        const int factor = a.index.j(i) * b.index.k(i) - a.index.k(i) * b.index.j(i);
        if (factor == 0) continue;
        accumulate(acc, sum.drop_pair(i), static_cast<double>(factor) * ab);
      }
    }
  }
  return Polynomial::from_terms(n, join(f.field(), g.field()), drain(acc));
}

Polynomial lie_exp(const Polynomial& chi, const Polynomial& f, int cap) {
  require_same_dof(chi, f);
  if (chi.is_zero()) return f.truncated(cap);
  if (chi.min_degree() < 3) {
    throw NilpotencyError("Lie exponential needs a generating function of degree >= 3, got degree " +
                          std::to_string(chi.min_degree()));
  }
  Polynomial sum = f.truncated(cap);
  Polynomial term = sum;
  for (int m = 1; !term.is_zero(); ++m) {
    term = (1.0 / m) * poisson_bracket(chi, term, cap);
    sum += term;
  }
  return sum;
}

Polynomial derivative(const Polynomial& f, int i, bool wrt_y) {
  if (i < 0 || i >= f.num_dof()) throw DimensionError("derivative variable index out of range");
  std::vector<Term> terms;
  for (const Term& t : f.terms()) {
    const int e = wrt_y ? t.index.k(i) : t.index.j(i);
    if (e == 0) continue;
    const MultiIndex m = wrt_y ? t.index.with_k(i, e - 1) : t.index.with_j(i, e - 1);
    terms.push_back({m, static_cast<double>(e) * t.coeff});
  }
  return Polynomial::from_terms(f.num_dof(), f.field(), std::move(terms));
}

namespace {

template <typename Scalar>
Complex evaluate_impl(const Polynomial& f, std::span<const Scalar> point) {
  const int n = f.num_dof();
  if (static_cast<int>(point.size()) != 2 * n) {
    throw DimensionError("evaluation point must have 2*num_dof = " + std::to_string(2 * n) +
                         " entries, got " + std::to_string(point.size()));
  }
  const int top = std::max(f.max_degree(), 0);
  // powers[v][e] = point[v]^e
  std::vector<std::vector<Scalar>> powers(2 * n, std::vector<Scalar>(top + 1));
  for (int v = 0; v < 2 * n; ++v) {
    powers[v][0] = Scalar(1);
    for (int e = 1; e <= top; ++e) powers[v][e] = powers[v][e - 1] * point[v];
  }
  Complex sum = 0.0;
  for (const Term& t : f.terms()) {
    Scalar m = Scalar(1);
    for (int i = 0; i < n; ++i) {
      m *= powers[i][t.index.j(i)] * powers[n + i][t.index.k(i)];
    }
    sum += t.coeff * Complex(m);
  }
  return sum;
}

}  // namespace

Complex evaluate(const Polynomial& f, std::span<const double> point) {
  return evaluate_impl<double>(f, point);
}

Complex evaluate(const Polynomial& f, std::span<const Complex> point) {
  return evaluate_impl<Complex>(f, point);
}

double evaluate_real(const Polynomial& f, std::span<const double> point) {
  if (f.field() != Field::real) throw RealityError("evaluate_real on a complex polynomial");
  return evaluate(f, point).real();
}

// ---------------------------------------------------------------------------

double theta_weight(int j, int k) {
  if (j < 0 || k < 0) throw DomainError("negative exponent in theta weight");
  if (j == 0 || k == 0) return 1.0;
  const double dj = j, dk = k, s = j + k;
  if (j + k <= 120) {
    return std::sqrt(std::pow(dj, dj) * std::pow(dk, dk) / std::pow(s, s));
  }
  return std::exp(0.5 * (dj * std::log(dj) + dk * std::log(dk) - s * std::log(s)));
}

double theta_weight(std::span<const int> j, std::span<const int> k) {
  if (j.size() != k.size()) throw DimensionError("theta weight parts differ in length");
  double w = 1.0;
  for (std::size_t i = 0; i < j.size(); ++i) w *= theta_weight(j[i], k[i]);
  return w;
}

double theta_weight(const MultiIndex& m, int num_dof) {
  double w = 1.0;
  for (int i = 0; i < num_dof; ++i) w *= theta_weight(m.j(i), m.k(i));
  return w;
}

double polydisc_norm(const Polynomial& f, std::span<const double> radii) {
  const int n = f.num_dof();
  if (static_cast<int>(radii.size()) != n) {
    throw DimensionError("polydisc needs one radius per degree of freedom");
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("polydisc radii must be positive");
  }
  if (f.is_zero()) return 0.0;
  if (!f.is_homogeneous()) {
    throw GradingError("polydisc norm is defined on homogeneous blocks; got degrees " +
                       std::to_string(f.min_degree()) + ".." + std::to_string(f.max_degree()));
  }
  double norm = 0.0;
  for (const Term& t : f.terms()) {
    double w = std::abs(t.coeff);
    for (int i = 0; i < n; ++i) {
      const int j = t.index.j(i), k = t.index.k(i);
      w *= std::pow(radii[i], j + k) * theta_weight(j, k);
    }
    norm += w;
  }
  return norm;
}

// ---------------------------------------------------------------------------

Polynomial linear_substitute(const Polynomial& f, std::span<const double> matrix) {
  const int n = f.num_dof();
  const int dim = 2 * n;
  if (static_cast<int>(matrix.size()) != dim * dim) {
    throw DimensionError("substitution matrix must be 2n x 2n");
  }
  // linear form of every old variable in the new ones
  std::vector<Polynomial> forms;
  forms.reserve(dim);
  for (int a = 0; a < dim; ++a) {
    Polynomial form(n, Field::real);
    for (int b = 0; b < dim; ++b) {
      const double c = matrix[a * dim + b];
      if (c == 0.0) continue;
      form += b < n ? Polynomial::x(n, b, c) : Polynomial::y(n, b - n, c);
    }
    forms.push_back(std::move(form));
  }
  std::vector<std::vector<Polynomial>> powers(dim);
  auto power = [&](int a, int e) -> const Polynomial& {
    auto& cache = powers[a];
    if (cache.empty()) cache.push_back(Polynomial::constant(n, 1.0));
    while (static_cast<int>(cache.size()) <= e) cache.push_back(multiply(cache.back(), forms[a]));
    return cache[e];
  };
  std::vector<Term> out;
  for (const Term& t : f.terms()) {
    Polynomial m = Polynomial::constant(n, t.coeff);
    for (int i = 0; i < n; ++i) {
      if (t.index.j(i) > 0) m = multiply(m, power(i, t.index.j(i)));
      if (t.index.k(i) > 0) m = multiply(m, power(n + i, t.index.k(i)));
    }
    out.insert(out.end(), m.terms().begin(), m.terms().end());
  }
  return Polynomial::from_terms(n, f.field(), std::move(out));
}

namespace {

// Per-pair linear substitution u_old = a u + b v, v_old = c u + d v applied
// independently to every canonical pair.
struct PairMap {
  Complex a, b, c, d;
};

// Coefficients of u^s v^(e-s), s = 0..e, in (a u + b v)^e.
std::vector<Complex> linear_power(Complex a, Complex b, int e) {
  std::vector<Complex> c{1.0};
  for (int step = 0; step < e; ++step) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (std::size_t s = 0; s < c.size(); ++s) {
      next[s] += c[s] * b;
      next[s + 1] += c[s] * a;
    }
    c = std::move(next);
  }
  return c;
}

Polynomial pairwise_substitute(const Polynomial& f, const PairMap& map) {
  const int n = f.num_dof();
  // expansion[(p, q)][s] = coefficient of u^s v^(p+q-s) in (a u + b v)^p (c u + d v)^q
  std::map<std::pair<int, int>, std::vector<Complex>> cache;
  auto expansion = [&](int p, int q) -> const std::vector<Complex>& {
    auto it = cache.find({p, q});
    if (it != cache.end()) return it->second;
    const std::vector<Complex> first = linear_power(map.a, map.b, p);
    const std::vector<Complex> second = linear_power(map.c, map.d, q);
    std::vector<Complex> prod(p + q + 1, 0.0);
    for (int s = 0; s <= p; ++s) {
      for (int t = 0; t <= q; ++t) prod[s + t] += first[s] * second[t];
    }
    return cache.emplace(std::pair{p, q}, std::move(prod)).first->second;
  };

  Accumulator acc;
  acc.reserve(f.size() * 4 + 1);
  std::vector<int> j(n), k(n), pos(n);
  for (const Term& t : f.terms()) {
    std::vector<const std::vector<Complex>*> lists(n);
    for (int i = 0; i < n; ++i) {
      lists[i] = &expansion(t.index.j(i), t.index.k(i));
      pos[i] = 0;
    }
    // odometer over the per-pair expansions
    while (true) {
      Complex c = t.coeff;
      for (int i = 0; i < n; ++i) {
        const int deg = t.index.j(i) + t.index.k(i);
        j[i] = pos[i];
        k[i] = deg - pos[i];
        c = cmul(c, (*lists[i])[pos[i]]);
      }
      if (c != 0.0) accumulate(acc, MultiIndex::from_exponents(j, k), c);
      int i = 0;
      for (; i < n; ++i) {
        if (++pos[i] < static_cast<int>(lists[i]->size())) break;
        pos[i] = 0;
      }
      if (i == n) break;
    }
  }
  return Polynomial::from_terms(n, Field::complex, drain(acc));
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// x = (p + i q)/sqrt2, y = (i p + q)/sqrt2
const PairMap kToComplex{kInvSqrt2, Complex(0.0, kInvSqrt2), Complex(0.0, kInvSqrt2), kInvSqrt2};
// p = (x - i y)/sqrt2, q = (-i x + y)/sqrt2
const PairMap kToReal{kInvSqrt2, Complex(0.0, -kInvSqrt2), Complex(0.0, -kInvSqrt2), kInvSqrt2};

double block_relative_imag(const Polynomial& g) {
  double worst = 0.0;
  std::map<int, double> block_max;
  for (const Term& t : g.terms()) {
    double& m = block_max[t.index.degree()];
    m = std::max(m, std::abs(t.coeff));
  }
  for (const Term& t : g.terms()) {
    const double m = block_max[t.index.degree()];
    if (m > 0.0) worst = std::max(worst, std::abs(t.coeff.imag()) / m);
  }
  return worst;
}

}  // namespace

Polynomial complexify(const Polynomial& f) {
  return pairwise_substitute(f, kToComplex);
}

double reality_residual(const Polynomial& f) {
  return block_relative_imag(pairwise_substitute(f, kToReal));
}

Polynomial realify(const Polynomial& f, double tol) {
  Polynomial g = pairwise_substitute(f, kToReal);
  const double residual = block_relative_imag(g);
  if (residual > tol) {
    throw RealityError("polynomial is not conjugation-symmetric: relative imaginary residual " +
                       std::to_string(residual));
  }
  return g.real_part();
}

}  // namespace bnfstab
