#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "bnfstab/multi_index.hpp"

namespace bnfstab {

using Complex = std::complex<double>;

/// Coefficient field of a polynomial. Real polynomials store complex
/// coefficients with an exactly zero imaginary part.
enum class Field { real, complex };

inline Field join(Field a, Field b) noexcept {
  return (a == Field::complex || b == Field::complex) ? Field::complex : Field::real;
}

/// Relative cutoff applied per homogeneous block after every operation.
inline constexpr double kPruneThreshold = 1e-15;

/// Degree cap meaning "keep everything".
inline constexpr int kNoCap = std::numeric_limits<int>::max();

struct Term {
  MultiIndex index;
  Complex coeff;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse polynomial in x_1..x_n, y_1..y_n. Terms are kept sorted in graded
/// lexicographic order with no zero or pruned coefficients; values are
/// immutable once built.
class Polynomial {
 public:
  explicit Polynomial(int num_dof = 1, Field field = Field::real);

  /// Merge duplicates, drop zeros and rounding dust, sort.
  static Polynomial from_terms(int num_dof, Field field, std::vector<Term> terms);

  static Polynomial constant(int num_dof, Complex value);
  static Polynomial monomial(int num_dof, std::span<const int> j, std::span<const int> k,
                             Complex coeff);
  static Polynomial x(int num_dof, int i, Complex coeff = 1.0);
  static Polynomial y(int num_dof, int i, Complex coeff = 1.0);
  /// I_i = (x_i^2 + y_i^2) / 2.
  static Polynomial action(int num_dof, int i);

  int num_dof() const noexcept { return num_dof_; }
  Field field() const noexcept { return field_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  std::span<const Term> terms() const noexcept { return terms_; }

  Complex coefficient(const MultiIndex& m) const;

  /// -1 for the zero polynomial.
  int min_degree() const noexcept;
  int max_degree() const noexcept;
  bool is_homogeneous() const noexcept;
  Polynomial homogeneous_part(int degree) const;
  Polynomial truncated(int cap) const;

  double max_abs() const noexcept;
  /// Largest |imaginary part| over all coefficients.
  double max_imag() const noexcept;

  /// Same terms under a complex field tag.
  Polynomial as_complex() const;
  /// Drop imaginary parts, tagging the result real. No checks.
  Polynomial real_part() const;

  /// Same terms with bitwise equal coefficients; the field tag is ignored.
  friend bool operator==(const Polynomial& f, const Polynomial& g) {
    return f.num_dof_ == g.num_dof_ && f.terms_ == g.terms_;
  }

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator-(const Polynomial& f, const Polynomial& g);
  friend Polynomial operator*(Complex s, const Polynomial& f);
  friend Polynomial operator*(const Polynomial& f, Complex s) { return s * f; }
  Polynomial& operator+=(const Polynomial& g) { return *this = *this + g; }
  Polynomial& operator-=(const Polynomial& g) { return *this = *this - g; }

 private:
  int num_dof_;
  Field field_;
  std::vector<Term> terms_;
};

void require_same_dof(const Polynomial& f, const Polynomial& g);

/// Product with every monomial of degree > cap discarded.
Polynomial multiply(const Polynomial& f, const Polynomial& g, int cap = kNoCap);

/// {f,g} = sum_i (df/dx_i dg/dy_i - df/dy_i dg/dx_i), truncated at cap.
Polynomial poisson_bracket(const Polynomial& f, const Polynomial& g, int cap = kNoCap);

/// exp(L_chi) f = sum_m L_chi^m f / m!, with L_chi = {chi, .}. Every term of
/// chi must have degree >= 3 so each application raises the degree.
Polynomial lie_exp(const Polynomial& chi, const Polynomial& f, int cap);

/// Partial derivative in x_i (wrt_y = false) or y_i (wrt_y = true).
Polynomial derivative(const Polynomial& f, int i, bool wrt_y);

/// Point layout is (x_1..x_n, y_1..y_n).
Complex evaluate(const Polynomial& f, std::span<const double> point);
Complex evaluate(const Polynomial& f, std::span<const Complex> point);
/// Real part of evaluate(); the polynomial must be real.
double evaluate_real(const Polynomial& f, std::span<const double> point);

/// Theta weight for one canonical pair, 0^0 = 1.
double theta_weight(int j, int k);
/// Product of per-pair theta weights.
double theta_weight(std::span<const int> j, std::span<const int> k);
double theta_weight(const MultiIndex& m, int num_dof);

/// |f|_R = sum |f_jk| R^(j+k) Theta_jk for a homogeneous f. The supremum of
/// |f| on the polydisc of radii rho*R is then bounded by rho^s |f|_R.
double polydisc_norm(const Polynomial& f, std::span<const double> radii);

/// Substitute each old variable by a linear form in new variables:
/// z_old[a] = sum_b matrix[a*2n + b] z_new[b], with z = (x_1..x_n, y_1..y_n).
Polynomial linear_substitute(const Polynomial& f, std::span<const double> matrix);

/// Real chart (x, y) -> complex chart (p, q) with x = (p + i q)/sqrt 2,
/// y = (i p + q)/sqrt 2, i.e. p = (x - i y)/sqrt 2, q = (y - i x)/sqrt 2.
/// The substitution is canonical ({p, q} = 1) and I = (x^2 + y^2)/2 = i p q.
Polynomial complexify(const Polynomial& f);

/// Inverse of complexify. Throws RealityError when an imaginary residual
/// exceeds tol times the largest coefficient of its homogeneous block.
Polynomial realify(const Polynomial& f, double tol = 1e-10);

/// Largest imaginary residual of the realified polynomial relative to the
/// largest coefficient in its homogeneous block.
double reality_residual(const Polynomial& f);

}  // namespace bnfstab
