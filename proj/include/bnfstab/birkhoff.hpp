#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnfstab/graded_series.hpp"
#include "bnfstab/polynomial.hpp"

namespace bnfstab {

/// Polynomial in the actions I_1..I_n. Monomial exponents live in the j part
/// of the multi-index; the k part is always zero.
class ActionPolynomial {
 public:
  explicit ActionPolynomial(int num_dof = 1) : poly_(num_dof, Field::real) {}
  explicit ActionPolynomial(Polynomial in_actions);

  /// Read a complex-chart normal-form block (only p^a q^a monomials) as a
  /// polynomial in I, using p q = -i I.
  static ActionPolynomial from_complex_chart(const Polynomial& z, double tol = 1e-10);

  int num_dof() const noexcept { return poly_.num_dof(); }
  const Polynomial& coefficients() const noexcept { return poly_; }

  double evaluate(std::span<const double> actions) const;
  std::vector<double> gradient(std::span<const double> actions) const;

  /// Expand back into the real chart with I_i = (x_i^2 + y_i^2)/2.
  Polynomial to_real_chart() const;

 private:
  Polynomial poly_;
};

/// Birkhoff ledger. Indices follow the series grading: the block with index
/// s is homogeneous of degree s + 2. Apart from first_remainder, stored
/// polynomials live in the complex chart of complexify().
struct NormalFormState {
  int num_dof = 1;
  /// Highest order normalized so far.
  int r = 0;
  int r_max = 0;
  std::vector<double> omega;
  Polynomial h0;
  /// z[s], chi[s] for s = 1..r (entry 0 unused).
  std::vector<Polynomial> z;
  std::vector<Polynomial> chi;
  /// Unnormalized blocks F^(s) of the current Hamiltonian, s = r+1..r_max.
  std::vector<Polynomial> remainder;
  /// first_remainder[q] is F^(q+1), the lowest unnormalized block right
  /// after normalizing order q, for q = 0..min(r, r_max - 1). Real chart.
  std::vector<Polynomial> first_remainder;
  /// Coefficientwise homological residual at every normalized order,
  /// relative to max(1, max |Q_s|).
  std::vector<double> homological_residual;

  /// Truncation degree of the algebra.
  int degree_cap() const noexcept { return r_max + 2; }

  bool has_first_remainder(int order) const noexcept;
  /// F^(order+1) in the real chart; throws OrderOutOfRangeError when absent.
  const Polynomial& first_remainder_at(int order) const;

  /// Z_1 + ... + Z_r as a polynomial in the actions.
  ActionPolynomial normal_form_actions() const;

  /// Real-chart Hamiltonian H0 + Z_1..Z_r + F^(r+1)..F^(r_max).
  Polynomial current_hamiltonian_real() const;

  /// Real-chart H0 + Z_1..Z_q + F^(q+1): the normal form of order q cut at
  /// its first remainder block.
  Polynomial truncated_normal_form_real(int order) const;
};

struct HomologicalSolution {
  Polynomial chi;
  Polynomial z;
};

/// The oscillator in the complex chart, sum_j i omega_j p_j q_j.
Polynomial h0_complex(std::span<const double> omega);

/// Split Q (complex chart, homogeneous) into Z, the p^a q^a monomials, and
/// chi with coefficient c / (i <omega, k - j>) on the rest. Then
/// {H0, chi} = Q - Z, i.e. the derivative of chi along the H0 flow,
/// {chi, H0}, satisfies {chi, H0} - Z + Q = 0. Throws SmallDivisorError
/// (order = -1) if some divisor is <= tol.
HomologicalSolution solve_homological(const Polynomial& q, std::span<const double> omega, double tol);

/// max |{chi, H0} - Z + Q| / max(1, max |Q|).
double homological_residual(const Polynomial& q, const HomologicalSolution& sol,
                            std::span<const double> omega);

/// Start a ledger from a real series whose quadratic part is the diagonal
/// oscillator with frequencies omega. Components above degree r_max + 2 are
/// dropped; constant or linear terms are rejected.
NormalFormState initial_state(const GradedSeries& h, std::span<const double> omega, int r_max);

/// Normalize order state.r + 1: solve the homological equation for the
/// lowest remainder block, apply exp(L_chi) to every stored block and
/// re-collect by degree up to r_max + 2.
NormalFormState normalize_step(NormalFormState state, double tol);

struct NormalFormFailure {
  int order = 0;
  std::vector<int> k;
  double divisor = 0.0;
  std::string message;
};

struct NormalFormResult {
  NormalFormState state;
  /// Set when a small divisor stopped the construction; state then holds
  /// the last fully normalized order.
  std::optional<NormalFormFailure> failure;
};

/// tol < 0 picks default_resonance_tolerance(omega).
NormalFormResult birkhoff_normal_form(const GradedSeries& h, std::span<const double> omega,
                                      int r_max, double tol = -1.0);

/// Omega(I) = omega + grad_I (Z_1 + ... + Z_r).
std::vector<double> frequencies_of_actions(const NormalFormState& state,
                                           std::span<const double> actions);

enum class Direction { forward, inverse };

/// forward maps original coordinates to normal-form coordinates, inverse the
/// other way. Each chi_s acts through the time-one flow of its Hamiltonian
/// vector field (integrated numerically), so the two directions are exact
/// inverses up to integration error.
std::vector<double> compose_transform(const NormalFormState& state, std::span<const double> point,
                                      Direction direction);

/// Ledger text format, one section per entry ("H0", "Z s=", "CHI s=",
/// "F s= r=", "R s="), terminated by "END". H0 and F are in the real chart;
/// Z, CHI and R carry "chart=complex" and store re/im pairs exactly as held in
/// memory, so write/read/write is byte-stable.
void write_state(std::ostream& out, const NormalFormState& state);
NormalFormState read_state(std::istream& in);

}  // namespace bnfstab
