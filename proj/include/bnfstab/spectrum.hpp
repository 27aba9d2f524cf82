#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bnfstab/graded_series.hpp"
#include "bnfstab/polynomial.hpp"

namespace bnfstab {

/// Linear-theory frequencies omega_j of H0 = sum_j omega_j/2 (x_j^2 + y_j^2).
struct Frequencies {
  std::vector<double> omega;

  int size() const noexcept { return static_cast<int>(omega.size()); }
  double max_abs() const noexcept;
};

/// Symplectic change of variables old = matrix * new, coordinates ordered
/// (x_1..x_n, y_1..y_n).
struct LinearSymplecticMap {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;

  /// Max-norm of M^T J M - J.
  double symplectic_defect() const;
};

struct Diagonalization {
  Frequencies frequencies;
  LinearSymplecticMap map;
};

/// Standard symplectic form J = [[0, I], [-I, 0]].
Eigen::MatrixXd symplectic_form(int num_dof);

/// Symmetric matrix S with H2 = z^T S z / 2.
Eigen::MatrixXd hessian(const Polynomial& h2);

/// Bring a real quadratic form with an elliptic equilibrium to
/// sum_j omega_j/2 (x_j^2 + y_j^2). Modes are ordered by descending |omega_j|.
/// omega_j > 0 when the form is positive on the mode's plane.
Diagonalization diagonalize_quadratic(const Polynomial& h2);

/// f(M z) as a polynomial in the new coordinates.
Polynomial push_forward(const Polynomial& f, const LinearSymplecticMap& map);
GradedSeries push_forward(const GradedSeries& s, const LinearSymplecticMap& map);

/// Returns omega when h2 already has the diagonal oscillator form up to a
/// relative tolerance, an empty vector otherwise.
std::vector<double> diagonal_frequencies(const Polynomial& h2, double rel_tol = 1e-14);

/// sum_j omega_j/2 (x_j^2 + y_j^2) in the real chart.
Polynomial oscillator(std::span<const double> omega);

/// Scale-invariant default cutoff 1e-10 * max_j |omega_j|.
double default_resonance_tolerance(std::span<const double> omega);

struct ResonanceCertificate {
  std::vector<double> omega;
  int k_max = 0;
  double tol = 0.0;
  /// min over 0 < |k|_1 <= k_max of |<k, omega>|.
  double min_divisor = 0.0;
  std::vector<int> argmin_k;
  /// Largest gamma with |<k,omega>| >= gamma |k|^-tau_dioph on every
  /// enumerated k.
  double gamma = 0.0;
  double tau_dioph = 0.0;
  bool certified = false;
};

/// Enumerate all integer k with 0 < |k|_1 <= k_max (k and -k counted once,
/// keeping the one whose first nonzero entry is positive). Ties in the
/// minimum go to smaller |k|, then lexicographically smaller k.
/// tau_dioph defaults to n, the first integer above n - 1.
ResonanceCertificate resonance_certificate(std::span<const double> omega, int k_max, double tol,
                                           double tau_dioph = -1.0);

/// Same, but throws ResonanceError naming argmin_k when min_divisor <= tol.
ResonanceCertificate check_nonresonance(std::span<const double> omega, int k_max, double tol);

void write_certificate(std::ostream& out, const ResonanceCertificate& c);
ResonanceCertificate read_certificate(std::istream& in);

}  // namespace bnfstab
