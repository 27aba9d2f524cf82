#include "bnfstab/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bnfstab/errors.hpp"

namespace bnfstab {

double Frequencies::max_abs() const noexcept {
  double m = 0.0;
  for (double w : omega) m = std::max(m, std::abs(w));
  return m;
}

Eigen::MatrixXd symplectic_form(int num_dof) {
  const int n = num_dof;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return j;
}

double LinearSymplecticMap::symplectic_defect() const {
  const int n = static_cast<int>(matrix.rows()) / 2;
  const Eigen::MatrixXd j = symplectic_form(n);
  return (matrix.transpose() * j * matrix - j).cwiseAbs().maxCoeff();
}

namespace {

void require_quadratic(const Polynomial& h2) {
  if (h2.field() != Field::real) throw DomainError("quadratic form must be real");
  if (!h2.is_zero() && (!h2.is_homogeneous() || h2.min_degree() != 2)) {
    throw GradingError("expected a homogeneous polynomial of degree 2");
  }
}

// component index of variable: x_i -> i, y_i -> n + i
int variable_of(const MultiIndex& m, int n, int skip_first) {
  int seen = 0;
  for (int i = 0; i < n; ++i) {
    for (int e = 0; e < m.j(i); ++e) {
      if (seen++ == skip_first) return i;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int e = 0; e < m.k(i); ++e) {
      if (seen++ == skip_first) return n + i;
    }
  }
  return -1;
}

struct Mode {
  double omega;
  Eigen::VectorXd u;
  Eigen::VectorXd w;
};

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

Eigen::MatrixXd hessian(const Polynomial& h2) {
  require_quadratic(h2);
  const int n = h2.num_dof();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (const Term& t : h2.terms()) {
    const int a = variable_of(t.index, n, 0);
    const int b = variable_of(t.index, n, 1);
    const double c = t.coeff.real();
    if (a == b) {
      s(a, a) += 2.0 * c;
    } else {
      s(a, b) += c;
      s(b, a) += c;
    }
  }
  return s;
}

Polynomial oscillator(std::span<const double> omega) {
  const int n = static_cast<int>(omega.size());
  Polynomial h(n, Field::real);
  for (int i = 0; i < n; ++i) h += omega[i] * Polynomial::action(n, i);
  return h;
}

std::vector<double> diagonal_frequencies(const Polynomial& h2, double rel_tol) {
  require_quadratic(h2);
  const int n = h2.num_dof();
  const double scale = h2.max_abs();
  if (scale == 0.0) return {};
  std::vector<double> cx(n, 0.0), cy(n, 0.0);
  for (const Term& t : h2.terms()) {
    const double c = t.coeff.real();
    bool matched = false;
    for (int i = 0; i < n && !matched; ++i) {
      if (t.index.j(i) == 2) {
        cx[i] = c;
        matched = true;
      } else if (t.index.k(i) == 2) {
        cy[i] = c;
        matched = true;
      }
    }
    if (!matched && std::abs(c) > rel_tol * scale) return {};
  }
  std::vector<double> omega(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(cx[i] - cy[i]) > rel_tol * scale) return {};
    omega[i] = cx[i] + cy[i];
  }
  return omega;
}

Diagonalization diagonalize_quadratic(const Polynomial& h2) {
  require_quadratic(h2);
  const int n = h2.num_dof();
  const Eigen::MatrixXd j = symplectic_form(n);
  const Eigen::MatrixXd s = hessian(h2);
  const Eigen::MatrixXd a = j * s;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw NotEllipticError("quadratic form vanishes: degenerate equilibrium");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw ConditioningError("eigenvalue solver did not converge");
  const Eigen::VectorXcd values = solver.eigenvalues();
  const Eigen::MatrixXcd vectors = solver.eigenvectors();

  std::vector<int> upper;
  for (int i = 0; i < 2 * n; ++i) {
    const std::complex<double> lambda = values[i];
    if (std::abs(lambda.real()) > 1e-9 * scale) {
      throw NotEllipticError("eigenvalue with nonzero real part: equilibrium is not elliptic");
    }
    if (std::abs(lambda.imag()) <= 1e-9 * scale) {
      throw NotEllipticError("zero eigenvalue: degenerate equilibrium");
    }
    if (lambda.imag() > 0) upper.push_back(i);
  }
  if (static_cast<int>(upper.size()) != n) {
    throw NotEllipticError("eigenvalues do not come in conjugate imaginary pairs");
  }
  for (std::size_t p = 0; p < upper.size(); ++p) {
    for (std::size_t q = p + 1; q < upper.size(); ++q) {
      if (std::abs(values[upper[p]].imag() - values[upper[q]].imag()) <= 1e-8 * scale) {
        throw NotEllipticError("repeated eigenvalue pair: frequencies are not simple");
      }
    }
  }

  std::vector<Mode> modes;
  for (int idx : upper) {
    Eigen::VectorXcd v = vectors.col(idx);
    const double nu = values[idx].imag();
    double sign = 1.0;
    const double sigma = v.real().dot(j * v.imag());
    if (std::abs(sigma) <= 1e-10 * v.squaredNorm()) {
      throw ConditioningError("eigenvector has vanishing symplectic product: near-defective pencil");
    }
    if (sigma < 0) {
      v = v.conjugate();
      sign = -1.0;
    }
    // fix the phase: largest component (first among near-ties) made real positive
    const double vmax = v.cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    while (std::abs(v[pivot]) < (1.0 - 1e-8) * vmax) ++pivot;
    v *= std::conj(v[pivot]) / std::abs(v[pivot]);
    Eigen::VectorXd u = v.real();
    Eigen::VectorXd w = v.imag();
    const double norm = u.dot(j * w);
    u /= std::sqrt(norm);
    w /= std::sqrt(norm);
    modes.push_back({sign * nu, std::move(u), std::move(w)});
  }
  std::sort(modes.begin(), modes.end(), [](const Mode& p, const Mode& q) {
    if (std::abs(p.omega) != std::abs(q.omega)) return std::abs(p.omega) > std::abs(q.omega);
    if (lex_less(p.u, q.u)) return true;
    if (lex_less(q.u, p.u)) return false;
    return lex_less(p.w, q.w);
  });

  Diagonalization out;
  out.map.matrix = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    out.frequencies.omega.push_back(modes[i].omega);
    out.map.matrix.col(i) = modes[i].u;
    out.map.matrix.col(n + i) = modes[i].w;
  }
  out.map.inverse = -j * out.map.matrix.transpose() * j;

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double inv_defect = (out.map.inverse * out.map.matrix - id).cwiseAbs().maxCoeff();
  if (out.map.symplectic_defect() > 1e-10 || inv_defect > 1e-10) {
    throw ConditioningError("symplectic normalization lost accuracy");
  }
  const Polynomial residual =
      push_forward(h2, out.map) - oscillator(out.frequencies.omega);
  if (residual.max_abs() > 1e-10 * std::max(1.0, out.frequencies.max_abs())) {
    throw ConditioningError("diagonalized quadratic form has off-diagonal residual " +
                            std::to_string(residual.max_abs()));
  }
  return out;
}

Polynomial push_forward(const Polynomial& f, const LinearSymplecticMap& map) {
  const int dim = static_cast<int>(map.matrix.rows());
  if (dim != 2 * f.num_dof()) throw DimensionError("map dimension does not match polynomial");
  std::vector<double> rowmajor(dim * dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) rowmajor[r * dim + c] = map.matrix(r, c);
  }
  return linear_substitute(f, rowmajor);
}

GradedSeries push_forward(const GradedSeries& s, const LinearSymplecticMap& map) {
  return GradedSeries::from_polynomial(push_forward(s.to_polynomial(), map), s.dmax());
}

double default_resonance_tolerance(std::span<const double> omega) {
  double m = 0.0;
  for (double w : omega) m = std::max(m, std::abs(w));
  return 1e-10 * m;
}

namespace {

struct Candidate {
  double divisor;
  int norm;
  std::vector<int> k;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.divisor != b.divisor) return a.divisor < b.divisor;
  if (a.norm != b.norm) return a.norm < b.norm;
  return a.k < b.k;
}

template <typename Visit>
void enumerate(int n, int k_max, std::vector<int>& k, int pos, int used, bool leading, Visit& visit) {
  if (pos == n) {
    if (used > 0) visit(k, used);
    return;
  }
  const int budget = k_max - used;
  // leading: no nonzero entry yet, so this one must be >= 0
  for (int v = leading ? 0 : -budget; v <= budget; ++v) {
    k[pos] = v;
    enumerate(n, k_max, k, pos + 1, used + std::abs(v), leading && v == 0, visit);
  }
  k[pos] = 0;
}

double dot(std::span<const int> k, std::span<const double> omega) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * omega[i];
  return s;
}

}  // namespace

ResonanceCertificate resonance_certificate(std::span<const double> omega, int k_max, double tol,
                                           double tau_dioph) {
  const int n = static_cast<int>(omega.size());
  if (n < 1) throw DimensionError("empty frequency vector");
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  for (double w : omega) {
    if (!std::isfinite(w)) throw DomainError("frequencies must be finite");
  }
  ResonanceCertificate cert;
  cert.omega.assign(omega.begin(), omega.end());
  cert.k_max = k_max;
  cert.tol = tol;
  cert.tau_dioph = tau_dioph < 0 ? static_cast<double>(n) : tau_dioph;

  Candidate best{std::numeric_limits<double>::infinity(), 0, {}};
  std::vector<std::pair<double, int>> samples;  // (divisor, |k|)
  std::vector<int> k(n, 0);
  auto visit = [&](const std::vector<int>& kk, int norm) {
    const double d = std::abs(dot(kk, omega));
    samples.push_back({d, norm});
    Candidate c{d, norm, kk};
    if (best.k.empty() || better(c, best)) best = std::move(c);
  };
  enumerate(n, k_max, k, 0, 0, true, visit);

  cert.min_divisor = best.divisor;
  cert.argmin_k = best.k;
  double gamma = std::numeric_limits<double>::infinity();
  for (const auto& [d, norm] : samples) gamma = std::min(gamma, d * std::pow(norm, cert.tau_dioph));
  // shave ulps until the bound holds for every sample in floating point
  auto holds = [&](double g) {
    for (const auto& [d, norm] : samples) {
      if (d < g * std::pow(norm, -cert.tau_dioph)) return false;
    }
    return true;
  };
  while (gamma > 0.0 && !holds(gamma)) gamma = std::nextafter(gamma, 0.0);
  cert.gamma = gamma;
  cert.certified = cert.min_divisor > tol;
  return cert;
}

ResonanceCertificate check_nonresonance(std::span<const double> omega, int k_max, double tol) {
  ResonanceCertificate cert = resonance_certificate(omega, k_max, tol);
  if (!cert.certified) {
    std::ostringstream msg;
    msg << "resonant frequencies: |<k, omega>| = " << cert.min_divisor << " <= " << tol
        << " at k = (";
    for (std::size_t i = 0; i < cert.argmin_k.size(); ++i) {
      msg << (i ? ", " : "") << cert.argmin_k[i];
    }
    msg << ")";
    throw ResonanceError(msg.str(), cert.argmin_k, cert.min_divisor);
  }
  return cert;
}

void write_certificate(std::ostream& out, const ResonanceCertificate& c) {
  out << "omega =";
  for (double w : c.omega) out << ' ' << io::format_double(w);
  out << "\nk_max = " << c.k_max << "\ntol = " << io::format_double(c.tol)
      << "\nmin_divisor = " << io::format_double(c.min_divisor) << "\nargmin_k =";
  for (int v : c.argmin_k) out << ' ' << v;
  out << "\ngamma = " << io::format_double(c.gamma)
      << "\ntau_dioph = " << io::format_double(c.tau_dioph)
      << "\ncertified = " << (c.certified ? "true" : "false") << '\n';
}

ResonanceCertificate read_certificate(std::istream& in) {
  std::map<std::string, std::vector<std::string>> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = io::tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() < 2 || tok[1] != "=") throw ParseError("expected 'key = value'", line_no);
    kv[tok[0]] = std::vector<std::string>(tok.begin() + 2, tok.end());
  }
  auto get = [&](const std::string& key) -> const std::vector<std::string>& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("certificate is missing '" + key + "'", 0);
    return it->second;
  };
  auto scalar = [&](const std::string& key) -> const std::string& {
    const auto& v = get(key);
    if (v.size() != 1) throw ParseError("'" + key + "' needs one value", 0);
    return v[0];
  };
  ResonanceCertificate c;
  for (const auto& t : get("omega")) c.omega.push_back(io::parse_double(t, 0));
  c.k_max = io::parse_int(scalar("k_max"), 0);
  c.tol = io::parse_double(scalar("tol"), 0);
  c.min_divisor = io::parse_double(scalar("min_divisor"), 0);
  for (const auto& t : get("argmin_k")) c.argmin_k.push_back(io::parse_int(t, 0));
  c.gamma = io::parse_double(scalar("gamma"), 0);
  c.tau_dioph = io::parse_double(scalar("tau_dioph"), 0);
  const std::string& flag = scalar("certified");
  if (flag != "true" && flag != "false") throw ParseError("certified must be true or false", 0);
  c.certified = flag == "true";
  return c;
}

}  // namespace bnfstab
