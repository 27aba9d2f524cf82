#include "bnfstab/birkhoff.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "bnfstab/errors.hpp"
#include "bnfstab/spectrum.hpp"

namespace bnfstab {

// ---------------------------------------------------------------------------
// ActionPolynomial

ActionPolynomial::ActionPolynomial(Polynomial in_actions) : poly_(std::move(in_actions)) {
  if (poly_.field() != Field::real) throw RealityError("action polynomial must be real");
  for (const Term& t : poly_.terms()) {
    if (t.index.y_degree() != 0) throw GradingError("action polynomial stores exponents in j only");
  }
}

ActionPolynomial ActionPolynomial::from_complex_chart(const Polynomial& z, double tol) {
  const int n = z.num_dof();
  const double scale = z.max_abs();
  std::vector<Term> terms;
  for (const Term& t : z.terms()) {
    if (!t.index.is_diagonal()) {
      if (std::abs(t.coeff) <= tol * scale) continue;
      throw GradingError("normal-form block has a non-action monomial");
    }
    // (p q)^a = (-i I)^a
    Complex c = t.coeff;
    for (int e = 0; e < t.index.x_degree(); ++e) c *= Complex(0.0, -1.0);
    if (std::abs(c.imag()) > tol * std::max(scale, 1e-300)) {
      throw RealityError("normal-form block has a complex action coefficient");
    }
    std::vector<int> a = t.index.j_vector(n), zero(n, 0);
    terms.push_back({MultiIndex::from_exponents(a, zero), c.real()});
  }
  return ActionPolynomial(Polynomial::from_terms(n, Field::real, std::move(terms)));
}

double ActionPolynomial::evaluate(std::span<const double> actions) const {
  const int n = num_dof();
  if (static_cast<int>(actions.size()) != n) throw DimensionError("one action per degree of freedom");
  std::vector<double> point(2 * n, 0.0);
  std::copy(actions.begin(), actions.end(), point.begin());
  return evaluate_real(poly_, point);
}

std::vector<double> ActionPolynomial::gradient(std::span<const double> actions) const {
  const int n = num_dof();
  if (static_cast<int>(actions.size()) != n) throw DimensionError("one action per degree of freedom");
  std::vector<double> point(2 * n, 0.0);
  std::copy(actions.begin(), actions.end(), point.begin());
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = evaluate_real(derivative(poly_, i, false), point);
  return g;
}

Polynomial ActionPolynomial::to_real_chart() const {
  const int n = num_dof();
  std::vector<std::vector<Polynomial>> powers(n);
  auto power = [&](int i, int e) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(Polynomial::constant(n, 1.0));
    while (static_cast<int>(cache.size()) <= e) {
      cache.push_back(multiply(cache.back(), Polynomial::action(n, i)));
    }
    return cache[e];
  };
  Polynomial out(n, Field::real);
  for (const Term& t : poly_.terms()) {
    Polynomial m = Polynomial::constant(n, t.coeff);
    for (int i = 0; i < n; ++i) {
      if (t.index.j(i) > 0) m = multiply(m, power(i, t.index.j(i)));
    }
    out += m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// NormalFormState

bool NormalFormState::has_first_remainder(int order) const noexcept {
  return order >= 0 && order < static_cast<int>(first_remainder.size()) && order <= r &&
         order <= r_max - 1;
}

const Polynomial& NormalFormState::first_remainder_at(int order) const {
  if (!has_first_remainder(order)) {
    throw OrderOutOfRangeError("no remainder block F^(" + std::to_string(order + 1) +
                               ") stored for order " + std::to_string(order) + " (ledger holds orders 0.." +
                               std::to_string(std::min(r, r_max - 1)) + ")");
  }
  return first_remainder[order];
}

ActionPolynomial NormalFormState::normal_form_actions() const {
  Polynomial sum(num_dof, Field::complex);
  for (int s = 1; s <= r; ++s) sum += z[s];
  return ActionPolynomial::from_complex_chart(sum);
}

Polynomial NormalFormState::current_hamiltonian_real() const {
  Polynomial total = h0;
  for (int s = 1; s <= r; ++s) total += z[s];
  for (int s = r + 1; s <= r_max; ++s) total += remainder[s];
  return realify(total);
}

Polynomial NormalFormState::truncated_normal_form_real(int order) const {
  const Polynomial& f = first_remainder_at(order);
  Polynomial total = h0;
  for (int s = 1; s <= order; ++s) total += z[s];
  return realify(total) + f;
}

// ---------------------------------------------------------------------------
// homological equation

Polynomial h0_complex(std::span<const double> omega) {
  const int n = static_cast<int>(omega.size());
  Polynomial h(n, Field::complex);
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    h += Polynomial::monomial(n, e, e, Complex(0.0, omega[i]));
  }
  return h;
}

HomologicalSolution solve_homological(const Polynomial& q, std::span<const double> omega, double tol) {
  const int n = q.num_dof();
  if (static_cast<int>(omega.size()) != n) throw DimensionError("one frequency per degree of freedom");
  if (!q.is_zero() && !q.is_homogeneous()) throw GradingError("homological equation needs a homogeneous block");
  std::vector<Term> chi_terms, z_terms;
  for (const Term& t : q.terms()) {
    if (t.index.is_diagonal()) {
      z_terms.push_back(t);
      continue;
    }
    double divisor = 0.0;
    for (int i = 0; i < n; ++i) divisor += omega[i] * (t.index.k(i) - t.index.j(i));
    if (std::abs(divisor) <= tol) {
      std::vector<int> k(n);
      for (int i = 0; i < n; ++i) k[i] = t.index.k(i) - t.index.j(i);
      std::ostringstream msg;
      msg << "small divisor |<k, omega>| = " << std::abs(divisor) << " <= " << tol << " at k = (";
      for (int i = 0; i < n; ++i) msg << (i ? ", " : "") << k[i];
      msg << ")";
      throw SmallDivisorError(msg.str(), std::move(k), std::abs(divisor), -1);
    }
    // c / (i d) = -i c / d
    chi_terms.push_back({t.index, Complex(t.coeff.imag() / divisor, -t.coeff.real() / divisor)});
  }
  return {Polynomial::from_terms(n, Field::complex, std::move(chi_terms)),
          Polynomial::from_terms(n, Field::complex, std::move(z_terms))};
}

double homological_residual(const Polynomial& q, const HomologicalSolution& sol,
                            std::span<const double> omega) {
  const Polynomial along_flow = poisson_bracket(sol.chi, h0_complex(omega));
  const Polynomial residual = along_flow - sol.z + q;
  return residual.max_abs() / std::max(1.0, q.max_abs());
}

// ---------------------------------------------------------------------------
// normalization

NormalFormState initial_state(const GradedSeries& h, std::span<const double> omega, int r_max) {
  const int n = h.num_dof();
  if (static_cast<int>(omega.size()) != n) throw DimensionError("one frequency per degree of freedom");
  if (r_max < 1) throw DomainError("r_max must be >= 1");
  if (h.field() != Field::real) throw RealityError("input Hamiltonian must be real");
  for (int d = 0; d <= std::min(1, h.dmax()); ++d) {
    if (!h.component(d).is_zero()) {
      throw DomainError("Hamiltonian has terms of degree " + std::to_string(d) +
                        "; expand about an equilibrium and drop the constant");
    }
  }
  const Polynomial quadratic = h.dmax() >= 2 ? h.component(2) : Polynomial(n);
  const Polynomial expected = oscillator(omega);
  const double mismatch = (quadratic - expected).max_abs();
  if (mismatch > 1e-12 * std::max(1.0, expected.max_abs())) {
    throw DomainError("quadratic part is not sum omega_j/2 (x_j^2 + y_j^2) for the given omega; "
                      "diagonalize it first");
  }

  NormalFormState state;
  state.num_dof = n;
  state.r = 0;
  state.r_max = r_max;
  state.omega.assign(omega.begin(), omega.end());
  state.h0 = h0_complex(omega);
  state.z.assign(r_max + 1, Polynomial(n, Field::complex));
  state.chi.assign(r_max + 1, Polynomial(n, Field::complex));
  state.remainder.assign(r_max + 1, Polynomial(n, Field::complex));
  for (int s = 1; s <= r_max; ++s) {
    const int d = s + 2;
    if (d <= h.dmax()) state.remainder[s] = complexify(h.component(d));
  }
  state.first_remainder.push_back(realify(state.remainder[1]));
  state.homological_residual.assign(1, 0.0);
  return state;
}

namespace {

// sum_{m >= 1} L_chi^m f / m!, truncated at cap
Polynomial lie_increments(const Polynomial& chi, const Polynomial& f, int cap) {
  Polynomial sum(f.num_dof(), join(chi.field(), f.field()));
  Polynomial term = f;
  for (int m = 1;; ++m) {
    term = (1.0 / m) * poisson_bracket(chi, term, cap);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum;
}

void advance(NormalFormState& state, double tol) {
  const int r = state.r + 1;
  if (r > state.r_max) {
    throw OrderOutOfRangeError("ledger already normalized to r_max = " + std::to_string(state.r_max));
  }
  const int n = state.num_dof;
  const int cap = state.degree_cap();
  const Polynomial& q = state.remainder[r];

  HomologicalSolution sol;
  try {
    sol = solve_homological(q, state.omega, tol);
  } catch (const SmallDivisorError& e) {
    throw SmallDivisorError(std::string("order ") + std::to_string(r) + ": " + e.what(), e.k(),
                            e.divisor(), r);
  }
  const double residual = homological_residual(q, sol, state.omega);

  if (!sol.chi.is_zero()) {
    Polynomial current = state.h0;
    for (int s = 1; s < r; ++s) current += state.z[s];
    for (int s = r; s <= state.r_max; ++s) current += state.remainder[s];
    const Polynomial increments = lie_increments(sol.chi, current, cap);
    // degrees <= r+1 are untouched; degree r+2 becomes Z_r by construction
    std::vector<std::vector<Term>> bins(cap + 1);
    for (const Term& t : increments.terms()) bins[t.index.degree()].push_back(t);
    for (int s = r + 1; s <= state.r_max; ++s) {
      auto& bin = bins[s + 2];
      bin.insert(bin.end(), state.remainder[s].terms().begin(), state.remainder[s].terms().end());
      state.remainder[s] = Polynomial::from_terms(n, Field::complex, std::move(bin));
    }
  }
  state.remainder[r] = Polynomial(n, Field::complex);
  state.z[r] = std::move(sol.z);
  state.chi[r] = std::move(sol.chi);
  state.r = r;
  state.homological_residual.push_back(residual);
  if (r <= state.r_max - 1) state.first_remainder.push_back(realify(state.remainder[r + 1]));
}

}  // namespace

NormalFormState normalize_step(NormalFormState state, double tol) {
  advance(state, tol);
  return state;
}

NormalFormResult birkhoff_normal_form(const GradedSeries& h, std::span<const double> omega, int r_max,
                                      double tol) {
  if (tol < 0) tol = default_resonance_tolerance(omega);
  NormalFormResult result{initial_state(h, omega, r_max), std::nullopt};
  while (result.state.r < r_max) {
    try {
      advance(result.state, tol);
    } catch (const SmallDivisorError& e) {
      result.failure = NormalFormFailure{e.order(), e.k(), e.divisor(), e.what()};
      break;
    }
  }
  return result;
}

std::vector<double> frequencies_of_actions(const NormalFormState& state,
                                           std::span<const double> actions) {
  for (double a : actions) {
    if (a < 0) throw DomainError("actions must be nonnegative");
  }
  std::vector<double> g = state.normal_form_actions().gradient(actions);
  for (int i = 0; i < state.num_dof; ++i) g[i] += state.omega[i];
  return g;
}

// ---------------------------------------------------------------------------
// coordinate transformation

namespace {

struct FlowField {
  int n;
  std::vector<Polynomial> dchi_dx;
  std::vector<Polynomial> dchi_dy;
  double sign;

  // x' = sign * dchi/dy, y' = -sign * dchi/dx
  void operator()(const std::vector<double>& z, std::vector<double>& dz, double) const {
    for (int i = 0; i < n; ++i) {
      dz[i] = sign * evaluate_real(dchi_dy[i], z);
      dz[n + i] = -sign * evaluate_real(dchi_dx[i], z);
    }
  }
};

std::vector<double> time_one_flow(const Polynomial& chi_real, std::vector<double> z, double sign) {
  const int n = chi_real.num_dof();
  FlowField field{n, {}, {}, sign};
  for (int i = 0; i < n; ++i) {
    field.dchi_dx.push_back(derivative(chi_real, i, false));
    field.dchi_dy.push_back(derivative(chi_real, i, true));
  }
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(1e-15, 1e-15, odeint::runge_kutta_cash_karp54<std::vector<double>>());
  odeint::integrate_adaptive(stepper, field, z, 0.0, 1.0, 1e-3);
  return z;
}

}  // namespace

std::vector<double> compose_transform(const NormalFormState& state, std::span<const double> point,
                                      Direction direction) {
  const int n = state.num_dof;
  if (static_cast<int>(point.size()) != 2 * n) throw DimensionError("point must have 2n entries");
  std::vector<double> z(point.begin(), point.end());
  std::vector<int> orders;
  for (int s = 1; s <= state.r; ++s) {
    if (!state.chi[s].is_zero()) orders.push_back(s);
  }
  if (direction == Direction::inverse) std::reverse(orders.begin(), orders.end());
  const double sign = direction == Direction::forward ? 1.0 : -1.0;
  for (int s : orders) z = time_one_flow(realify(state.chi[s]), std::move(z), sign);
  return z;
}

// ---------------------------------------------------------------------------
// text format

void write_state(std::ostream& out, const NormalFormState& state) {
  out << "NFS n=" << state.num_dof << " rmax=" << state.r_max << " r=" << state.r << '\n';
  out << "OMEGA";
  for (double w : state.omega) out << ' ' << io::format_double(w);
  out << '\n';
  for (int s = 1; s < static_cast<int>(state.homological_residual.size()); ++s) {
    out << "RESIDUAL s=" << s << ' ' << io::format_double(state.homological_residual[s]) << '\n';
  }
  out << "H0\n";
  io::write_terms(out, oscillator(state.omega));
  for (int s = 1; s <= state.r; ++s) {
    out << "Z s=" << s << " chart=complex\n";
    io::write_terms(out, state.z[s].as_complex());
  }
  for (int s = 1; s <= state.r; ++s) {
    out << "CHI s=" << s << " chart=complex\n";
    io::write_terms(out, state.chi[s].as_complex());
  }
  for (int q = 0; q < static_cast<int>(state.first_remainder.size()); ++q) {
    out << "F s=" << q + 1 << " r=" << q << '\n';
    io::write_terms(out, state.first_remainder[q]);
  }
  for (int s = state.r + 1; s <= state.r_max; ++s) {
    out << "R s=" << s << " chart=complex\n";
    io::write_terms(out, state.remainder[s].as_complex());
  }
  out << "END\n";
}

NormalFormState read_state(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = io::tokenize(line);
  }
  if (header.empty() || header[0] != "NFS") throw ParseError("expected NFS header", line_no);
  NormalFormState state;
  state.num_dof = io::parse_int(io::header_value(header, "n", line_no), line_no);
  state.r_max = io::parse_int(io::header_value(header, "rmax", line_no), line_no);
  state.r = io::parse_int(io::header_value(header, "r", line_no), line_no);
  const int n = state.num_dof;
  if (n < 1 || n > kMaxDof) throw ParseError("n out of range", line_no);
  if (state.r_max < 1 || state.r < 0 || state.r > state.r_max) throw ParseError("inconsistent orders", line_no);

  state.z.assign(state.r_max + 1, Polynomial(n, Field::complex));
  state.chi.assign(state.r_max + 1, Polynomial(n, Field::complex));
  state.remainder.assign(state.r_max + 1, Polynomial(n, Field::complex));
  state.first_remainder.assign(std::min(state.r, state.r_max - 1) + 1, Polynomial(n, Field::real));
  state.homological_residual.assign(state.r + 1, 0.0);

  enum class Section { none, h0, z, chi, f, rem };
  Section section = Section::none;
  int index = 0;
  std::vector<Term> terms;
  std::vector<bool> seen_f(state.first_remainder.size(), false);
  bool ended = false, have_omega = false;

  auto complex_section = [&]() { return section == Section::z || section == Section::chi || section == Section::rem; };
  auto flush = [&]() {
    Polynomial p = Polynomial::from_terms(n, complex_section() ? Field::complex : Field::real, std::move(terms));
    terms.clear();
    switch (section) {
      case Section::none:
      case Section::h0:
        break;
      case Section::z:
        state.z[index] = std::move(p);
        break;
      case Section::chi:
        state.chi[index] = std::move(p);
        break;
      case Section::f:
        state.first_remainder[index] = std::move(p);
        seen_f[index] = true;
        break;
      case Section::rem:
        state.remainder[index] = std::move(p);
        break;
    }
  };
  auto require_complex_chart = [&](const std::vector<std::string>& tok) {
    if (io::header_value(tok, "chart", line_no) != "complex") throw ParseError("expected chart=complex", line_no);
  };
  auto order_arg = [&](const std::vector<std::string>& tok, const std::string& key, int lo, int hi) {
    const int v = io::parse_int(io::header_value(tok, key, line_no), line_no);
    if (v < lo || v > hi) throw ParseError(key + "=" + std::to_string(v) + " out of range", line_no);
    return v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = io::tokenize(line);
    if (tok.empty()) continue;
    if (ended) throw ParseError("content after END", line_no);
    const std::string& key = tok[0];
    if (key == "OMEGA") {
      if (static_cast<int>(tok.size()) != n + 1) throw ParseError("OMEGA needs n values", line_no);
      for (int i = 0; i < n; ++i) state.omega.push_back(io::parse_double(tok[1 + i], line_no));
      have_omega = true;
    } else if (key == "RESIDUAL") {
      const int s = order_arg(tok, "s", 1, state.r);
      if (tok.size() != 3) throw ParseError("RESIDUAL needs one value", line_no);
      state.homological_residual[s] = io::parse_double(tok[2], line_no);
    } else if (key == "H0") {
      flush();
      section = Section::h0;
    } else if (key == "Z") {
      flush();
      section = Section::z;
      index = order_arg(tok, "s", 1, state.r);
      require_complex_chart(tok);
    } else if (key == "CHI") {
      flush();
      section = Section::chi;
      index = order_arg(tok, "s", 1, state.r);
      require_complex_chart(tok);
    } else if (key == "F") {
      flush();
      section = Section::f;
      index = order_arg(tok, "r", 0, static_cast<int>(state.first_remainder.size()) - 1);
      if (order_arg(tok, "s", 1, state.r_max) != index + 1) throw ParseError("F block needs s = r + 1", line_no);
    } else if (key == "R") {
      flush();
      section = Section::rem;
      index = order_arg(tok, "s", state.r + 1, state.r_max);
      require_complex_chart(tok);
    } else if (key == "END") {
      flush();
      section = Section::none;
      ended = true;
    } else {
      if (section == Section::none) throw ParseError("term outside of a section", line_no);
      Term t;
      io::parse_term_line(line, n, complex_section() ? Field::complex : Field::real, line_no, t);
      terms.push_back(t);
    }
  }
  if (!ended) throw ParseError("missing END", line_no);
  if (!have_omega) throw ParseError("missing OMEGA", line_no);
  for (std::size_t q = 0; q < seen_f.size(); ++q) {
    if (!seen_f[q]) throw ParseError("missing F block for order " + std::to_string(q), line_no);
  }
  state.h0 = h0_complex(state.omega);
  return state;
}

}  // namespace bnfstab
