#include "bnfstab/graded_series.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "bnfstab/errors.hpp"

namespace bnfstab {

GradedSeries::GradedSeries(int num_dof, int dmax, Field field)
    : num_dof_(num_dof), dmax_(dmax), field_(field) {
  if (dmax < 0) throw DomainError("series truncation degree must be >= 0");
  components_.assign(dmax + 1, Polynomial(num_dof, field));
}

GradedSeries GradedSeries::from_polynomial(const Polynomial& p, int dmax) {
  GradedSeries s(p.num_dof(), dmax, p.field());
  std::vector<std::vector<Term>> blocks(dmax + 1);
  for (const Term& t : p.terms()) {
    const int d = t.index.degree();
    if (d <= dmax) blocks[d].push_back(t);
  }
  for (int d = 0; d <= dmax; ++d) {
    s.components_[d] = Polynomial::from_terms(p.num_dof(), p.field(), std::move(blocks[d]));
  }
  return s;
}

int GradedSeries::dmin() const noexcept {
  for (int d = 0; d <= dmax_; ++d) {
    if (!components_[d].is_zero()) return d;
  }
  return -1;
}

const Polynomial& GradedSeries::component(int degree) const {
  if (degree < 0 || degree > dmax_) {
    throw GradingError("series component " + std::to_string(degree) + " outside 0.." +
                       std::to_string(dmax_));
  }
  return components_[degree];
}

void GradedSeries::set_component(int degree, Polynomial p) {
  if (degree < 0 || degree > dmax_) {
    throw GradingError("series component " + std::to_string(degree) + " outside 0.." +
                       std::to_string(dmax_));
  }
  if (p.num_dof() != num_dof_) throw DimensionError("series component has wrong num_dof");
  if (!p.is_zero() && (!p.is_homogeneous() || p.min_degree() != degree)) {
    throw GradingError("component " + std::to_string(degree) + " must be homogeneous of that degree");
  }
  if (p.field() == Field::complex && field_ == Field::real) {
    throw RealityError("complex component in a real series");
  }
  components_[degree] = field_ == Field::complex ? p.as_complex() : std::move(p);
}

Polynomial GradedSeries::to_polynomial() const {
  std::vector<Term> terms;
  for (const Polynomial& c : components_) terms.insert(terms.end(), c.terms().begin(), c.terms().end());
  return Polynomial::from_terms(num_dof_, field_, std::move(terms));
}

namespace io {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, int line) {
  if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* first = token.data();
  if (!token.empty() && token[0] == '+') ++first;
  auto res = std::from_chars(first, token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty()) {
    throw ParseError("invalid number '" + token + "'", line);
  }
  return v;
}

int parse_int(const std::string& token, int line) {
  int v = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty()) {
    throw ParseError("invalid integer '" + token + "'", line);
  }
  return v;
}

std::vector<std::string> tokenize(const std::string& line) {
  const auto hash = line.find('#');
  std::istringstream ss(hash == std::string::npos ? line : line.substr(0, hash));
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string header_value(const std::vector<std::string>& tokens, const std::string& key, int line) {
  const std::string prefix = key + "=";
  for (const auto& t : tokens) {
    if (t.rfind(prefix, 0) == 0) return t.substr(prefix.size());
  }
  throw ParseError("header is missing '" + key + "='", line);
}

void write_terms(std::ostream& out, const Polynomial& p) {
  const int n = p.num_dof();
  for (const Term& t : p.terms()) {
    out << t.index.degree();
    for (int i = 0; i < n; ++i) out << ' ' << t.index.j(i);
    for (int i = 0; i < n; ++i) out << ' ' << t.index.k(i);
    out << ' ' << format_double(t.coeff.real());
    if (p.field() == Field::complex) out << ' ' << format_double(t.coeff.imag());
    out << '\n';
  }
}

void write_series(std::ostream& out, const GradedSeries& s) {
  out << "HAM n=" << s.num_dof() << " dmax=" << s.dmax()
      << " field=" << (s.field() == Field::real ? "real" : "complex") << '\n';
  for (int d = 0; d <= s.dmax(); ++d) write_terms(out, s.component(d));
}

std::string series_to_string(const GradedSeries& s) {
  std::ostringstream ss;
  write_series(ss, s);
  return ss.str();
}

bool parse_term_line(const std::string& raw, int num_dof, Field field, int line_no, Term& term) {
  const auto tok = tokenize(raw);
  if (tok.empty()) return false;
  const std::size_t expected = 1 + 2 * num_dof + (field == Field::complex ? 2 : 1);
  if (tok.size() != expected) {
    throw ParseError("term line needs " + std::to_string(expected) + " fields, got " +
                         std::to_string(tok.size()),
                     line_no);
  }
  const int degree = parse_int(tok[0], line_no);
  std::vector<int> j(num_dof), k(num_dof);
  int total = 0;
  for (int i = 0; i < num_dof; ++i) {
    j[i] = parse_int(tok[1 + i], line_no);
    k[i] = parse_int(tok[1 + num_dof + i], line_no);
    if (j[i] < 0 || k[i] < 0) throw ParseError("negative exponent", line_no);
    total += j[i] + k[i];
  }
  if (total != degree) {
    throw ParseError("declared degree " + std::to_string(degree) + " but exponents sum to " +
                         std::to_string(total),
                     line_no);
  }
  const double re = parse_double(tok[1 + 2 * num_dof], line_no);
  const double im = field == Field::complex ? parse_double(tok[2 + 2 * num_dof], line_no) : 0.0;
  term.index = MultiIndex::from_exponents(j, k);
  term.coeff = Complex(re, im);
  return true;
}

GradedSeries read_series(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = tokenize(line);
  }
  if (header.empty() || header[0] != "HAM") throw ParseError("expected HAM header", line_no);
  const int n = parse_int(header_value(header, "n", line_no), line_no);
  const int dmax = parse_int(header_value(header, "dmax", line_no), line_no);
  const std::string field_name = header_value(header, "field", line_no);
  if (n < 1 || n > kMaxDof) throw ParseError("n out of range", line_no);
  if (dmax < 0) throw ParseError("dmax must be >= 0", line_no);
  Field field;
  if (field_name == "real") {
    field = Field::real;
  } else if (field_name == "complex") {
    field = Field::complex;
  } else {
    throw ParseError("field must be real or complex", line_no);
  }
  std::vector<Term> terms;
  std::set<MultiIndex> seen;
  while (std::getline(in, line)) {
    ++line_no;
    Term t;
    if (!parse_term_line(line, n, field, line_no, t)) continue;
    if (t.index.degree() > dmax) throw ParseError("term degree exceeds dmax", line_no);
    if (!seen.insert(t.index).second) throw ParseError("duplicate monomial", line_no);
    terms.push_back(t);
  }
  return GradedSeries::from_polynomial(Polynomial::from_terms(n, field, std::move(terms)), dmax);
}

GradedSeries series_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_series(ss);
}

}  // namespace io

}  // namespace bnfstab
