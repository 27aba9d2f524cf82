#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bnfstab/polynomial.hpp"

namespace bnfstab {

/// Truncated power series stored as homogeneous blocks, component d holding
/// the degree-d part (possibly empty) for d = 0..dmax.
class GradedSeries {
 public:
  GradedSeries(int num_dof, int dmax, Field field = Field::real);

  /// Split a polynomial by degree, dropping anything above dmax.
  static GradedSeries from_polynomial(const Polynomial& p, int dmax);

  int num_dof() const noexcept { return num_dof_; }
  int dmax() const noexcept { return dmax_; }
  Field field() const noexcept { return field_; }
  /// Lowest degree with a nonzero component, or -1 when empty.
  int dmin() const noexcept;

  const Polynomial& component(int degree) const;
  void set_component(int degree, Polynomial p);

  Polynomial to_polynomial() const;

 private:
  int num_dof_;
  int dmax_;
  Field field_;
  std::vector<Polynomial> components_;
};

namespace io {

/// Shortest-exact decimal rendering with 17 significant digits.
std::string format_double(double v);
/// Strict parse of a double; accepts "inf", "-inf" and "nan".
double parse_double(const std::string& token, int line);
int parse_int(const std::string& token, int line);

/// One term line: "<degree> <j_1..j_n> <k_1..k_n> <re> [<im>]".
void write_terms(std::ostream& out, const Polynomial& p);

/// Text form of a series: header "HAM n=<dof> dmax=<degree> field=<real|complex>"
/// followed by the term lines in graded lexicographic order.
void write_series(std::ostream& out, const GradedSeries& s);
std::string series_to_string(const GradedSeries& s);

GradedSeries read_series(std::istream& in);
GradedSeries series_from_string(const std::string& text);

/// Parse a single term line for a polynomial with the given shape. Returns
/// false for blank or comment-only lines.
bool parse_term_line(const std::string& raw, int num_dof, Field field, int line_no, Term& term);

/// Split on whitespace after stripping a '#' comment.
std::vector<std::string> tokenize(const std::string& line);

/// "key=value" lookup in a header token list; throws ParseError when absent.
std::string header_value(const std::vector<std::string>& tokens, const std::string& key, int line);

}  // namespace io

}  // namespace bnfstab
