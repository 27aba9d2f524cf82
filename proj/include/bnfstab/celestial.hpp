#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bnfstab {

/// 4 pi^2, the solar mass when G = 1 and lengths are in AU, times in years.
inline constexpr double kSolarMass = 4.0 * 3.141592653589793238462643383279502884 * 3.141592653589793238462643383279502884;

/// Heliocentric osculating elements of one planet.
struct BodyParameters {
  std::string name;
  double mass = 0.0;
  double a = 0.0;
  double mean_anomaly = 0.0;
  double e = 0.0;
  double arg_perihelion = 0.0;
  /// Stored only; the reduced planar model does not use them.
  double inclination = 0.0;
  double node = 0.0;
};

struct ElementSet {
  double G = 1.0;
  double m0 = kSolarMass;
  std::vector<BodyParameters> bodies;
};

struct PoincareState {
  std::vector<std::string> names;
  std::vector<double> Lambda;
  std::vector<double> lambda;
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> mu;
};

/// Lambda = mu sqrt(G (m0 + m) a), mu = m0 m / (m0 + m),
/// xi + i eta = sqrt(2 Lambda) sqrt(1 - sqrt(1 - e^2)) exp(-i omega),
/// lambda = l + omega mod 2 pi.
PoincareState poincare_variables(const ElementSet& elements);

/// Eccentricity from (Lambda, xi, eta) of one body.
double eccentricity(double Lambda, double xi, double eta);

/// R_j = sqrt(xi_j^2 + eta_j^2), placing the given state on the boundary of
/// the unit polydisc.
std::vector<double> secular_radii(const PoincareState& state);

/// Reduce an angle to [0, 2 pi).
double normalize_angle(double angle);

/// Parses "4pi^2", "4pi^2/<x>" or a plain number.
double parse_mass(const std::string& text, int line);

/// Key-value element file: top-level G and m0, then one "[name]" section
/// per body with mass, a, mean_anomaly, e, arg_perihelion, inclination and
/// node. Angles are reduced to [0, 2 pi), except that values already in
/// range are kept bit-exact.
ElementSet read_elements(std::istream& in);
ElementSet elements_from_string(const std::string& text);

/// Names accepted by load_fixture.
std::vector<std::string> fixture_names();
/// Raw text of a built-in fixture.
std::string_view fixture_text(const std::string& name);
ElementSet load_fixture(const std::string& name);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

/// Key-value rendering of a Poincare state and its secular radii.
void write_poincare(std::ostream& out, const PoincareState& state);
PoincareState read_poincare(std::istream& in);

}  // namespace bnfstab
