#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "bnfstab/celestial.hpp"
#include "bnfstab/errors.hpp"
#include "oracle/poincare_oracle.hpp"

using namespace bnfstab;

namespace {

const char* const kFixtureDigest = "665890467322a6c4";

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("fixture values are exact") {
  const ElementSet s = load_fixture("sjs-jd2451220.5");
  REQUIRE(s.bodies.size() == 2);
  CHECK(s.G == 1.0);
  CHECK(s.m0 == 4.0 * std::numbers::pi * std::numbers::pi);
  const BodyParameters& j = s.bodies[0];
  const BodyParameters& k = s.bodies[1];
  CHECK(j.name == "jupiter");
  CHECK(j.mass == 4.0 * std::numbers::pi * std::numbers::pi / 1047.355);
  CHECK(j.a == 5.20092253448245);
  CHECK(j.mean_anomaly == 6.14053316064644);
  CHECK(j.e == 0.04814707261917873);
  CHECK(j.arg_perihelion == 1.18977636117073);
  CHECK(j.inclination == 0.006301433258242599);
  CHECK(j.node == 3.51164756250381);
  CHECK(k.mass == 4.0 * std::numbers::pi * std::numbers::pi / 3498.5);
  CHECK(k.a == 9.55716977296997);
  CHECK(k.mean_anomaly == 5.37386251998842);
  CHECK(k.e == 0.05381979488308911);
  CHECK(k.arg_perihelion == 5.65165124779163);
  CHECK(k.inclination == 0.01552738031933247);
  CHECK(k.node == 0.370054908914043);
  CHECK_THROWS_AS(load_fixture("sjs-jd0"), UnknownFixtureError);
}

TEST_CASE("fixture integrity") {
  CHECK(digest_hex(fixture_text("sjs-jd2451220.5")) == kFixtureDigest);
  std::ifstream f(std::string(BNFSTAB_SOURCE_DIR) + "/data/sjs-jd2451220.5.txt", std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == fixture_text("sjs-jd2451220.5"));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("Poincare variables of the fixture") {
  const PoincareState st = poincare_variables(load_fixture("sjs-jd2451220.5"));
  const oracle::PoincareRow frozen[] = {oracle::frozen_jupiter(), oracle::frozen_saturn()};
  const oracle::PoincareRow big[] = {
      oracle::multiprecision_row(1047.355, 5.20092253448245, 6.14053316064644, 0.04814707261917873, 1.18977636117073),
      oracle::multiprecision_row(3498.5, 9.55716977296997, 5.37386251998842, 0.05381979488308911, 5.65165124779163)};
  const auto R = secular_radii(st);
  for (int j = 0; j < 2; ++j) {
    for (const auto& o : {frozen[j], big[j]}) {
      CHECK(rel(st.Lambda[j], o.Lambda) < 1e-13);
      CHECK(rel(st.xi[j], o.xi) < 1e-13);
      CHECK(rel(st.eta[j], o.eta) < 1e-13);
      CHECK(rel(st.lambda[j], o.lambda) < 1e-13);
      CHECK(rel(R[j], o.amplitude) < 1e-13);
    }
  }
  const ElementSet s = load_fixture("sjs-jd2451220.5");
  for (int j = 0; j < 2; ++j) CHECK(rel(eccentricity(st.Lambda[j], st.xi[j], st.eta[j]), s.bodies[j].e) < 1e-13);
}

TEST_CASE("conversion properties") {
  ElementSet s;
  s.bodies.push_back({"test", 1e-12, 1.0, 0.3, 0.0, 0.4, 0.0, 0.0});
  const PoincareState st = poincare_variables(s);
  CHECK(st.xi[0] == 0.0);
  CHECK(st.eta[0] == 0.0);
  CHECK_THROWS_AS(secular_radii(st), DegenerateRadiusError);
  const double n = std::sqrt(s.G * (s.m0 + s.bodies[0].mass) / 1.0);
  CHECK(rel(n, 2 * std::numbers::pi) < 1e-10);

  s.bodies[0].e = 1.0;
  CHECK_THROWS_AS(poincare_variables(s), HyperbolicOrbitError);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    ElementSet r;
    const double e = 0.999 * u(rng);
    r.bodies.push_back({"p", 1e-3 * (0.01 + u(rng)), 0.5 + 30 * u(rng), 6.28 * u(rng), e, 6.28 * u(rng), 0.0, 0.0});
    const PoincareState p = poincare_variables(r);
    if (e == 0.0) continue;
    CHECK(rel(eccentricity(p.Lambda[0], p.xi[0], p.eta[0]), e) < 1e-13);
  }

  PoincareState synth;
  synth.names = {"a", "b"};
  synth.xi = {3.0, 0.0};
  synth.eta = {4.0, 1.0};
  CHECK(secular_radii(synth)[0] == 5.0);
  synth.xi = {6.0, 0.0};
  synth.eta = {8.0, 2.0};
  CHECK(secular_radii(synth)[0] == 10.0);
  CHECK(secular_radii(synth)[1] == 2.0);
}

TEST_CASE("element file parsing") {
  const std::string good = "m0 = 4pi^2\n[p]\nmass = 4pi^2/1000\na = 1\nmean_anomaly = 7\ne = 0.1\n"
                           "arg_perihelion = -1\ninclination = 0\nnode = 0\n";
  const ElementSet s = elements_from_string(good);
  CHECK(s.bodies[0].mean_anomaly == Catch::Approx(7 - 2 * std::numbers::pi).epsilon(1e-15));
  CHECK(s.bodies[0].arg_perihelion == Catch::Approx(2 * std::numbers::pi - 1).epsilon(1e-15));
  CHECK(normalize_angle(1.25) == 1.25);

  try {
    elements_from_string("m0 = 4pi^2\n[p]\nmass = 1\na = 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("mean_anomaly") != std::string::npos);
  }
  try {
    elements_from_string("m0 = 4pi^2\n[p]\nmass = 1\na = x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(elements_from_string("[p]\nmass = 1\n"), ParseError);
  CHECK_THROWS_AS(elements_from_string("m0 = 1\nfoo = 2\n"), ParseError);
  CHECK(parse_mass("4pi^2", 0) == kSolarMass);
  CHECK(parse_mass("0.5", 0) == 0.5);
  CHECK_THROWS_AS(parse_mass("4pi^2*3", 0), ParseError);

  const PoincareState st = poincare_variables(load_fixture("sjs-jd2451220.5"));
  std::ostringstream out;
  write_poincare(out, st);
  std::istringstream in(out.str());
  const PoincareState back = read_poincare(in);
  CHECK(back.xi == st.xi);
  CHECK(back.eta == st.eta);
  CHECK(back.names == st.names);
}
