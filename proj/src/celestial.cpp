#include "bnfstab/celestial.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "bnfstab/errors.hpp"
#include "bnfstab/graded_series.hpp"

namespace bnfstab {

namespace detail {
// Generated at build time from data/.
extern const char* const kFixtureNames[];
extern const char* const kFixtureTexts[];
extern const int kFixtureCount;
}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* const kBodyKeys[] = {"mass", "a", "mean_anomaly", "e", "arg_perihelion", "inclination", "node"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void assign(BodyParameters& body, const std::string& key, const std::string& value, int line) {
  if (key == "mass") {
    body.mass = parse_mass(value, line);
    return;
  }
  const double v = io::parse_double(value, line);
  if (key == "a") {
    body.a = v;
  } else if (key == "mean_anomaly") {
    body.mean_anomaly = normalize_angle(v);
  } else if (key == "e") {
    body.e = v;
  } else if (key == "arg_perihelion") {
    body.arg_perihelion = normalize_angle(v);
  } else if (key == "inclination") {
    body.inclination = v;
  } else if (key == "node") {
    body.node = normalize_angle(v);
  }
}

}  // namespace

double normalize_angle(double angle) {
  if (!std::isfinite(angle)) throw DomainError("angle must be finite");
  if (angle >= 0.0 && angle < kTwoPi) return angle;
  double r = std::fmod(angle, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double parse_mass(const std::string& raw, int line) {
  const std::string text = trim(raw);
  const std::string unit = "4pi^2";
  if (text.rfind(unit, 0) == 0) {
    const std::string rest = text.substr(unit.size());
    if (rest.empty()) return kSolarMass;
    if (rest[0] != '/') throw ParseError("mass must be a number, 4pi^2 or 4pi^2/<x>", line);
    const double d = io::parse_double(trim(rest.substr(1)), line);
    if (!(d > 0)) throw ParseError("mass divisor must be positive", line);
    return kSolarMass / d;
  }
  return io::parse_double(text, line);
}

ElementSet read_elements(std::istream& in) {
  ElementSet set;
  bool have_m0 = false;
  std::set<std::string> seen_top;
  std::vector<std::set<std::string>> seen_body;
  std::vector<int> section_line;
  std::string line;
  int line_no = 0;
  auto finish_body = [&](int at) {
    if (set.bodies.empty()) return;
    for (const char* key : kBodyKeys) {
      if (!seen_body.back().count(key)) {
        throw ParseError("body '" + set.bodies.back().name + "' (line " + std::to_string(section_line.back()) +
                             ") is missing field '" + key + "'",
                         at);
      }
    }
    const BodyParameters& b = set.bodies.back();
    if (!(b.a > 0)) throw ParseError("semi-major axis must be positive", section_line.back());
    if (!(b.mass > 0)) throw ParseError("mass must be positive", section_line.back());
    if (b.e < 0) throw ParseError("eccentricity must be >= 0", section_line.back());
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) throw ParseError("malformed section header", line_no);
      finish_body(line_no);
      BodyParameters b;
      b.name = trim(body.substr(1, body.size() - 2));
      for (const auto& other : set.bodies) {
        if (other.name == b.name) throw ParseError("duplicate body '" + b.name + "'", line_no);
      }
      set.bodies.push_back(b);
      seen_body.emplace_back();
      section_line.push_back(line_no);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);
    if (set.bodies.empty()) {
      if (!seen_top.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no);
      if (key == "m0") {
        set.m0 = parse_mass(value, line_no);
        have_m0 = true;
      } else if (key == "G") {
        set.G = io::parse_double(value, line_no);
      } else {
        throw ParseError("unknown top-level key '" + key + "'", line_no);
      }
      continue;
    }
    bool known = false;
    for (const char* k : kBodyKeys) known = known || key == k;
    if (!known) throw ParseError("unknown body key '" + key + "'", line_no);
    if (!seen_body.back().insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no);
    assign(set.bodies.back(), key, value, line_no);
  }
  finish_body(line_no);
  if (!have_m0) throw ParseError("missing top-level field 'm0'", line_no);
  if (!(set.m0 > 0)) throw ParseError("m0 must be positive", line_no);
  if (!(set.G > 0)) throw ParseError("G must be positive", line_no);
  if (set.bodies.empty()) throw ParseError("no [body] sections", line_no);
  return set;
}

ElementSet elements_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_elements(ss);
}

PoincareState poincare_variables(const ElementSet& elements) {
  PoincareState st;
  const double m0 = elements.m0;
  for (const BodyParameters& b : elements.bodies) {
    if (!(b.e < 1.0)) throw HyperbolicOrbitError("body '" + b.name + "' has e >= 1");
    if (b.e < 0.0) throw DomainError("body '" + b.name + "' has negative eccentricity");
    if (!(b.a > 0)) throw DomainError("body '" + b.name + "' has a <= 0");
    const double mu = m0 * b.mass / (m0 + b.mass);
    const double Lambda = mu * std::sqrt(elements.G * (m0 + b.mass) * b.a);
    // 1 - sqrt(1 - e^2) without cancellation
    const double defect = b.e * b.e / (1.0 + std::sqrt((1.0 - b.e) * (1.0 + b.e)));
    const double amp = std::sqrt(2.0 * Lambda) * std::sqrt(defect);
    st.names.push_back(b.name);
    st.mu.push_back(mu);
    st.Lambda.push_back(Lambda);
    st.xi.push_back(amp * std::cos(b.arg_perihelion));
    st.eta.push_back(-amp * std::sin(b.arg_perihelion));
    st.lambda.push_back(normalize_angle(b.mean_anomaly + b.arg_perihelion));
  }
  return st;
}

double eccentricity(double Lambda, double xi, double eta) {
  if (!(Lambda > 0)) throw DomainError("Lambda must be positive");
  const double s = (xi * xi + eta * eta) / (2.0 * Lambda);
  if (s > 1.0) throw HyperbolicOrbitError("secular amplitude exceeds the circular-orbit action");
  return std::sqrt(s * (2.0 - s));
}

std::vector<double> secular_radii(const PoincareState& state) {
  std::vector<double> R;
  for (std::size_t j = 0; j < state.xi.size(); ++j) {
    const double r = std::hypot(state.xi[j], state.eta[j]);
    if (!(r > 0)) {
      throw DegenerateRadiusError("zero secular amplitude for body " +
                                  (j < state.names.size() ? state.names[j] : std::to_string(j)));
    }
    R.push_back(r);
  }
  return R;
}

std::vector<std::string> fixture_names() {
  return {detail::kFixtureNames, detail::kFixtureNames + detail::kFixtureCount};
}

std::string_view fixture_text(const std::string& name) {
  for (int i = 0; i < detail::kFixtureCount; ++i) {
    if (name == detail::kFixtureNames[i]) return detail::kFixtureTexts[i];
  }
  std::string known;
  for (int i = 0; i < detail::kFixtureCount; ++i) known += std::string(i ? ", " : "") + detail::kFixtureNames[i];
  throw UnknownFixtureError("unknown fixture '" + name + "' (known: " + known + ")");
}

ElementSet load_fixture(const std::string& name) { return elements_from_string(std::string(fixture_text(name))); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_poincare(std::ostream& out, const PoincareState& state) {
  std::vector<double> radii(state.xi.size(), 0.0);
  for (std::size_t j = 0; j < radii.size(); ++j) radii[j] = std::hypot(state.xi[j], state.eta[j]);
  for (std::size_t j = 0; j < state.Lambda.size(); ++j) {
    if (j) out << '\n';
    out << '[' << state.names[j] << "]\n";
    out << "mu = " << io::format_double(state.mu[j]) << '\n';
    out << "Lambda = " << io::format_double(state.Lambda[j]) << '\n';
    out << "lambda = " << io::format_double(state.lambda[j]) << '\n';
    out << "xi = " << io::format_double(state.xi[j]) << '\n';
    out << "eta = " << io::format_double(state.eta[j]) << '\n';
    out << "radius = " << io::format_double(radii[j]) << '\n';
  }
}

PoincareState read_poincare(std::istream& in) {
  PoincareState st;
  std::map<std::string, std::vector<double>*> fields = {
      {"mu", &st.mu}, {"Lambda", &st.Lambda}, {"lambda", &st.lambda}, {"xi", &st.xi}, {"eta", &st.eta}};
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  auto finish = [&](int at) {
    if (st.names.empty()) return;
    for (const auto& [key, vec] : fields) {
      if (vec->size() != st.names.size()) {
        throw ParseError("body '" + st.names.back() + "' is missing field '" + key + "'", at);
      }
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ParseError("malformed section header", line_no);
      finish(line_no);
      st.names.push_back(trim(body.substr(1, body.size() - 2)));
      seen.clear();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    if (st.names.empty()) throw ParseError("field outside a [body] section", line_no);
    const std::string key = trim(body.substr(0, eq));
    const double v = io::parse_double(trim(body.substr(eq + 1)), line_no);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no);
    if (key == "radius") continue;
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError("unknown key '" + key + "'", line_no);
    it->second->push_back(v);
  }
  finish(line_no);
  if (st.names.empty()) throw ParseError("no [body] sections", line_no);
  return st;
}

}  // namespace bnfstab
