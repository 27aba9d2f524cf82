#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bnfstab/birkhoff.hpp"
#include "bnfstab/celestial.hpp"
#include "bnfstab/cli.hpp"
#include "bnfstab/errors.hpp"
#include "bnfstab/graded_series.hpp"
#include "bnfstab/spectrum.hpp"
#include "bnfstab/stability.hpp"

namespace py = pybind11;
using namespace bnfstab;

namespace {

using TermTuple = std::tuple<std::vector<int>, std::vector<int>, std::complex<double>>;

std::vector<TermTuple> terms_of(const Polynomial& p) {
  std::vector<TermTuple> out;
  const int n = p.num_dof();
  for (const Term& t : p.terms()) {
    std::vector<int> j(n), k(n);
    for (int i = 0; i < n; ++i) j[i] = t.index.j(i), k[i] = t.index.k(i);
    out.emplace_back(std::move(j), std::move(k), t.coeff);
  }
  return out;
}

Polynomial polynomial_of(int n, const std::vector<TermTuple>& terms, bool complex_field) {
  std::vector<Term> ts;
  for (const auto& [j, k, c] : terms) {
    if (static_cast<int>(j.size()) != n || static_cast<int>(k.size()) != n) {
      throw DimensionError("exponent tuples must have length num_dof");
    }
    ts.push_back({MultiIndex::from_exponents(j, k), c});
  }
  return Polynomial::from_terms(n, complex_field ? Field::complex : Field::real, std::move(ts));
}

template <class T, class F>
std::string to_text(const T& value, F write) {
  std::ostringstream out;
  write(out, value);
  return out.str();
}

py::dict report_dict(const StabilityReport& r) {
  py::dict d;
  d["rho0"] = r.rho0;
  d["T"] = r.T;
  d["r_opt"] = r.r_opt;
  d["per_order"] = r.per_order;
  d["radii"] = r.radii;
  d["C"] = r.C;
  return d;
}

py::dict certificate_dict(const ResonanceCertificate& c) {
  py::dict d;
  d["omega"] = c.omega;
  d["k_max"] = c.k_max;
  d["tol"] = c.tol;
  d["min_divisor"] = c.min_divisor;
  d["argmin_k"] = c.argmin_k;
  d["gamma"] = c.gamma;
  d["tau_dioph"] = c.tau_dioph;
  d["certified"] = c.certified;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Birkhoff normal forms and effective stability estimates";
  m.attr("__version__") = BNFSTAB_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  auto resonance = py::register_exception<ResonanceError>(m, "ResonanceError", base.ptr());
  py::register_exception<SmallDivisorError>(m, "SmallDivisorError", resonance.ptr());
  py::register_exception<NotEllipticError>(m, "NotEllipticError", base.ptr());
  py::register_exception<HyperbolicOrbitError>(m, "HyperbolicOrbitError", domain.ptr());
  py::register_exception<UnknownFixtureError>(m, "UnknownFixtureError", base.ptr());

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init([](int n, const std::vector<TermTuple>& terms, bool complex_field) {
             return polynomial_of(n, terms, complex_field);
           }),
           py::arg("num_dof"), py::arg("terms") = std::vector<TermTuple>{}, py::arg("complex_field") = false)
      .def_property_readonly("num_dof", &Polynomial::num_dof)
      .def_property_readonly("is_complex", [](const Polynomial& p) { return p.field() == Field::complex; })
      .def("terms", &terms_of)
      .def("__len__", &Polynomial::size)
      .def("max_abs", &Polynomial::max_abs)
      .def("max_degree", &Polynomial::max_degree)
      .def("__call__", [](const Polynomial& p, const std::vector<double>& z) { return evaluate(p, z); })
      .def("norm", [](const Polynomial& p, const std::vector<double>& radii) { return polydisc_norm(p, radii); })
      .def("__add__", [](const Polynomial& a, const Polynomial& b) { return a + b; })
      .def("__sub__", [](const Polynomial& a, const Polynomial& b) { return a - b; })
      .def("__mul__", [](const Polynomial& a, const Polynomial& b) { return multiply(a, b); })
      .def("__eq__", [](const Polynomial& a, const Polynomial& b) { return a == b; })
      .def("__repr__", [](const Polynomial& p) {
        return "<Polynomial n=" + std::to_string(p.num_dof()) + " terms=" + std::to_string(p.size()) + ">";
      });

  m.def("poisson_bracket", [](const Polynomial& f, const Polynomial& g) { return poisson_bracket(f, g); });
  m.def("lie_exp", &lie_exp, py::arg("chi"), py::arg("f"), py::arg("cap"));
  m.def("complexify", &complexify);
  m.def("realify", &realify, py::arg("f"), py::arg("tol") = 1e-10);
  m.def("oscillator", [](const std::vector<double>& omega) { return oscillator(omega); });
  m.def("theta_weight", py::overload_cast<int, int>(&theta_weight));

  py::class_<GradedSeries>(m, "GradedSeries")
      .def_static("from_text", &io::series_from_string)
      .def_static("from_polynomial", &GradedSeries::from_polynomial, py::arg("p"), py::arg("dmax"))
      .def("to_text", &io::series_to_string)
      .def("to_polynomial", &GradedSeries::to_polynomial)
      .def_property_readonly("num_dof", &GradedSeries::num_dof)
      .def_property_readonly("dmax", &GradedSeries::dmax);

  py::class_<NormalFormState>(m, "NormalFormState")
      .def_static("from_text",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return read_state(in);
                  })
      .def("to_text", [](const NormalFormState& s) { return to_text(s, write_state); })
      .def_readonly("num_dof", &NormalFormState::num_dof)
      .def_readonly("r", &NormalFormState::r)
      .def_readonly("r_max", &NormalFormState::r_max)
      .def_readonly("omega", &NormalFormState::omega)
      .def_readonly("homological_residual", &NormalFormState::homological_residual)
      .def("normal_form", [](const NormalFormState& s) { return s.normal_form_actions().coefficients(); },
           "Normal form as a polynomial in the actions (x_j stands for I_j).")
      .def("first_remainder", &NormalFormState::first_remainder_at, py::arg("order"))
      .def("truncated_normal_form", &NormalFormState::truncated_normal_form_real, py::arg("order"))
      .def("frequencies", [](const NormalFormState& s, const std::vector<double>& I) {
        return frequencies_of_actions(s, I);
      })
      .def("transform", [](const NormalFormState& s, const std::vector<double>& z, bool inverse) {
        return compose_transform(s, z, inverse ? Direction::inverse : Direction::forward);
      }, py::arg("point"), py::arg("inverse") = false);

  m.def(
      "birkhoff_normal_form",
      [](const GradedSeries& h, const std::vector<double>& omega, int r_max, std::optional<double> tol) {
        const NormalFormResult res = tol ? birkhoff_normal_form(h, omega, r_max, *tol) : birkhoff_normal_form(h, omega, r_max);
        py::object failure = py::none();
        if (res.failure) {
          py::dict f;
          f["order"] = res.failure->order;
          f["k"] = res.failure->k;
          f["divisor"] = res.failure->divisor;
          f["message"] = res.failure->message;
          failure = f;
        }
        return py::make_tuple(res.state, failure);
      },
      py::arg("h"), py::arg("omega"), py::arg("r_max"), py::arg("tol") = py::none(),
      "Normalize up to order r_max. Returns (state, failure) with failure None on success.");

  m.def(
      "check_nonresonance",
      [](const std::vector<double>& omega, int k_max, std::optional<double> tol) {
        return certificate_dict(check_nonresonance(omega, k_max, tol ? *tol : default_resonance_tolerance(omega)));
      },
      py::arg("omega"), py::arg("k_max"), py::arg("tol") = py::none());

  m.def("escape_time", [](double rho0, double rho, int r, double B, double R) {
    const std::vector<DriftBound> b = {{r, 0, B, kDefaultSafety}};
    const std::vector<double> radii = {R};
    return escape_time(rho0, rho, r, b, radii);
  }, py::arg("rho0"), py::arg("rho"), py::arg("r"), py::arg("B"), py::arg("R"),
     "One-action escape time for a single drift bound B.");
  m.def("available_orders", &available_orders);
  m.def(
      "stability_time",
      [](const NormalFormState& s, double rho0, const std::vector<double>& radii, double C, double rho_factor) {
        return report_dict(stability_time(s, rho0, radii, C, rho_factor));
      },
      py::arg("state"), py::arg("rho0"), py::arg("radii"), py::arg("C") = kDefaultSafety, py::arg("rho_factor") = 2.0);
  m.def(
      "sweep",
      [](const NormalFormState& s, const std::vector<double>& grid, const std::vector<double>& radii, double C,
         double rho_factor, int threads) {
        const StabilityEstimator est(s, radii, C, rho_factor);
        std::vector<StabilityReport> reps;
        {
          py::gil_scoped_release release;
          reps = est.sweep(grid, threads);
        }
        py::list out;
        for (const auto& r : reps) out.append(report_dict(r));
        return out;
      },
      py::arg("state"), py::arg("grid"), py::arg("radii"), py::arg("C") = kDefaultSafety, py::arg("rho_factor") = 2.0,
      py::arg("threads") = 1);
  m.def("make_grid", [](double lo, double hi, int points, bool log) { return make_grid({lo, hi, points, log}); },
        py::arg("lo"), py::arg("hi"), py::arg("points"), py::arg("log") = true);

  m.def("fixture_names", &fixture_names);
  m.def("fixture_digest", [](const std::string& name) { return digest_hex(fixture_text(name)); });
  m.def(
      "poincare_variables",
      [](const std::string& fixture, const std::optional<std::string>& text) {
        const ElementSet s = text ? elements_from_string(*text) : load_fixture(fixture);
        const PoincareState p = poincare_variables(s);
        py::dict d;
        d["names"] = p.names;
        d["mu"] = p.mu;
        d["Lambda"] = p.Lambda;
        d["lambda"] = p.lambda;
        d["xi"] = p.xi;
        d["eta"] = p.eta;
        d["radius"] = secular_radii(p);
        return d;
      },
      py::arg("fixture") = "sjs-jd2451220.5", py::arg("text") = py::none(),
      "Poincare variables of a bundled fixture, or of an element file given as text.");
  m.def("eccentricity", &eccentricity, py::arg("Lambda"), py::arg("xi"), py::arg("eta"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Run the command-line tool in process; returns (exit_code, stdout, stderr).");
}
