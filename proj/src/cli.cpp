#include "bnfstab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "bnfstab/birkhoff.hpp"
#include "bnfstab/celestial.hpp"
#include "bnfstab/errors.hpp"
#include "bnfstab/graded_series.hpp"
#include "bnfstab/spectrum.hpp"
#include "bnfstab/stability.hpp"

#ifndef BNFSTAB_VERSION
#define BNFSTAB_VERSION "0.0.0"
#endif

namespace bnfstab::cli {

namespace {

struct Options {
  std::string input;
  std::string fixture;
  int order = 18;
  std::string tol = "auto";
  double c_const = kDefaultSafety;
  double rho0 = 1.0;
  double rho_factor = 2.0;
  std::string grid = "0.3:3.0:64:log";
  std::string radii;
  std::string radii_from;
  std::string out;
  std::string cert;
  bool wide = false;
  int threads = 1;
};

struct Input {
  std::string path;
  std::string text;
};

Input slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return {path, ss.str()};
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
  std::ostream& stream() { return buffer_; }
  void commit() {
    if (path_.empty()) {
      fallback_ << buffer_.str();
      return;
    }
    std::ofstream f(path_, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + path_ + "'");
    f << buffer_.str();
    if (!f) throw std::runtime_error("write failed for '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

void provenance(std::ostream& out, const std::string& command, const std::vector<std::string>& config,
                const std::vector<Input>& inputs) {
  out << "# bnfstab " << BNFSTAB_VERSION << ' ' << command << '\n';
  for (const auto& c : config) out << "# config " << c << '\n';
  for (const auto& in : inputs) out << "# input " << in.path << " fnv1a64=" << digest_hex(in.text) << '\n';
}

std::string fmt(double v) { return io::format_double(v); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(io::parse_double(item, 0));
  if (out.empty()) throw ParseError("empty radius list", 0);
  return out;
}

std::string join_values(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

// radii plus the config line describing where they came from
std::pair<std::vector<double>, std::string> resolve_radii(const Options& o, int n, std::vector<Input>& inputs) {
  if (!o.radii.empty() && !o.radii_from.empty()) throw CLI::ValidationError("--radii and --radii-from are exclusive");
  std::vector<double> R;
  std::string source;
  if (!o.radii_from.empty()) {
    Input in = slurp(o.radii_from);
    std::istringstream ss(in.text);
    R = secular_radii(read_poincare(ss));
    source = "radii-from=" + o.radii_from;
    inputs.push_back(std::move(in));
  } else if (!o.radii.empty()) {
    R = parse_list(o.radii);
    source = "radii=" + o.radii;
  } else {
    R.assign(n, 1.0);
    source = "radii=default";
  }
  if (static_cast<int>(R.size()) != n) {
    throw DimensionError("got " + std::to_string(R.size()) + " radii for " + std::to_string(n) + " degrees of freedom");
  }
  return {R, source + " resolved=" + join_values(R)};
}

NormalFormState load_ledger(const Options& o, std::vector<Input>& inputs) {
  if (o.input.empty()) throw CLI::ValidationError("--input is required");
  Input in = slurp(o.input);
  std::istringstream ss(in.text);
  NormalFormState state = read_state(ss);
  inputs.push_back(std::move(in));
  return state;
}

int cmd_poincare(const Options& o, std::ostream& out) {
  std::vector<Input> inputs;
  ElementSet elements;
  if (!o.fixture.empty()) {
    if (!o.input.empty()) throw CLI::ValidationError("--input and --fixture are exclusive");
    Input in{"fixture:" + o.fixture, std::string(fixture_text(o.fixture))};
    elements = elements_from_string(in.text);
    inputs.push_back(std::move(in));
  } else {
    if (o.input.empty()) throw CLI::ValidationError("--input or --fixture is required");
    Input in = slurp(o.input);
    elements = elements_from_string(in.text);
    inputs.push_back(std::move(in));
  }
  const PoincareState st = poincare_variables(elements);
  Sink sink(o.out, out);
  provenance(sink.stream(), "poincare", {"G=" + fmt(elements.G), "m0=" + fmt(elements.m0)}, inputs);
  write_poincare(sink.stream(), st);
  sink.commit();
  return kOk;
}

int cmd_bnf(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw CLI::ValidationError("--input is required");
  if (o.order < 1) throw DomainError("--order must be >= 1");
  Input in = slurp(o.input);
  GradedSeries h = io::series_from_string(in.text);
  if (h.field() != Field::real) throw RealityError("Hamiltonian file must be real");
  if (h.dmax() < 2) throw DomainError("Hamiltonian has no quadratic part");

  std::vector<double> omega = diagonal_frequencies(h.component(2));
  bool diagonalized = false;
  if (omega.empty()) {
    const Diagonalization d = diagonalize_quadratic(h.component(2));
    h = push_forward(h, d.map);
    omega = d.frequencies.omega;
    diagonalized = true;
    // drop rounding noise left in the quadratic block
    h.set_component(2, oscillator(omega));
  }

  const bool auto_tol = o.tol == "auto";
  const double tol = auto_tol ? default_resonance_tolerance(omega) : io::parse_double(o.tol, 0);
  if (!(tol >= 0)) throw DomainError("--tol must be >= 0");
  const int k_max = o.order + 2;
  const ResonanceCertificate cert = resonance_certificate(omega, k_max, tol);
  const NormalFormResult result = birkhoff_normal_form(h, omega, o.order, tol);

  std::vector<std::string> config = {"order=" + std::to_string(o.order),
                                     std::string("tol=") + (auto_tol ? "auto:" : "") + fmt(tol),
                                     "k_max=" + std::to_string(k_max),
                                     std::string("diagonalized=") + (diagonalized ? "true" : "false")};
  const std::vector<Input> inputs = {in};

  Sink ledger(o.out, out);
  provenance(ledger.stream(), "bnf", config, inputs);
  if (result.failure) {
    ledger.stream() << "# failure order=" << result.failure->order << " divisor=" << fmt(result.failure->divisor)
                    << '\n';
  }
  write_state(ledger.stream(), result.state);
  ledger.commit();

  const std::string cert_path = !o.cert.empty() ? o.cert : (o.out.empty() ? "" : o.out + ".cert");
  if (!cert_path.empty()) {
    Sink c(cert_path, out);
    provenance(c.stream(), "bnf", config, inputs);
    write_certificate(c.stream(), cert);
    c.commit();
  }

  if (result.failure) {
    err << "error: " << result.failure->message << "\n";
    err << "partial ledger normalized to order " << result.state.r << '\n';
    return kResonance;
  }
  if (!cert.certified) {
    std::ostringstream k;
    for (std::size_t i = 0; i < cert.argmin_k.size(); ++i) k << (i ? "," : "") << cert.argmin_k[i];
    err << "error: resonance |<k,omega>| = " << fmt(cert.min_divisor) << " <= " << fmt(tol) << " at k=(" << k.str()
        << ")\n";
    return kResonance;
  }
  return kOk;
}

void write_report(std::ostream& out, const StabilityReport& rep) {
  out << "rho0 = " << fmt(rep.rho0) << '\n';
  out << "T = " << fmt(rep.T) << '\n';
  out << "log10_T = " << fmt(std::log10(rep.T)) << '\n';
  out << "r_opt = " << rep.r_opt << '\n';
  out << "C = " << fmt(rep.C) << '\n';
  out << "radii = " << join_values(rep.radii) << '\n';
  for (const auto& [r, tau] : rep.per_order) out << "tau_r" << r << " = " << fmt(tau) << '\n';
}

std::vector<std::string> stability_config(const Options& o, const std::string& radii_line) {
  return {"c_const=" + fmt(o.c_const), "rho_factor=" + fmt(o.rho_factor), radii_line};
}

int cmd_estimate(const Options& o, std::ostream& out) {
  std::vector<Input> inputs;
  const NormalFormState state = load_ledger(o, inputs);
  const auto [radii, radii_line] = resolve_radii(o, state.num_dof, inputs);
  const StabilityEstimator est(state, radii, o.c_const, o.rho_factor);
  const StabilityReport rep = est.at(o.rho0);
  std::vector<std::string> config = {"rho0=" + fmt(o.rho0)};
  for (auto& c : stability_config(o, radii_line)) config.push_back(c);
  Sink sink(o.out, out);
  provenance(sink.stream(), "estimate", config, inputs);
  write_report(sink.stream(), rep);
  sink.commit();
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  std::vector<Input> inputs;
  const NormalFormState state = load_ledger(o, inputs);
  const auto [radii, radii_line] = resolve_radii(o, state.num_dof, inputs);
  const GridSpec spec = parse_grid(o.grid);
  const std::vector<double> grid = make_grid(spec);
  const StabilityEstimator est(state, radii, o.c_const, o.rho_factor);
  const auto reports = est.sweep(grid, o.threads);
  std::vector<std::string> config = {"grid=" + fmt(spec.min) + ":" + fmt(spec.max) + ":" +
                                     std::to_string(spec.points) + ":" + (spec.log ? "log" : "lin")};
  for (auto& c : stability_config(o, radii_line)) config.push_back(c);
  config.push_back(std::string("wide=") + (o.wide ? "true" : "false"));
  Sink sink(o.out, out);
  provenance(sink.stream(), "sweep", config, inputs);
  write_sweep_csv(sink.stream(), reports, o.wide);
  sink.commit();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Birkhoff normal forms and effective stability times", "bnfstab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BNFSTAB_VERSION);

  auto* poincare = app.add_subcommand("poincare", "Orbital elements to Poincare variables");
  poincare->add_option("--input", o.input, "Element file");
  poincare->add_option("--fixture", o.fixture, "Built-in element set");
  poincare->add_option("--out", o.out, "Output file (default stdout)");

  auto* bnf = app.add_subcommand("bnf", "Birkhoff normal form ledger");
  bnf->add_option("--input", o.input, "Hamiltonian series file")->required();
  bnf->add_option("--order", o.order, "Normalization order r_max")->capture_default_str();
  bnf->add_option("--tol", o.tol, "Small divisor tolerance, or auto")->capture_default_str();
  bnf->add_option("--out", o.out, "Ledger file (default stdout)");
  bnf->add_option("--cert", o.cert, "Resonance certificate file (default <out>.cert)");

  auto* estimate = app.add_subcommand("estimate", "Stability time at one radius");
  auto* sweep_cmd = app.add_subcommand("sweep", "Stability times over a radius grid, as CSV");
  for (auto* sub : {estimate, sweep_cmd}) {
    sub->add_option("--input", o.input, "Ledger file")->required();
    sub->add_option("--c-const", o.c_const, "Safety constant C")->capture_default_str();
    sub->add_option("--rho-factor", o.rho_factor, "Escape radius as a multiple of rho0")->capture_default_str();
    sub->add_option("--radii", o.radii, "Comma-separated radii R_1..R_n");
    sub->add_option("--radii-from", o.radii_from, "Poincare state file providing the radii");
    sub->add_option("--out", o.out, "Output file (default stdout)");
  }
  estimate->add_option("--rho0", o.rho0, "Initial radius")->capture_default_str();
  sweep_cmd->add_option("--grid", o.grid, "min:max:points[:log|:lin]")->capture_default_str();
  sweep_cmd->add_flag("--wide", o.wide, "Add per-order tau columns");
  sweep_cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();

  std::vector<std::string> argv_store = {"bnfstab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << BNFSTAB_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*poincare) return cmd_poincare(o, out);
    if (*bnf) return cmd_bnf(o, out, err);
    if (*estimate) return cmd_estimate(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ResonanceError& e) {
    err << "resonance: " << e.what() << '\n';
    return kResonance;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace bnfstab::cli
