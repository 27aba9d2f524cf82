#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnfstab/cli.hpp"

namespace fs = std::filesystem;
using bnfstab::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path p = fs::temp_directory_path() / "bnfstab_cli_test";
  fs::create_directories(p);
  return p;
}

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* const kQuartic = "HAM n=1 dmax=8 field=real\n2 2 0 0.5\n2 0 2 0.5\n4 4 0 1\n";

}  // namespace

TEST_CASE("poincare command") {
  const auto r = call({"poincare", "--fixture", "sjs-jd2451220.5"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("xi = 1.3159014721686157e-02") != std::string::npos);
  CHECK(r.out.find("# input fixture:sjs-jd2451220.5 fnv1a64=") != std::string::npos);

  const fs::path dir = scratch();
  const auto bad = write(dir / "bad.txt", "m0 = 4pi^2\n[p]\nmass = 1\na = oops\n");
  const auto rb = call({"poincare", "--input", bad});
  CHECK(rb.code == bnfstab::cli::kParse);
  CHECK(rb.err.find("line 4") != std::string::npos);

  const auto circ = write(dir / "circ.txt",
                          "m0 = 4pi^2\n[p]\nmass = 4pi^2/1000\na = 1\nmean_anomaly = 0\ne = 0\n"
                          "arg_perihelion = 1\ninclination = 0\nnode = 0\n");
  const auto rc = call({"poincare", "--input", circ});
  REQUIRE(rc.code == 0);
  CHECK(rc.out.find("xi = 0.0000000000000000e+00") != std::string::npos);
  CHECK(rc.out.find("eta = -0.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("bnf, estimate and sweep") {
  const fs::path dir = scratch();
  const auto ham = write(dir / "quartic.ham", kQuartic);
  const auto nf = (dir / "quartic.nf").string();
  REQUIRE(call({"bnf", "--input", ham, "--order", "6", "--out", nf}).code == 0);
  const std::string ledger = slurp(nf);
  CHECK(ledger.find("# config order=6") != std::string::npos);
  CHECK(ledger.find("Z s=2 chart=complex\n4 2 2 -1.49999999999999") != std::string::npos);
  CHECK(fs::exists(nf + ".cert"));

  const auto e2 = call({"estimate", "--input", nf, "--rho0", "0.1"});
  const auto e4 = call({"estimate", "--input", nf, "--rho0", "0.1", "--c-const", "4"});
  REQUIRE(e2.code == 0);
  REQUIRE(e4.code == 0);
  auto T_of = [](const std::string& s) {
    const auto p = s.find("\nT = ");
    return std::stod(s.substr(p + 5, s.find('\n', p + 1) - p - 5));
  };
  CHECK(T_of(e4.out) == Catch::Approx(T_of(e2.out) / 2).epsilon(1e-15));

  const auto sw = call({"sweep", "--input", nf, "--wide"});
  REQUIRE(sw.code == 0);
  std::istringstream in(sw.out);
  std::string line;
  int rows = 0;
  bool header = false;
  double prevT = INFINITY;
  int prevR = 1 << 30;
  while (std::getline(in, line)) {
    if (line[0] == '#') continue;
    if (!header) {
      CHECK(line == "rho0,T,log10_T,r_opt,tau_r1,tau_r2,tau_r3,tau_r4,tau_r5");
      header = true;
      continue;
    }
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 9);
    const double T = std::stod(cells[1]);
    const int r = std::stoi(cells[3]);
    CHECK(T <= prevT);
    CHECK(r <= prevR);
    prevT = T;
    prevR = r;
  }
  CHECK(rows == 64);

  const auto bad_radii = call({"estimate", "--input", nf, "--radii", "1,2"});
  CHECK(bad_radii.code == bnfstab::cli::kDomain);
}

TEST_CASE("trivial ledgers") {
  const fs::path dir = scratch();
  const auto ham = write(dir / "h0.ham", "HAM n=2 dmax=6 field=real\n2 2 0 0 0 0.5\n2 0 0 2 0 0.5\n"
                                         "2 0 2 0 0 0.7071067811865476\n2 0 0 0 2 0.7071067811865476\n");
  const auto nf = (dir / "h0.nf").string();
  REQUIRE(call({"bnf", "--input", ham, "--order", "4", "--out", nf}).code == 0);
  const std::string ledger = slurp(nf);
  CHECK(ledger.find("Z s=2 chart=complex\nZ s=3 chart=complex") != std::string::npos);
  const auto e = call({"estimate", "--input", nf, "--rho0", "0.5"});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("T = inf") != std::string::npos);
}

TEST_CASE("resonant frequencies exit with the resonance status") {
  const fs::path dir = scratch();
  const auto ham = write(dir / "res.ham", "HAM n=2 dmax=4 field=real\n2 2 0 0 0 0.5\n2 0 0 2 0 0.5\n"
                                          "2 0 2 0 0 0.5\n2 0 0 0 2 0.5\n4 2 2 0 0 1\n");
  const auto nf = (dir / "res.nf").string();
  const auto r = call({"bnf", "--input", ham, "--order", "2", "--out", nf});
  CHECK(r.code == bnfstab::cli::kResonance);
  const std::string cert = slurp(nf + ".cert");
  CHECK(cert.find("argmin_k = 1 -1") != std::string::npos);
  CHECK(cert.find("certified = false") != std::string::npos);
  CHECK(slurp(nf).find("NFS n=2 rmax=2 r=1") != std::string::npos);
}

TEST_CASE("usage and parse errors") {
  CHECK(call({}).code == bnfstab::cli::kUsage);
  CHECK(call({"bnf"}).code == bnfstab::cli::kUsage);
  CHECK(call({"bnf", "--input", "/nonexistent/file"}).code == bnfstab::cli::kUsage);
  const fs::path dir = scratch();
  const auto bad = write(dir / "bad.ham", "HAM n=1 dmax=4 field=real\n2 2 0\n");
  const auto r = call({"bnf", "--input", bad});
  CHECK(r.code == bnfstab::cli::kParse);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(call({"sweep", "--input", bad, "--grid", "1:2"}).code == bnfstab::cli::kParse);
  CHECK(call({"--help"}).code == 0);
}
