#include "bnfstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "bnfstab/errors.hpp"
#include "bnfstab/graded_series.hpp"

namespace bnfstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radii(std::span<const double> radii, int n) {
  if (static_cast<int>(radii.size()) != n) throw DimensionError("one radius per degree of freedom");
  for (double R : radii) {
    if (!(R > 0) || !std::isfinite(R)) throw DomainError("radii must be positive and finite");
  }
}

}  // namespace

std::vector<DriftBound> drift_bound(const NormalFormState& state, int r, std::span<const double> radii,
                                    double C) {
  const int n = state.num_dof;
  check_radii(radii, n);
  if (!(C > 1)) throw DomainError("safety constant C must exceed 1");
  const Polynomial& f = state.first_remainder_at(r);
  std::vector<DriftBound> out;
  for (int j = 0; j < n; ++j) {
    const Polynomial bracket = poisson_bracket(Polynomial::action(n, j), f);
    out.push_back({r, j, C * polydisc_norm(bracket, radii), C});
  }
  return out;
}

double escape_time(double rho0, double rho, int r, std::span<const DriftBound> bounds,
                   std::span<const double> radii) {
  if (!(rho0 > 0)) throw DomainError("rho0 must be positive");
  if (!(rho > rho0)) throw DomainError("escape radius rho must exceed rho0");
  if (r < 1) throw DomainError("order must be >= 1");
  const double p = r + 1;
  const double gap = std::pow(rho0, -p) - std::pow(rho, -p);
  double tau = kInf;
  for (const DriftBound& b : bounds) {
    if (b.r != r) throw DomainError("drift bound belongs to a different order");
    if (b.j < 0 || b.j >= static_cast<int>(radii.size())) throw DimensionError("drift bound index out of range");
    if (b.B == 0.0) continue;
    const double R = radii[b.j];
    tau = std::min(tau, R * R / (p * b.B) * gap);
  }
  return tau;
}

std::vector<int> available_orders(const NormalFormState& state) {
  const int last = std::min(state.r, state.r_max - 1);
  bool later = false;
  for (int s = state.r + 1; s <= state.r_max; ++s) later = later || !state.remainder[s].is_zero();
  std::vector<int> orders;
  for (int q = last; q >= 1; --q) {
    const bool zero = state.first_remainder[q].is_zero();
    if (!zero || !later) orders.push_back(q);
    later = later || !zero;
  }
  std::reverse(orders.begin(), orders.end());
  return orders;
}

StabilityEstimator::StabilityEstimator(const NormalFormState& state, std::vector<double> radii, double C,
                                       double rho_factor)
    : radii_(std::move(radii)), C_(C), rho_factor_(rho_factor), orders_(available_orders(state)) {
  check_radii(radii_, state.num_dof);
  if (!(rho_factor > 1)) throw DomainError("rho factor must exceed 1");
  if (orders_.empty()) throw OrderOutOfRangeError("ledger holds no normalized order >= 1 with a remainder block");
  for (int r : orders_) bounds_.push_back(drift_bound(state, r, radii_, C_));
}

StabilityReport StabilityEstimator::at(double rho0) const {
  StabilityReport rep;
  rep.rho0 = rho0;
  rep.radii = radii_;
  rep.C = C_;
  rep.T = -kInf;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const double tau = escape_time(rho0, rho_factor_ * rho0, orders_[i], bounds_[i], radii_);
    rep.per_order.emplace_back(orders_[i], tau);
    if (tau > rep.T) {
      rep.T = tau;
      rep.r_opt = orders_[i];
    }
  }
  return rep;
}

std::vector<StabilityReport> StabilityEstimator::sweep(std::span<const double> grid, int threads) const {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0)) throw DomainError("grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  }
  std::vector<StabilityReport> out(grid.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = at(grid[i]);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < grid.size(); i += workers) out[i] = at(grid[i]);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

StabilityReport stability_time(const NormalFormState& state, double rho0, std::span<const double> radii,
                               double C, double rho_factor) {
  return StabilityEstimator(state, {radii.begin(), radii.end()}, C, rho_factor).at(rho0);
}

std::vector<StabilityReport> sweep(const NormalFormState& state, std::span<const double> grid,
                                   std::span<const double> radii, double C) {
  return StabilityEstimator(state, {radii.begin(), radii.end()}, C).sweep(grid);
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3 && parts.size() != 4) throw ParseError("grid must be min:max:points[:log|:lin]", 0);
  GridSpec g;
  g.min = io::parse_double(parts[0], 0);
  g.max = io::parse_double(parts[1], 0);
  g.points = io::parse_int(parts[2], 0);
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      g.log = true;
    } else if (parts[3] == "lin") {
      g.log = false;
    } else {
      throw ParseError("grid spacing must be log or lin", 0);
    }
  }
  return g;
}

std::vector<double> make_grid(const GridSpec& spec) {
  if (spec.points < 1) throw DomainError("grid needs at least one point");
  if (!(spec.min > 0) || !std::isfinite(spec.max)) throw DomainError("grid bounds must be positive and finite");
  if (spec.points == 1) return {spec.min};
  if (!(spec.max > spec.min)) throw DomainError("grid max must exceed min");
  std::vector<double> g(spec.points);
  const double a = spec.log ? std::log(spec.min) : spec.min;
  const double b = spec.log ? std::log(spec.max) : spec.max;
  for (int i = 0; i < spec.points; ++i) {
    const double t = a + (b - a) * i / (spec.points - 1);
    g[i] = spec.log ? std::exp(t) : t;
  }
  g.front() = spec.min;
  g.back() = spec.max;
  return g;
}

void write_sweep_csv(std::ostream& out, std::span<const StabilityReport> reports, bool wide) {
  int top = 0;
  if (wide) {
    for (const auto& rep : reports) {
      for (const auto& [r, tau] : rep.per_order) top = std::max(top, r);
    }
  }
  out << "rho0,T,log10_T,r_opt";
  for (int r = 1; r <= top; ++r) out << ",tau_r" << r;
  out << '\n';
  for (const auto& rep : reports) {
    out << io::format_double(rep.rho0) << ',' << io::format_double(rep.T) << ','
        << io::format_double(std::log10(rep.T)) << ',' << rep.r_opt;
    if (wide) {
      std::vector<double> row(top + 1, std::numeric_limits<double>::quiet_NaN());
      for (const auto& [r, tau] : rep.per_order) row[r] = tau;
      for (int r = 1; r <= top; ++r) out << ',' << io::format_double(row[r]);
    }
    out << '\n';
  }
}

}  // namespace bnfstab
