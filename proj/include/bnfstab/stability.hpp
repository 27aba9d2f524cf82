#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bnfstab/birkhoff.hpp"

namespace bnfstab {

/// Radii R_1..R_n and the scale rho of the domain Delta_{rho R}, the product
/// of the discs x_j^2 + y_j^2 <= rho^2 R_j^2.
struct PolydiscSpec {
  std::vector<double> radii;
  double rho = 1.0;
};

struct DriftBound {
  int r = 0;
  int j = 0;
  double B = 0.0;
  double C = 2.0;
};

inline constexpr double kDefaultSafety = 2.0;

/// B_{r,j} = C |{I_j, F^(r+1)}|_R for every action j.
std::vector<DriftBound> drift_bound(const NormalFormState& state, int r, std::span<const double> radii,
                                    double C = kDefaultSafety);

/// min_j R_j^2 / ((r+1) B_{r,j}) (rho0^-(r+1) - rho^-(r+1)); +inf when every
/// bound vanishes.
double escape_time(double rho0, double rho, int r, std::span<const DriftBound> bounds,
                   std::span<const double> radii);

struct StabilityReport {
  double rho0 = 0.0;
  double T = 0.0;
  int r_opt = 0;
  std::vector<std::pair<int, double>> per_order;
  std::vector<double> radii;
  double C = kDefaultSafety;
};

/// Orders whose bound is defined: 1..min(r, r_max - 1), skipping orders
/// whose first remainder block vanishes while later ones do not.
std::vector<int> available_orders(const NormalFormState& state);

/// T(rho0) = max_r tau(rho0, rho_factor * rho0, r); r_opt is the smallest
/// maximizer.
StabilityReport stability_time(const NormalFormState& state, double rho0, std::span<const double> radii,
                               double C = kDefaultSafety, double rho_factor = 2.0);

/// Drift bounds computed once per order, reused across radii sweeps.
class StabilityEstimator {
 public:
  StabilityEstimator(const NormalFormState& state, std::vector<double> radii, double C = kDefaultSafety,
                     double rho_factor = 2.0);

  StabilityReport at(double rho0) const;
  /// One report per grid point, in grid order. Points are evaluated in
  /// parallel when threads > 1.
  std::vector<StabilityReport> sweep(std::span<const double> grid, int threads = 1) const;

  const std::vector<int>& orders() const noexcept { return orders_; }
  const std::vector<std::vector<DriftBound>>& bounds() const noexcept { return bounds_; }

 private:
  std::vector<double> radii_;
  double C_;
  double rho_factor_;
  std::vector<int> orders_;
  std::vector<std::vector<DriftBound>> bounds_;
};

std::vector<StabilityReport> sweep(const NormalFormState& state, std::span<const double> grid,
                                   std::span<const double> radii, double C = kDefaultSafety);

struct GridSpec {
  double min = 0.3;
  double max = 3.0;
  int points = 64;
  bool log = true;
};

/// Parse "min:max:points[:log|:lin]".
GridSpec parse_grid(const std::string& text);
std::vector<double> make_grid(const GridSpec& spec);

/// Header "rho0,T,log10_T,r_opt" plus tau_r<k> columns for every order in
/// wide mode. Values carry 17 significant digits.
void write_sweep_csv(std::ostream& out, std::span<const StabilityReport> reports, bool wide);

}  // namespace bnfstab
