#pragma once

// Dense brute-force Birkhoff normalization for one degree of freedom, in the
// real chart only. c[a][b] is the coefficient of x^a y^b. Shares no code
// with the sparse engine.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

struct Dense {
  int D = 0;
  std::vector<std::vector<double>> c;

  explicit Dense(int dmax = 0) : D(dmax), c(dmax + 1, std::vector<double>(dmax + 1, 0.0)) {}
  double& at(int a, int b) { return c[a][b]; }
  double at(int a, int b) const { return c[a][b]; }
};

inline Dense add(const Dense& f, const Dense& g, double s = 1.0) {
  Dense h(f.D);
  for (int a = 0; a <= f.D; ++a)
    for (int b = 0; a + b <= f.D; ++b) h.at(a, b) = f.at(a, b) + s * g.at(a, b);
  return h;
}

inline Dense mul(const Dense& f, const Dense& g) {
  Dense h(f.D);
  for (int a = 0; a <= f.D; ++a)
    for (int b = 0; a + b <= f.D; ++b) {
      if (f.at(a, b) == 0.0) continue;
      for (int c = 0; a + b + c <= f.D; ++c)
        for (int d = 0; a + b + c + d <= f.D; ++d) h.at(a + c, b + d) += f.at(a, b) * g.at(c, d);
    }
  return h;
}

inline Dense dx(const Dense& f) {
  Dense h(f.D);
  for (int a = 1; a <= f.D; ++a)
    for (int b = 0; a + b <= f.D; ++b) h.at(a - 1, b) = a * f.at(a, b);
  return h;
}

inline Dense dy(const Dense& f) {
  Dense h(f.D);
  for (int a = 0; a <= f.D; ++a)
    for (int b = 1; a + b <= f.D; ++b) h.at(a, b - 1) = b * f.at(a, b);
  return h;
}

// {f, g} = f_x g_y - f_y g_x, truncated at D
inline Dense bracket(const Dense& f, const Dense& g) { return add(mul(dx(f), dy(g)), mul(dy(f), dx(g)), -1.0); }

inline Dense homogeneous(const Dense& f, int d) {
  Dense h(f.D);
  for (int a = 0; a <= d && a <= f.D; ++a)
    if (d - a >= 0 && d <= f.D) h.at(a, d - a) = f.at(a, d - a);
  return h;
}

inline double max_abs(const Dense& f) {
  double m = 0.0;
  for (int a = 0; a <= f.D; ++a)
    for (int b = 0; a + b <= f.D; ++b) m = std::max(m, std::abs(f.at(a, b)));
  return m;
}

// f(x cos t - y sin t, x sin t + y cos t)
inline Dense rotate(const Dense& f, double t) {
  Dense X(f.D), Y(f.D), one(f.D);
  if (f.D >= 1) {
    X.at(1, 0) = std::cos(t);
    X.at(0, 1) = -std::sin(t);
    Y.at(1, 0) = std::sin(t);
    Y.at(0, 1) = std::cos(t);
  }
  one.at(0, 0) = 1.0;
  std::vector<Dense> xp = {one}, yp = {one};
  for (int e = 1; e <= f.D; ++e) {
    xp.push_back(mul(xp.back(), X));
    yp.push_back(mul(yp.back(), Y));
  }
  Dense h(f.D);
  for (int a = 0; a <= f.D; ++a)
    for (int b = 0; a + b <= f.D; ++b) {
      if (f.at(a, b) == 0.0) continue;
      h = add(h, mul(xp[a], yp[b]), f.at(a, b));
    }
  return h;
}

// Average over the H0 flow, exact for the trigonometric degrees involved.
inline Dense rotation_average(const Dense& f, int samples = 64) {
  Dense h(f.D);
  for (int m = 0; m < samples; ++m) h = add(h, rotate(f, 2.0 * std::numbers::pi * m / samples), 1.0 / samples);
  return h;
}

struct DenseStep {
  Dense z;
  Dense chi;
};

// Solve {H0, chi} = Q - Z for homogeneous Q of degree d, H0 = omega (x^2 + y^2)/2.
inline DenseStep solve(const Dense& q, int d, double omega) {
  DenseStep s{rotation_average(q), Dense(q.D)};
  Eigen::MatrixXd L(d + 1, d + 1);
  for (int col = 0; col <= d; ++col) {
    Dense basis(q.D + 2);
    Dense h0wide(q.D + 2);
    h0wide.at(2, 0) = h0wide.at(0, 2) = omega / 2;
    basis.at(col, d - col) = 1.0;
    const Dense img = bracket(h0wide, basis);
    for (int row = 0; row <= d; ++row) L(row, col) = img.at(row, d - row);
  }
  Eigen::VectorXd rhs(d + 1);
  for (int row = 0; row <= d; ++row) rhs(row) = q.at(row, d - row) - s.z.at(row, d - row);
  const Eigen::VectorXd sol = L.completeOrthogonalDecomposition().solve(rhs);
  for (int col = 0; col <= d; ++col) s.chi.at(col, d - col) = sol(col);
  s.chi = add(s.chi, rotation_average(s.chi), -1.0);
  return s;
}

// exp(L_chi) f = sum_m L_chi^m f / m!
inline Dense lie_transform(const Dense& chi, const Dense& f) {
  Dense sum = f, term = f;
  for (int m = 1; m <= f.D; ++m) {
    term = bracket(chi, term);
    for (auto& row : term.c)
      for (auto& v : row) v /= m;
    sum = add(sum, term);
  }
  return sum;
}

struct DenseNormalForm {
  std::vector<Dense> z;               // z[s] has degree s + 2
  std::vector<Dense> chi;
  std::vector<Dense> first_remainder;  // degree q + 3 block after order q
  Dense final_h;
};

inline DenseNormalForm normalize(Dense h, double omega, int r_max) {
  DenseNormalForm out;
  out.z.assign(r_max + 1, Dense(h.D));
  out.chi.assign(r_max + 1, Dense(h.D));
  out.first_remainder.push_back(homogeneous(h, 3));
  for (int r = 1; r <= r_max; ++r) {
    const Dense q = homogeneous(h, r + 2);
    DenseStep s = solve(q, r + 2, omega);
    h = lie_transform(s.chi, h);
    out.z[r] = s.z;
    out.chi[r] = s.chi;
    if (r < r_max) out.first_remainder.push_back(homogeneous(h, r + 3));
  }
  out.final_h = h;
  return out;
}

}  // namespace oracle
