// Test-only oracles, independent of the library's closed-form implementations.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "hwsim/impairments.hpp"
#include "hwsim/numerics.hpp"
#include "hwsim/types.hpp"

namespace hwsim::oracles {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

template <typename F>
double integrate_panel(const GaussLegendre& rule, double a, double b, F&& f) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

/// P(N(0,1) > x) by direct integration of the density over [x, 45].
inline double gaussian_tail(double x) {
  static const GaussLegendre rule = gauss_legendre(24);
  const double upper = 45.0;
  if (x >= upper) return 0.0;
  const auto density = [](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  };
  double acc = 0.0;
  double lo = x;
  while (lo < upper) {
    const double hi = std::min(lo + 0.5, upper);
    acc += integrate_panel(rule, lo, hi, density);
    lo = hi;
  }
  return acc;
}

/// Quantizer linear-equivalent gain E[f_adc(p) p*] / E|p|^2 for
/// p ~ CN(0, complex_variance), by quadrature of the defining expectations.
/// Each real dimension is integrated piecewise between the quantizer
/// thresholds (the integrand is smooth inside each cell) and the two
/// dimensions are combined by Fubini.
inline double adc_gain_quadrature(const AdcParams& p, double complex_variance) {
  static const GaussLegendre rule = gauss_legendre(32);
  const double s = std::sqrt(0.5 * complex_variance);  // per-dimension std dev
  const double m_levels = std::exp2(p.bits - 1);       // 2^{q-1}
  const auto density = [s](double w) {
    return std::exp(-0.5 * w * w / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
  };
  const auto quant = [&p](double w) { return quantize_real(w, p); };

  double i_one = 0.0, i_w = 0.0, i_w2 = 0.0, i_q = 0.0, i_qw = 0.0;
  auto accumulate = [&](double a, double b) {
    if (a >= b) return;
    if (std::min(std::abs(a), std::abs(b)) > 15.0 * s && a * b > 0.0) return;  // negligible mass
    i_one += integrate_panel(rule, a, b, density);
    i_w += integrate_panel(rule, a, b, [&](double w) { return w * density(w); });
    i_w2 += integrate_panel(rule, a, b, [&](double w) { return w * w * density(w); });
    i_q += integrate_panel(rule, a, b, [&](double w) { return quant(w) * density(w); });
    i_qw += integrate_panel(rule, a, b, [&](double w) { return quant(w) * w * density(w); });
  };
  const double sat = p.step * m_levels;   // granular region edge
  const double tail = sat + 15.0 * s;
  accumulate(-tail, -sat);
  const std::int64_t cells = std::int64_t{1} << p.bits;
  for (std::int64_t c = 0; c < cells; ++c) {
    const double a = -sat + p.step * static_cast<double>(c);
    accumulate(a, a + p.step);
  }
  accumulate(sat, tail);

  // E[(Q(a)+jQ(b))(a-jb)] with independent a, b; the imaginary part cancels.
  const double numerator = i_qw * i_one + i_one * i_qw;
  const double denominator = i_w2 * i_one + i_one * i_w2;
  return numerator / denominator;
}

/// Mean squared Bussgang residual E|f_adc(p) - g p|^2 for p ~ CN(0, cv),
/// same quadrature scheme.
inline double adc_dist_quadrature(const AdcParams& p, double complex_variance, double gain) {
  static const GaussLegendre rule = gauss_legendre(32);
  const double s = std::sqrt(0.5 * complex_variance);
  const double m_levels = std::exp2(p.bits - 1);
  const auto density = [s](double w) {
    return std::exp(-0.5 * w * w / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
  };
  // |f(p)-gp|^2 = (Q(a)-ga)^2 + (Q(b)-gb)^2; by symmetry twice the 1-D integral.
  double acc = 0.0;
  auto accumulate = [&](double a, double b) {
    if (a >= b) return;
    if (std::min(std::abs(a), std::abs(b)) > 15.0 * s && a * b > 0.0) return;
    acc += integrate_panel(rule, a, b, [&](double w) {
      const double r = quantize_real(w, p) - gain * w;
      return r * r * density(w);
    });
  };
  const double sat = p.step * m_levels;
  const double tail = sat + 15.0 * s;
  accumulate(-tail, -sat);
  const std::int64_t cells = std::int64_t{1} << p.bits;
  for (std::int64_t c = 0; c < cells; ++c) {
    const double a = -sat + p.step * static_cast<double>(c);
    accumulate(a, a + p.step);
  }
  accumulate(sat, tail);
  return 2.0 * acc;
}

struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;  // for weight function e^{-x^2}
};

/// Classical Gauss-Hermite rule via sign-change scan plus Newton on the
/// orthonormal recurrence; weights from the Christoffel sum.
inline GaussHermite gauss_hermite(int n) {
  const auto eval = [n](double x, double& deriv_proxy, double& christoffel) {
    // orthonormal Hermite functions against e^{-x^2}
    double p_prev = 0.0;
    double p = std::pow(std::numbers::pi, -0.25);
    christoffel = p * p;
    for (int k = 0; k < n; ++k) {
      const double p_next = x * std::sqrt(2.0 / (k + 1.0)) * p -
                            std::sqrt(static_cast<double>(k) / (k + 1.0)) * p_prev;
      p_prev = p;
      p = p_next;
      if (k + 1 < n) christoffel += p * p;
    }
    deriv_proxy = p_prev;  // p_{n-1}, used in the Newton step below
    return p;              // p_n
  };
  const double reach = std::sqrt(2.0 * n + 1.0) + 1.0;
  const int scan = 40 * n;
  GaussHermite rule;
  double d, chr;
  double prev_x = -reach;
  double prev_v = eval(prev_x, d, chr);
  for (int i = 1; i <= scan; ++i) {
    const double x = -reach + 2.0 * reach * static_cast<double>(i) / scan;
    const double v = eval(x, d, chr);
    if (prev_v == 0.0 || prev_v * v < 0.0) {
      double lo = prev_x, hi = x;
      for (int b = 0; b < 80; ++b) {
        const double mid = 0.5 * (lo + hi);
        const double vm = eval(mid, d, chr);
        if (vm == 0.0) { lo = hi = mid; break; }
        if (vm * ((prev_v < 0) ? -1.0 : 1.0) > 0.0) lo = mid; else hi = mid;
      }
      const double root = 0.5 * (lo + hi);
      eval(root, d, chr);
      rule.nodes.push_back(root);
      rule.weights.push_back(1.0 / chr);
    }
    prev_x = x;
    prev_v = v;
  }
  return rule;
}

/// Plain Gauss-Hermite estimate of the quantizer gain (converges slowly on the
/// stepped integrand; used only as a loose cross-check).
inline double adc_gain_gauss_hermite(const AdcParams& p, double complex_variance, int n_nodes) {
  const GaussHermite rule = gauss_hermite(n_nodes);
  const double s = std::sqrt(0.5 * complex_variance);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double w = std::numbers::sqrt2 * s * rule.nodes[i];
    num += rule.weights[i] * quantize_real(w, p) * w;
    den += rule.weights[i] * w * w;
  }
  return num / den;  // the 1/sqrt(pi) normalizations cancel
}

/// Direct long-double DFT with the same unitary convention.
inline std::vector<cdouble> dft_direct(const std::vector<cdouble>& x, FftDirection dir) {
  const std::size_t n = x.size();
  const long double sign = dir == FftDirection::forward ? -1.0L : 1.0L;
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::vector<cdouble> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t m = 0; m < n; ++m) {
      const long double angle = sign * two_pi * static_cast<long double>(k * m % n) /
                                static_cast<long double>(n);
      const long double c = cosl(angle), s = sinl(angle);
      re += x[m].real() * c - x[m].imag() * s;
      im += x[m].real() * s + x[m].imag() * c;
    }
    const long double scale = 1.0L / sqrtl(static_cast<long double>(n));
    out[k] = cdouble(static_cast<double>(re * scale), static_cast<double>(im * scale));
  }
  return out;
}

}  // namespace hwsim::oracles
