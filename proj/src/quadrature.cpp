#include "bvc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bvc/error.hpp"

namespace bvc {

double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_derivative(int n, double x) {
  // P'_n = sum over k = n-1, n-3, ... of (2k+1) P_k
  double d = 0.0;
  for (int k = n - 1; k >= 0; k -= 2) d += (2 * k + 1) * legendre(k, x);
  return d;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(n, x) / legendre_derivative(n, x);
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_derivative(n, x);
    // Map from [-1,1] to [0,1]; nodes ascending.
    nodes[n - 1 - i] = 0.5 * (x + 1.0);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

void add_orbit3(QuadratureRule& rule, double a, double w) {
  // Points with barycentrics (a, a, 1-2a) and permutations.
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a});
  rule.points.push_back({b, a});
  rule.points.push_back({a, b});
  for (int i = 0; i < 3; ++i) rule.weights.push_back(w);
}

// Symmetric rules on the reference triangle (area 1/2) for low degrees;
// higher degrees use the collapsed Gauss product rule.
QuadratureRule symmetric_triangle_rule(int degree) {
  QuadratureRule rule;
  switch (degree) {
    case 0:
    case 1:
      rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(0.5);
      rule.exactness = 1;
      break;
    case 2:
      add_orbit3(rule, 1.0 / 6.0, 1.0 / 6.0);
      rule.exactness = 2;
      break;
    case 3:
    case 4:
      add_orbit3(rule, 0.445948490915965, 0.5 * 0.223381589678011);
      add_orbit3(rule, 0.091576213509771, 0.5 * 0.109951743655322);
      rule.exactness = 4;
      break;
    case 5: {
      const double s15 = std::sqrt(15.0);
      rule.points.push_back({1.0 / 3.0, 1.0 / 3.0});
      rule.weights.push_back(0.5 * 9.0 / 40.0);
      add_orbit3(rule, (6.0 - s15) / 21.0, 0.5 * (155.0 - s15) / 1200.0);
      add_orbit3(rule, (6.0 + s15) / 21.0, 0.5 * (155.0 + s15) / 1200.0);
      rule.exactness = 5;
      break;
    }
    default:
      break;
  }
  return rule;
}

}  // namespace

QuadratureRule quadrature(QuadratureDomain kind, int exactness_degree) {
  if (exactness_degree < 0 || exactness_degree > 20)
    throw UnsupportedDegree("quadrature: unsupported exactness degree " +
                            std::to_string(exactness_degree));
  QuadratureRule rule;
  std::vector<double> x, w;
  switch (kind) {
    case QuadratureDomain::segment: {
      const int n = std::max(1, (exactness_degree + 2) / 2);
      gauss_legendre(n, x, w);
      for (int i = 0; i < n; ++i) {
        rule.points.push_back({x[i], 0.0});
        rule.weights.push_back(w[i]);
      }
      rule.exactness = 2 * n - 1;
      break;
    }
    case QuadratureDomain::quad: {
      const int n = std::max(1, (exactness_degree + 2) / 2);
      gauss_legendre(n, x, w);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          rule.points.push_back({x[i], x[j]});
          rule.weights.push_back(w[i] * w[j]);
        }
      rule.exactness = 2 * n - 1;
      break;
    }
    case QuadratureDomain::triangle: {
      if (exactness_degree <= 5) return symmetric_triangle_rule(exactness_degree);
      // Duffy collapse: ∫_T f = ∫∫ f(u, (1-u)v)(1-u) du dv; the extra factor
      // raises the degree in u by one.
      const int n = (exactness_degree + 3) / 2;
      gauss_legendre(n, x, w);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double u = x[i], v = x[j];
          rule.points.push_back({u, (1.0 - u) * v});
          rule.weights.push_back(w[i] * w[j] * (1.0 - u));
        }
      rule.exactness = 2 * n - 2;
      break;
    }
  }
  return rule;
}

}  // namespace bvc
