#pragma once

#include <vector>

#include "bvc/types.hpp"

namespace bvc {

enum class QuadratureDomain { segment, triangle, quad };

// Reference domains: segment [0,1], triangle (0,0)-(1,0)-(0,1), quad [0,1]².
// For segments only the x coordinate of each point is used.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness = 0;

  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Rule exact for polynomials of total degree ≤ exactness_degree (≤ 20).
QuadratureRule quadrature(QuadratureDomain kind, int exactness_degree);

/// Legendre polynomial P_n(x) and its derivative.
double legendre(int n, double x);
double legendre_derivative(int n, double x);

}  // namespace bvc
