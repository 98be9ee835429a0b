#include "bvc/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bvc/error.hpp"

namespace bvc {

namespace {

constexpr double kInner = 0.25;
constexpr double kOuter = 0.75;
constexpr int kRaySamples = 64;
constexpr double kBisectionWidth = 1e-8;
constexpr int kNewtonSteps = 3;
constexpr double kBoundaryTolerance = 1e-12;

std::string describe(const Vec2& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x.x() << ", " << x.y() << ")";
  return os.str();
}

}  // namespace

ImplicitDomain ring_domain() {
  ImplicitDomain d;
  d.name = "ring";
  d.level_set = [](const Vec2& x) {
    const double r = x.norm();
    return std::max(kInner - r, r - kOuter);
  };
  d.level_set_gradient = [](const Vec2& x) -> Vec2 {
    const double r = x.norm();
    if (r == 0.0) return Vec2::Zero();
    return (r < 0.5 ? -1.0 : 1.0) * x / r;
  };
  d.u_exact = [](const Vec2& x) {
    const double r = x.norm();
    return (r - kInner) * (kOuter - r);
  };
  d.grad_u_exact = [](const Vec2& x) -> Vec2 {
    const double r = x.norm();
    return (1.0 - 2.0 * r) * x / r;
  };
  // u = -r² + r - 3/16, so Δu = u'' + u'/r = -4 + 1/r.
  d.f_rhs = [](const Vec2& x) { return 4.0 - 1.0 / x.norm(); };
  d.g_dirichlet = d.u_exact;
  d.delta0 = 0.12;
  d.lipschitz = 1.0;
  d.analytic_closest_point = [](const Vec2& x) -> Vec2 {
    const double r = x.norm();
    if (r == 0.0) throw NoConvergence("closest point undefined at the ring centre");
    return (r < 0.5 ? kInner : kOuter) * x / r;
  };
  return d;
}

ImplicitDomain ellipse_domain() {
  ImplicitDomain d;
  d.name = "ellipse";
  d.level_set = [](const Vec2& x) {
    return 0.25 * x.x() * x.x() + x.y() * x.y() - 1.0;
  };
  d.level_set_gradient = [](const Vec2& x) -> Vec2 {
    return {0.5 * x.x(), 2.0 * x.y()};
  };
  d.u_exact = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return std::sin(x * x * x) * std::cos(8.0 * y * y * y);
  };
  d.grad_u_exact = [](const Vec2& p) -> Vec2 {
    const double x = p.x(), y = p.y();
    const double x3 = x * x * x, y3 = 8.0 * y * y * y;
    return {3.0 * x * x * std::cos(x3) * std::cos(y3),
            -24.0 * y * y * std::sin(x3) * std::sin(y3)};
  };
  d.f_rhs = [](const Vec2& p) {
    const double x = p.x(), y = p.y();
    const double x3 = x * x * x, y3 = 8.0 * y * y * y;
    const double sx = std::sin(x3), cx = std::cos(x3);
    const double sy = std::sin(y3), cy = std::cos(y3);
    const double uxx = 6.0 * x * cx * cy - 9.0 * x * x * x * x * sx * cy;
    const double uyy = -48.0 * y * sx * sy - 576.0 * y * y * y * y * sx * cy;
    return -(uxx + uyy);
  };
  d.g_dirichlet = d.u_exact;
  d.delta0 = 0.5;
  // |∇φ| = |(x/2, 2y)| stays below 3 for |y| ≤ 1.5, |x| ≤ 2.5.
  d.lipschitz = 3.2;
  return d;
}

ImplicitDomain unit_circle_domain() {
  ImplicitDomain d;
  d.name = "unit-circle";
  d.level_set = [](const Vec2& x) { return x.squaredNorm() - 1.0; };
  d.level_set_gradient = [](const Vec2& x) -> Vec2 { return 2.0 * x; };
  d.u_exact = [](const Vec2& x) { return 1.0 - x.squaredNorm(); };
  d.grad_u_exact = [](const Vec2& x) -> Vec2 { return -2.0 * x; };
  d.f_rhs = [](const Vec2&) { return 4.0; };
  d.g_dirichlet = d.u_exact;
  d.delta0 = 0.25;
  d.lipschitz = 2.5;
  d.analytic_closest_point = [](const Vec2& x) -> Vec2 {
    const double r = x.norm();
    if (r == 0.0) throw NoConvergence("closest point undefined at the disc centre");
    return x / r;
  };
  return d;
}

ImplicitDomain convex_polygon_domain(std::vector<Vec2> vertices, double c0,
                                     double c1, double c2) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  struct Edge {
    Vec2 origin;
    Vec2 normal;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % vertices.size()];
    const Vec2 t = (b - a).normalized();
    edges.push_back({a, Vec2(t.y(), -t.x())});
  }
  auto active = [edges](const Vec2& x) {
    std::size_t best = 0;
    double value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double v = edges[i].normal.dot(x - edges[i].origin);
      if (v > value) {
        value = v;
        best = i;
      }
    }
    return std::pair{best, value};
  };

  ImplicitDomain d;
  d.name = "polygon";
  d.level_set = [active](const Vec2& x) { return active(x).second; };
  d.level_set_gradient = [active, edges](const Vec2& x) -> Vec2 {
    return edges[active(x).first].normal;
  };
  d.u_exact = [=](const Vec2& x) { return c0 + c1 * x.x() + c2 * x.y(); };
  d.grad_u_exact = [=](const Vec2&) -> Vec2 { return {c1, c2}; };
  d.f_rhs = [](const Vec2&) { return 0.0; };
  d.g_dirichlet = d.u_exact;
  d.delta0 = 0.1;
  d.lipschitz = 1.0;
  return d;
}

Vec2 exact_normal(const ImplicitDomain& domain, const Vec2& y) {
  if (std::abs(domain.level_set(y)) > 1e-10)
    throw std::invalid_argument("exact_normal: point " + describe(y) + " is not on the boundary");
  const Vec2 g = domain.level_set_gradient(y);
  const double norm = g.norm();
  if (norm < 1e-14) throw ZeroGradient("level set gradient vanishes at " + describe(y));
  return g / norm;
}

double ray_distance(const ImplicitDomain& domain, const Vec2& x, const Vec2& n_h) {
  const double phi0 = domain.level_set(x);
  if (phi0 == 0.0) return 0.0;
  const double delta0 = domain.delta0;
  if (std::abs(phi0) > domain.lipschitz * delta0)
    throw NoIntersection("ray_distance: " + describe(x) + " lies outside the trusted tube");

  auto g = [&](double s) { return domain.level_set(x + s * n_h); };
  auto dg = [&](double s) { return domain.level_set_gradient(x + s * n_h).dot(n_h); };

  auto refine = [&](double a, double b, double ga) {
    while (b - a > kBisectionWidth) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if (gm == 0.0) return m;
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    double s = 0.5 * (a + b);
    for (int it = 0; it < kNewtonSteps; ++it) {
      const double slope = dg(s);
      if (slope == 0.0) break;
      const double next = s - g(s) / slope;
      if (next < a - kBisectionWidth || next > b + kBisectionWidth) break;
      s = next;
    }
    // Non-smooth level sets (kinks) can stall Newton; finish by bisection.
    if (std::abs(g(s)) > kBoundaryTolerance) {
      while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a))) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      s = std::abs(g(a)) < std::abs(g(b)) ? a : b;
    }
    return s;
  };

  bool found = false;
  double best = 0.0;
  auto consider = [&](double s) {
    if (!found || std::abs(s) < std::abs(best) ||
        (std::abs(s) == std::abs(best) && s > best)) {
      best = s;
      found = true;
    }
  };

  const double step = 2.0 * delta0 / (kRaySamples - 1);
  double s_prev = -delta0;
  double g_prev = g(s_prev);
  if (g_prev == 0.0) consider(s_prev);
  for (int i = 1; i < kRaySamples; ++i) {
    const double s = (i == kRaySamples - 1) ? delta0 : -delta0 + i * step;
    const double gs = g(s);
    if (gs == 0.0) {
      consider(s);
    } else if (g_prev != 0.0 && (gs < 0.0) != (g_prev < 0.0)) {
      consider(refine(s_prev, s, g_prev));
    }
    s_prev = s;
    g_prev = gs;
  }
  if (!found)
    throw NoIntersection("ray_distance: no boundary crossing within the tube from " + describe(x));
  return best;
}

Vec2 pullback_point(const ImplicitDomain& domain, const Vec2& x, const Vec2& n_h) {
  return x + ray_distance(domain, x, n_h) * n_h;
}

Vec2 closest_point(const ImplicitDomain& domain, const Vec2& x) {
  if (domain.analytic_closest_point) return domain.analytic_closest_point(x);

  constexpr int kMaxIterations = 100;
  Vec2 y = x;
  for (int it = 0; it < kMaxIterations; ++it) {
    // Newton projection onto the zero set along the gradient.
    for (int inner = 0; inner < 50; ++inner) {
      const double v = domain.level_set(y);
      if (std::abs(v) <= 1e-15) break;
      const Vec2 grad = domain.level_set_gradient(y);
      const double g2 = grad.squaredNorm();
      if (g2 < 1e-28) throw ZeroGradient("closest_point: gradient vanishes at " + describe(y));
      y -= v * grad / g2;
    }
    const Vec2 grad = domain.level_set_gradient(y);
    const Vec2 n = grad.normalized();
    const Vec2 d = x - y;
    const Vec2 tangential = d - d.dot(n) * n;
    if (std::abs(domain.level_set(y)) <= kBoundaryTolerance && tangential.norm() <= 1e-10)
      return y;
    y += tangential;
  }
  throw NoConvergence("closest_point: projection did not converge from " + describe(x));
}

}  // namespace bvc
