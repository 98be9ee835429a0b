#include "bvc/analysis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "bvc/assembly.hpp"
#include "bvc/error.hpp"
#include "bvc/parallel.hpp"
#include "bvc/quadrature.hpp"

namespace bvc {

namespace {

QuadratureRule error_rule(const PrimalSpace& space, int degree) {
  const auto kind = space.mesh().kind() == CellKind::triangle ? QuadratureDomain::triangle : QuadratureDomain::quad;
  return quadrature(kind, degree >= 0 ? degree : 2 * space.degree() + 4);
}

struct CellErrors {
  LocalBasis basis;
  double l2 = 0.0;
  double h1 = 0.0;
};

// Facet quadrature sum of `integrand(facet, qp, basis)`, where basis is the
// adjacent cell's basis at the quadrature point.
double facet_sum(const PrimalSpace& space,
                 const std::function<double(int, const FacetQuadPoint&, const LocalBasis&)>& integrand) {
  const Mesh& mesh = space.mesh();
  if (!mesh.has_facet_geometry()) throw std::invalid_argument("facet geometry has not been precomputed");
  LocalBasis basis;
  double sum = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facet(f);
    for (const FacetQuadPoint& qp : facet.quad_points) {
      space.evaluate(facet.cell, space.to_reference(facet.cell, qp.point), basis);
      sum += qp.weight * integrand(f, qp, basis);
    }
  }
  return sum;
}

double gradient_seminorm_squared(const PrimalField& v) {
  const PrimalSpace& space = v.space();
  const QuadratureRule rule = error_rule(space, -1);
  LocalBasis basis;
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const double det = space.jacobian_determinant(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.evaluate(c, rule.points[q], basis);
      sum += rule.weights[q] * det * v.gradient(c, basis).squaredNorm();
    }
  }
  return sum;
}

}  // namespace

L2H1Errors l2_h1_errors(const PrimalField& u_h, const ImplicitDomain& domain, int degree, ExecPolicy policy) {
  const PrimalSpace& space = u_h.space();
  const QuadratureRule rule = error_rule(space, degree);
  double l2 = 0.0, h1 = 0.0;
  auto compute = [&](int c, CellErrors& local) {
    local.l2 = 0.0;
    local.h1 = 0.0;
    const double det = space.jacobian_determinant(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.evaluate(c, rule.points[q], local.basis);
      const Vec2 x = space.to_physical(c, rule.points[q]);
      const double w = rule.weights[q] * det;
      const double e = domain.u_exact(x) - u_h.value(c, local.basis);
      local.l2 += w * e * e;
      local.h1 += w * (domain.grad_u_exact(x) - u_h.gradient(c, local.basis)).squaredNorm();
    }
  };
  auto emit = [&](int, const CellErrors& local) {
    l2 += local.l2;
    h1 += local.h1;
  };
  for_each_local<CellErrors>(space.mesh().num_cells(), policy, compute, emit);
  return {std::sqrt(l2), std::sqrt(h1)};
}

double l2_distance(const PrimalField& a, const PrimalField& b, int degree) {
  if (&a.space() != &b.space()) throw DimensionMismatch("l2_distance: fields live on different spaces");
  const PrimalSpace& space = a.space();
  const QuadratureRule rule = error_rule(space, degree);
  LocalBasis basis;
  double sum = 0.0;
  for (int c = 0; c < space.mesh().num_cells(); ++c) {
    const double det = space.jacobian_determinant(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.evaluate(c, rule.points[q], basis);
      const double d = a.value(c, basis) - b.value(c, basis);
      sum += rule.weights[q] * det * d * d;
    }
  }
  return std::sqrt(sum);
}

double multiplier_error(const MultiplierField& lambda, const ImplicitDomain& domain, MultiplierNormal normal) {
  const Mesh& mesh = lambda.space().mesh();
  if (!mesh.has_facet_geometry()) throw std::invalid_argument("multiplier_error: facet geometry missing");
  double sum = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facet(f);
    for (const FacetQuadPoint& qp : facet.quad_points) {
      const Vec2 n = normal == MultiplierNormal::discrete ? facet.normal : exact_normal(domain, qp.pullback);
      const double e = -n.dot(domain.grad_u_exact(qp.point)) - lambda.value(f, qp.s);
      sum += qp.weight * e * e;
    }
  }
  return std::sqrt(sum);
}

double triple_norm(const PrimalField& v, double h) {
  const double trace = facet_sum(v.space(), [&](int f, const FacetQuadPoint&, const LocalBasis& basis) {
    const double value = v.value(v.space().mesh().facet(f).cell, basis);
    return value * value;
  });
  return std::sqrt(gradient_seminorm_squared(v)) + std::sqrt(trace / h);
}

double triple_norm(const PrimalField& v, const MultiplierField& mu, double h) {
  if (&v.space().mesh() != &mu.space().mesh()) throw DimensionMismatch("triple_norm: fields on different meshes");
  const Mesh& mesh = mu.space().mesh();
  double mu_sq = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f)
    for (const FacetQuadPoint& qp : mesh.facet(f).quad_points) {
      const double m = mu.value(f, qp.s);
      mu_sq += qp.weight * m * m;
    }
  return triple_norm(v, h) + std::sqrt(h * mu_sq);
}

double triple_norm_error(const PrimalField& u_h, const MultiplierField& lambda_h, const ImplicitDomain& domain,
                         double h) {
  const PrimalSpace& space = u_h.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule rule = error_rule(space, -1);
  LocalBasis basis;
  double grad_sq = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double det = space.jacobian_determinant(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      space.evaluate(c, rule.points[q], basis);
      const Vec2 x = space.to_physical(c, rule.points[q]);
      grad_sq += rule.weights[q] * det * (domain.grad_u_exact(x) - u_h.gradient(c, basis)).squaredNorm();
    }
  }
  double trace_sq = 0.0, mu_sq = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facet(f);
    for (const FacetQuadPoint& qp : facet.quad_points) {
      space.evaluate(facet.cell, space.to_reference(facet.cell, qp.point), basis);
      const double e = domain.u_exact(qp.point) - u_h.value(facet.cell, basis);
      const double m = -facet.normal.dot(domain.grad_u_exact(qp.point)) - lambda_h.value(f, qp.s);
      trace_sq += qp.weight * e * e;
      mu_sq += qp.weight * m * m;
    }
  }
  return std::sqrt(grad_sq) + std::sqrt(trace_sq / h) + std::sqrt(h * mu_sq);
}

double fit_slope(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) throw DegenerateFit("fit_slope: need at least two (h, err) pairs");
  const std::size_t n = h.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(err[i] > 1e-14)) throw DegenerateFit("fit_slope: error " + std::to_string(err[i]) + " is not resolvable");
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw DegenerateFit("fit_slope: mesh sizes are not distinct");
  return (n * sxy - sx * sy) / denom;
}

RateTable fit_rates(const std::vector<ErrorReport>& reports, int window) {
  if (reports.size() < 3) throw DegenerateFit("fit_rates: need at least 3 levels");
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (!(reports[i].h < reports[i - 1].h)) throw DegenerateFit("fit_rates: h must decrease strictly");
  std::vector<double> h;
  for (const auto& r : reports) h.push_back(r.h);

  auto rate_of = [&](auto member) {
    std::vector<double> e;
    bool any = false;
    for (const auto& r : reports) {
      e.push_back(r.*member);
      any = any || r.*member != 0.0;
    }
    Rate rate;
    if (!any) return rate;
    const std::size_t n = e.size();
    const std::size_t w = std::min<std::size_t>(std::max(window, 2), n);
    rate.least_squares = fit_slope(h, e);
    rate.windowed = fit_slope(std::span(h).subspan(n - w), std::span(e).subspan(n - w));
    rate.last_interval = fit_slope(std::span(h).subspan(n - 2), std::span(e).subspan(n - 2));
    return rate;
  };
  RateTable table;
  table.l2 = rate_of(&ErrorReport::err_l2);
  table.h1 = rate_of(&ErrorReport::err_h1);
  table.lambda = rate_of(&ErrorReport::err_lambda);
  table.triple = rate_of(&ErrorReport::triple);
  return table;
}

double infsup_diagnostic(const PrimalSpace& primal, const MultiplierSpace& multipliers) {
  if (primal.dof_count() > 5000)
    throw TooLarge("infsup_diagnostic: " + std::to_string(primal.dof_count()) + " primal dofs exceed 5000");
  if (&primal.mesh() != &multipliers.mesh()) throw DimensionMismatch("infsup_diagnostic: spaces on different meshes");
  const Mesh& mesh = primal.mesh();
  const double h = mesh.h();

  // Only K and B are needed; the domain data does not enter these blocks.
  ImplicitDomain zero;
  zero.f_rhs = [](const Vec2&) { return 0.0; };
  zero.g_dirichlet = [](const Vec2&) { return 0.0; };
  AssemblyOptions options;
  options.policy = ExecPolicy::serial;
  const SaddleSystem system = assemble_unmodified(primal, multipliers, zero, options);

  const DenseMatrix MV = DenseMatrix(system.K) + DenseMatrix(primal_boundary_mass(primal)) / h;
  const DenseMatrix ML = h * DenseMatrix(multiplier_mass(multipliers));
  const DenseMatrix B = DenseMatrix(system.B);
  const Eigen::LLT<DenseMatrix> chol(MV);
  if (chol.info() != Eigen::Success) throw std::runtime_error("infsup_diagnostic: primal norm matrix is not SPD");
  const DenseMatrix S = B * chol.solve(B.transpose());
  const DenseMatrix Ssym = 0.5 * (S + S.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> eig(Ssym, ML, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw std::runtime_error("infsup_diagnostic: eigen solver failed");
  return std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
}

GeometryReport geometry_report(const Mesh& mesh, const ImplicitDomain& domain) {
  if (!mesh.has_facet_geometry()) throw std::invalid_argument("geometry_report: facet geometry missing");
  GeometryReport report;
  for (const auto& facet : mesh.facets())
    for (const auto& qp : facet.quad_points) {
      report.delta_h = std::max(report.delta_h, std::abs(qp.rho));
      report.normal_dev = std::max(report.normal_dev, (facet.normal - exact_normal(domain, qp.pullback)).norm());
    }
  return report;
}

}  // namespace bvc
