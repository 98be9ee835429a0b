#pragma once

#include <limits>
#include <span>
#include <vector>

#include "bvc/field.hpp"
#include "bvc/geometry.hpp"

namespace bvc {

/// Per-level record of a convergence study.
struct ErrorReport {
  int level = 0;
  double h = 0.0;
  int nno = 0;
  int dofs_u = 0;
  int dofs_lambda = 0;
  double err_l2 = 0.0;
  double err_h1 = 0.0;
  double err_lambda = 0.0;  // zero when the method has no multiplier
  double triple = 0.0;
  double delta_h = 0.0;
  double normal_dev = 0.0;
};

struct L2H1Errors {
  double l2 = 0.0;
  double h1 = 0.0;  // seminorm
};

/// ‖u - u_h‖ and ‖∇(u - u_h)‖ over Ω_h by cellwise quadrature of the given
/// degree (default 2k+4).
L2H1Errors l2_h1_errors(const PrimalField& u_h, const ImplicitDomain& domain, int degree = -1,
                        ExecPolicy policy = ExecPolicy::parallel);

/// ‖a - b‖ over Ω_h for two fields on the same space.
double l2_distance(const PrimalField& a, const PrimalField& b, int degree = -1);

enum class MultiplierNormal { discrete, exact };

/// ‖(-n·∇u) - λ_h‖ on ∂Ω_h with n = n_h (default) or n∘p_h.
double multiplier_error(const MultiplierField& lambda, const ImplicitDomain& domain,
                        MultiplierNormal normal = MultiplierNormal::discrete);

/// ‖∇v‖_Ω_h + ‖h^{-1/2} v‖_∂Ω_h + ‖h^{1/2} μ‖_∂Ω_h.
double triple_norm(const PrimalField& v, const MultiplierField& mu, double h);
double triple_norm(const PrimalField& v, double h);

/// Triple norm of (u - u_h, λ̃ - λ_h) with λ̃ = -n_h·∇u on ∂Ω_h.
double triple_norm_error(const PrimalField& u_h, const MultiplierField& lambda_h, const ImplicitDomain& domain,
                         double h);

/// Least-squares slope of log(err) against log(h). Throws DegenerateFit when
/// an error is ≤ 1e-14 or fewer than two points are given.
double fit_slope(std::span<const double> h, std::span<const double> err);

struct Rate {
  double least_squares = std::numeric_limits<double>::quiet_NaN();  // all levels
  double windowed = std::numeric_limits<double>::quiet_NaN();       // last `window` levels
  double last_interval = std::numeric_limits<double>::quiet_NaN();
};

struct RateTable {
  Rate l2, h1, lambda, triple;
};

/// Requires ≥ 3 levels with strictly decreasing h. Norms that vanish on
/// every level (no multiplier) are left as NaN.
RateTable fit_rates(const std::vector<ErrorReport>& reports, int window = 3);

/// Smallest generalized singular value of B between the multiplier norm
/// ‖h^{1/2}μ‖_∂ and the primal norm (‖∇v‖² + ‖h^{-1/2}v‖²_∂)^{1/2}.
/// Dense; throws TooLarge above 5000 primal dofs.
double infsup_diagnostic(const PrimalSpace& primal, const MultiplierSpace& multipliers);

struct GeometryReport {
  double delta_h = 0.0;     // max |ρ_h|
  double normal_dev = 0.0;  // max |n_h - n∘p_h|
};

GeometryReport geometry_report(const Mesh& mesh, const ImplicitDomain& domain);

}  // namespace bvc
