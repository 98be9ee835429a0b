#include "bvc/field.hpp"

#include <string>

#include "bvc/error.hpp"

namespace bvc {

PrimalField::PrimalField(const PrimalSpace& space, Vector coefficients)
    : space_(&space), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space.dof_count())
    throw DimensionMismatch("PrimalField: " + std::to_string(coefficients_.size()) +
                            " coefficients for " + std::to_string(space.dof_count()) + " dofs");
}

double PrimalField::value(int cell, const LocalBasis& basis) const {
  const auto dofs = space_->cell_dofs(cell);
  double v = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i) v += coefficients_(dofs[i]) * basis.values(i);
  return v;
}

Vec2 PrimalField::gradient(int cell, const LocalBasis& basis) const {
  const auto dofs = space_->cell_dofs(cell);
  Vec2 g = Vec2::Zero();
  for (std::size_t i = 0; i < dofs.size(); ++i) g += coefficients_(dofs[i]) * basis.gradients.row(i).transpose();
  return g;
}

double PrimalField::value(int cell, const Vec2& xi) const {
  LocalBasis basis;
  space_->evaluate(cell, xi, basis);
  return value(cell, basis);
}

Vec2 PrimalField::gradient(int cell, const Vec2& xi) const {
  LocalBasis basis;
  space_->evaluate(cell, xi, basis);
  return gradient(cell, basis);
}

MultiplierField::MultiplierField(const MultiplierSpace& space, Vector coefficients)
    : space_(&space), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space.dof_count())
    throw DimensionMismatch("MultiplierField: " + std::to_string(coefficients_.size()) +
                            " coefficients for " + std::to_string(space.dof_count()) + " dofs");
}

double MultiplierField::value(int facet, double s) const {
  double psi[16];
  space_->evaluate(s, psi);
  double v = 0.0;
  for (int j = 0; j < space_->dofs_per_facet(); ++j) v += coefficients_(space_->facet_dof(facet, j)) * psi[j];
  return v;
}

}  // namespace bvc
