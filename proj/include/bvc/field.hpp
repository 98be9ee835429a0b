#pragma once

#include "bvc/spaces.hpp"

namespace bvc {

/// Discrete primal function u_h = sum_i c_i φ_i.
class PrimalField {
 public:
  PrimalField(const PrimalSpace& space, Vector coefficients);

  const PrimalSpace& space() const { return *space_; }
  const Vector& coefficients() const { return coefficients_; }

  double value(int cell, const Vec2& xi) const;
  Vec2 gradient(int cell, const Vec2& xi) const;
  /// Value and gradient from an already evaluated local basis.
  double value(int cell, const LocalBasis& basis) const;
  Vec2 gradient(int cell, const LocalBasis& basis) const;

 private:
  const PrimalSpace* space_;
  Vector coefficients_;
};

/// Discrete multiplier λ_h, facet-wise polynomial.
class MultiplierField {
 public:
  MultiplierField(const MultiplierSpace& space, Vector coefficients);

  const MultiplierSpace& space() const { return *space_; }
  const Vector& coefficients() const { return coefficients_; }
  double value(int facet, double s) const;

 private:
  const MultiplierSpace* space_;
  Vector coefficients_;
};

}  // namespace bvc
