#pragma once

#include "core/mesh.hpp"

namespace homog::fem {

// Discrete norms in the reference metric (identity coefficient, plain
// gradients), exact for Q1 fields: element Gauss quadrature of |u|^2 agrees
// with the consistent-mass quadratic form.

double normL2(const Field& u);
double normH1semi(const Field& u);
double normH1(const Field& u);

double normL2Diff(const Field& a, const Field& b);
double normH1Diff(const Field& a, const Field& b);

enum class StripSide {
  Inner,    // { x in domain : dist(x, boundary) < width }
  TwoSided  // { x : dist(x, boundary) < width }, inside and outside
};

/*! Integral of |u|^2 over a boundary strip of the axis-aligned box `domain`.
 *  The field may live on a larger carrier (an extension of the domain); the
 *  two-sided strip then reaches into the surrounding collar, which must be at
 *  least `width` wide.
 *
 *  Elements are split 4 per axis and each subcell contributes its midpoint
 *  value times its volume when the midpoint lies in the strip, so the
 *  resolved geometry is h/4-accurate; callers should keep width >= 4 h.
 */
double stripL2Sq(const Field& u, const Grid& domain, double width, StripSide side);

// strip of the field's own carrier, inner side
double stripL2Sq(const Field& u, double width);

// ||u|| / (diam(carrier) * ||Du||); at most 1 for fields vanishing on the
// boundary of a box grid
double friedrichsRatio(const Field& u);

}  // namespace homog::fem
