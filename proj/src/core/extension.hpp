#pragma once

#include "core/mesh.hpp"

namespace homog::fem {

// decreasing quintic ramp: 1 at s <= 0, 0 at s >= 1, value 1/2 at s = 1/2,
// zero slope at both ends, steepest slope 15/8 in the middle
double quinticRamp(double s);

// boundary cutoff theta(x) = quinticRamp(dist / width): 1 on the boundary of
// the box carrier, 0 at inner distance >= width
double boundaryCutoff(double dist, double width);

// distance from x to the boundary of the box carrier (inside counts positive,
// outside clamps to 0)
double boundaryDistance(const Grid& g, const double* x);

// max-norm distance from x to the box itself; 0 inside
double outsideDistance(const Grid& g, const double* x);

/*! Reflects a box field through every face, `pad` cells deep per axis, with
 *  the order-2 rule  u(-t) = 3 u(t) - 2 u(2t)  (indices clamped to the carrier),
 *  composing axes sequentially.  The result lives on the enlarged box; values
 *  on the original carrier are preserved exactly.
 *  Requires 1 <= pad <= cells per axis.
 */
Field hestenesExtend(const Field& u, long pad);

/*! Multiplies an extended field in place by the taper that is 1 on the
 *  original box and out to pad*h/2 beyond it, then falls smoothly to 0 at
 *  pad*h (max-norm exterior distance; isotropic spacing assumed).
 */
void taperExtension(Field& ext, const Grid& original, long pad);

Field extendTapered(const Field& u, long pad);

}  // namespace homog::fem
