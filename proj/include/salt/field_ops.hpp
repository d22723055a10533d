#pragma once

#include "salt/field.hpp"

namespace salt {

// Sign conventions used throughout:
//   perp gradient   grad_perp f = (d2 f, -d1 f)
//   curl            curl u      = d1 u2 - d2 u1
//   stream function laplacian(psi) = -omega,  u = grad_perp psi
// so curl(grad_perp psi) = -laplacian(psi) = omega.

/// Spectral gradient (d1 f, d2 f); Nyquist modes have zero derivative.
VectorField gradient(const ScalarField& f);
VectorField perp_gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField curl(const VectorField& u);
ScalarField laplacian(const ScalarField& f);

/// Solves laplacian(psi) = -(f - mean f) with mean(psi) = 0.
ScalarField invert_laplacian(const ScalarField& f);

/// Velocity from vorticity: u = grad_perp(invert_laplacian(omega)).
VectorField biot_savart(const ScalarField& omega);

/// Dealiased u . grad(omega).
ScalarField advection(const VectorField& u, const ScalarField& omega);

/// e = 1/2 * integral |biot_savart(omega)|^2.
double kinetic_energy(const ScalarField& omega);

/// L2(T^2) pairing h^2 sum f g.
double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& u, const VectorField& v);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& u);
double mean(const ScalarField& f);
double max_abs(const ScalarField& f);
double max_abs(const VectorField& u);

/// H^{k,2} norm: (sum_k (1 + 4 pi^2 |k|^2)^order |c(k)|^2)^(1/2).
/// Throws std::invalid_argument for negative order.
double sobolev_norm(const ScalarField& f, int order);

}  // namespace salt
