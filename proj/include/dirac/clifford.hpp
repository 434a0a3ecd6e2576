#pragma once

#include "dirac/linalg.hpp"

namespace dirac {

// The standard 4x4 Dirac matrices: beta = blockdiag(I, -I) and
// alpha_k = offdiag(sigma_k, sigma_k) with the Pauli matrices sigma_k.
struct DiracMatrices {
    Mat4c alpha[3];
    Mat4c beta;

    static DiracMatrices build();
};

// Real 8x8 representation acting on the (Re psi, Im psi) stacking of a
// 4-spinor. Lambda1..Lambda3 are symmetric, Lambda0 is antisymmetric, and
// together they satisfy the same anticommutation relations as the alphas,
// with Lambda0^2 = -I. Carries the mass and everything derived from it:
// the dispersion relation, the first-order symbol, and the propagator
// symbols of the forward and adjoint groups.
class RealSymbols {
public:
    explicit RealSymbols(double mass);

    double mass() const { return mass_; }
    const Mat8d& lambda(int axis) const { return lambda_[axis]; }  // axis 0..2
    const Mat8d& lambda0() const { return lambda0_; }

    // omega(k) = sqrt(|k|^2 + m^2)
    double dispersion(const Vec3& k) const;

    // P(-ik) = -i (Lambda . k) + m Lambda0; skew-Hermitian,
    // squares to -omega(k)^2 I.
    Mat8c symbol_p(const Vec3& k) const;

    // Per-mode evolution matrix: cos(omega t) I - P(-ik) sin(omega t)/omega.
    Mat8c propagator(const Vec3& k, double t) const;

    // Per-mode evolution of test functions; equals propagator(k,t)^dagger
    // and the transpose of propagator(-k,t).
    Mat8c adjoint_propagator(const Vec3& k, double t) const;

    // In-place column transforms used by the analytics hot loops:
    // out = propagator(k,t) * in without forming the matrix.
    Vec8c apply_propagator(const Vec3& k, double t, const Vec8c& in) const;
    Vec8c apply_adjoint_propagator(const Vec3& k, double t, const Vec8c& in) const;
    Vec8c apply_symbol_p(const Vec3& k, const Vec8c& in) const;

    // Complex 4x4 form of the propagator symbol,
    // cos(omega t) I - i(beta m - alpha . k) sin(omega t)/omega,
    // kept as an independent cross-check route for the evolution.
    Mat4c propagator_complex4(const Vec3& k, double t) const;

private:
    double mass_;
    Mat8d lambda_[3];
    Mat8d lambda0_;
    DiracMatrices dm_;
    // (row, col, sign) triplets: each Lambda is a signed permutation.
    struct PermEntry { int col; double sign; };
    PermEntry perm_[4][8];  // index 0..2 -> Lambda_{1..3}, 3 -> Lambda0
};

}  // namespace dirac
