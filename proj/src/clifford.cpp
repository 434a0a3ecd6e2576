#include "dirac/clifford.hpp"

#include <cmath>
#include <stdexcept>

namespace dirac {

DiracMatrices DiracMatrices::build()
{
    const cplx i(0.0, 1.0);
    Eigen::Matrix2cd sigma1, sigma2, sigma3, id2;
    sigma1 << 0, 1, 1, 0;
    sigma2 << 0, -i, i, 0;
    sigma3 << 1, 0, 0, -1;
    id2.setIdentity();

    DiracMatrices dm;
    Eigen::Matrix2cd sigmas[3] = {sigma1, sigma2, sigma3};
    for (int a = 0; a < 3; ++a) {
        dm.alpha[a].setZero();
        dm.alpha[a].block<2, 2>(0, 2) = sigmas[a];
        dm.alpha[a].block<2, 2>(2, 0) = sigmas[a];
    }
    dm.beta.setZero();
    dm.beta.block<2, 2>(0, 0) = id2;
    dm.beta.block<2, 2>(2, 2) = -id2;
    return dm;
}

RealSymbols::RealSymbols(double mass) : mass_(mass), dm_(DiracMatrices::build())
{
    if (!(mass > 0.0))
        throw std::invalid_argument("RealSymbols: mass must be positive");

    // alpha1, alpha3 and beta are real; i*alpha2 is real. Assemble the
    // 8x8 blocks from them.
    Mat4c ia2 = cplx(0, 1) * dm_.alpha[1];
    auto realize = [](const Mat4c& m) {
        Eigen::Matrix4d r;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) r(a, b) = m(a, b).real();
        return r;
    };
    Eigen::Matrix4d a1 = realize(dm_.alpha[0]);
    Eigen::Matrix4d a3 = realize(dm_.alpha[2]);
    Eigen::Matrix4d A2 = realize(ia2);
    Eigen::Matrix4d b = realize(dm_.beta);

    lambda_[0].setZero();
    lambda_[0].block<4, 4>(0, 0) = a1;
    lambda_[0].block<4, 4>(4, 4) = a1;

    lambda_[1].setZero();
    lambda_[1].block<4, 4>(0, 4) = A2;
    lambda_[1].block<4, 4>(4, 0) = -A2;

    lambda_[2].setZero();
    lambda_[2].block<4, 4>(0, 0) = a3;
    lambda_[2].block<4, 4>(4, 4) = a3;

    lambda0_.setZero();
    lambda0_.block<4, 4>(0, 4) = -b;
    lambda0_.block<4, 4>(4, 0) = b;

    // Each Lambda has exactly one +-1 per row; cache (col, sign) for the
    // vector-apply fast paths.
    const Mat8d* mats[4] = {&lambda_[0], &lambda_[1], &lambda_[2], &lambda0_};
    for (int m = 0; m < 4; ++m)
        for (int r = 0; r < 8; ++r) {
            perm_[m][r] = {0, 0.0};
            for (int c = 0; c < 8; ++c)
                if ((*mats[m])(r, c) != 0.0) perm_[m][r] = {c, (*mats[m])(r, c)};
        }
}

double RealSymbols::dispersion(const Vec3& k) const
{
    return std::sqrt(k.squaredNorm() + mass_ * mass_);
}

Mat8c RealSymbols::symbol_p(const Vec3& k) const
{
    Mat8d lk = k[0] * lambda_[0] + k[1] * lambda_[1] + k[2] * lambda_[2];
    return Mat8c(-cplx(0, 1) * lk.cast<cplx>() + mass_ * lambda0_.cast<cplx>());
}

Mat8c RealSymbols::propagator(const Vec3& k, double t) const
{
    double w = dispersion(k);
    double c = std::cos(w * t), s = std::sin(w * t);
    return Mat8c(c * Mat8c::Identity() - (s / w) * symbol_p(k));
}

Mat8c RealSymbols::adjoint_propagator(const Vec3& k, double t) const
{
    double w = dispersion(k);
    double c = std::cos(w * t), s = std::sin(w * t);
    return Mat8c(c * Mat8c::Identity() + (s / w) * symbol_p(k));
}

Vec8c RealSymbols::apply_symbol_p(const Vec3& k, const Vec8c& in) const
{
    Vec8c out;
    const cplx mi(0.0, -1.0);
    for (int r = 0; r < 8; ++r) {
        cplx acc(0, 0);
        for (int a = 0; a < 3; ++a) {
            const PermEntry& e = perm_[a][r];
            acc += (k[a] * e.sign) * in[e.col];
        }
        const PermEntry& e0 = perm_[3][r];
        out[r] = mi * acc + (mass_ * e0.sign) * in[e0.col];
    }
    return out;
}

Vec8c RealSymbols::apply_propagator(const Vec3& k, double t, const Vec8c& in) const
{
    double w = dispersion(k);
    double c = std::cos(w * t), s = std::sin(w * t);
    return Vec8c(c * in - (s / w) * apply_symbol_p(k, in));
}

Vec8c RealSymbols::apply_adjoint_propagator(const Vec3& k, double t, const Vec8c& in) const
{
    double w = dispersion(k);
    double c = std::cos(w * t), s = std::sin(w * t);
    return Vec8c(c * in + (s / w) * apply_symbol_p(k, in));
}

Mat4c RealSymbols::propagator_complex4(const Vec3& k, double t) const
{
    double w = dispersion(k);
    double c = std::cos(w * t), s = std::sin(w * t);
    Mat4c ak = k[0] * dm_.alpha[0] + k[1] * dm_.alpha[1] + k[2] * dm_.alpha[2];
    Mat4c gen = cplx(0, 1) * Mat4c(mass_ * dm_.beta - ak);  // i(beta m - alpha.k)
    return Mat4c(c * Mat4c::Identity() - (s / w) * gen);
}

Mat8c psd_sqrt(const Mat8c& m, double clamp_floor)
{
    Eigen::SelfAdjointEigenSolver<Mat8c> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    Vec8d ev = es.eigenvalues();
    for (int i = 0; i < 8; ++i) {
        if (ev[i] < clamp_floor)
            throw std::runtime_error("psd_sqrt: matrix not PSD, eigenvalue " +
                                     std::to_string(ev[i]));
        if (ev[i] < 0.0) ev[i] = 0.0;
    }
    Vec8d root = ev.cwiseSqrt();
    return Mat8c(es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint());
}

}  // namespace dirac
