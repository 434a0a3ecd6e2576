#pragma once

#include <complex>
#include <Eigen/Dense>

namespace dirac {

using cplx = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Mat4c = Eigen::Matrix<cplx, 4, 4>;
using Vec4c = Eigen::Matrix<cplx, 4, 1>;
using Mat8d = Eigen::Matrix<double, 8, 8>;
using Mat8c = Eigen::Matrix<cplx, 8, 8>;
using Vec8c = Eigen::Matrix<cplx, 8, 1>;
using Vec8d = Eigen::Matrix<double, 8, 1>;

inline double max_abs(const Mat8c& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Mat4c& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Mat8d& m) { return m.cwiseAbs().maxCoeff(); }

// Largest deviation from Hermitian symmetry.
inline double hermitian_defect(const Mat8c& m) { return max_abs(Mat8c(m - m.adjoint())); }

// Smallest eigenvalue of a Hermitian matrix (for PSD checks).
inline double min_eigenvalue(const Mat8c& m)
{
    Eigen::SelfAdjointEigenSolver<Mat8c> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Hermitian PSD square root with a small clamp for eigenvalues that dip
// negative through roundoff. Eigenvalues below `clamp_floor` are an error.
Mat8c psd_sqrt(const Mat8c& m, double clamp_floor = -1e-12);

}  // namespace dirac
