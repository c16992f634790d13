#pragma once

#include <complex>

#include <Eigen/Dense>

namespace alcove {

using Cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;

// Bilinear pairing xi(v) without the conjugation Eigen's dot() would apply.
inline Cplx pairing(const CVec& xi, const Vec& v) {
  Cplx s = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) s += xi[i] * v[i];
  return s;
}

inline double pairing(const Vec& xi, const Vec& v) { return xi.dot(v); }

inline Cplx pairing(const CVec& xi, const CVec& v) {
  Cplx s = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) s += xi[i] * v[i];
  return s;
}

// Affine map v -> M v + b.
struct AffineMap {
  Mat M;
  Vec b;

  Vec operator()(const Vec& v) const { return M * v + b; }

  static AffineMap identity(int n) {
    return {Mat::Identity(n, n), Vec::Zero(n)};
  }

  // (this ∘ g)(v) = this(g(v))
  AffineMap after(const AffineMap& g) const { return {M * g.M, M * g.b + b}; }

  AffineMap inverse() const {
    Mat Mi = M.inverse();
    return {Mi, Vec(-(Mi * b))};
  }
};

// Apply a real matrix to a complex covector/vector.
inline CVec apply_real(const Mat& M, const CVec& x) {
  return CVec(M * x.real() + Cplx(0.0, 1.0) * (M * x.imag()));
}

}  // namespace alcove
