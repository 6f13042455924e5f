// Shared fixtures for the unit tests: hand-typed matrices and random generators.
#ifndef NCHARGE_TESTS_SUPPORT_HPP
#define NCHARGE_TESTS_SUPPORT_HPP

#include "ncharge/linalg.hpp"

#include <cmath>
#include <random>

namespace fixtures
{

using ncharge::CMatrix;
using ncharge::Complex;

inline const Complex I{0.0, 1.0};

inline CMatrix sx()
{
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix sy()
{
  CMatrix m(2, 2);
  m << 0, -I, I, 0;
  return m;
}
inline CMatrix sz()
{
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline CMatrix id(Eigen::Index n) { return CMatrix::Identity(n, n); }

/// Gell-Mann matrix lambda_k, k = 1..8, typed out entry by entry.
inline CMatrix lambda(int k)
{
  CMatrix m = CMatrix::Zero(3, 3);
  switch (k)
  {
  case 1: m(0, 1) = 1; m(1, 0) = 1; break;
  case 2: m(0, 1) = -I; m(1, 0) = I; break;
  case 3: m(0, 0) = 1; m(1, 1) = -1; break;
  case 4: m(0, 2) = 1; m(2, 0) = 1; break;
  case 5: m(0, 2) = -I; m(2, 0) = I; break;
  case 6: m(1, 2) = 1; m(2, 1) = 1; break;
  case 7: m(1, 2) = -I; m(2, 1) = I; break;
  case 8:
    m(0, 0) = 1 / std::sqrt(3.0);
    m(1, 1) = 1 / std::sqrt(3.0);
    m(2, 2) = -2 / std::sqrt(3.0);
    break;
  default: break;
  }
  return m;
}

/// Plain nested-loop Kronecker product, independent of the library's kron.
inline CMatrix kron2(const CMatrix &a, const CMatrix &b)
{
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline CMatrix kron3(const CMatrix &a, const CMatrix &b, const CMatrix &c) { return kron2(kron2(a, b), c); }

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(Eigen::Index n, std::mt19937_64 &rng)
{
  const CMatrix a = random_complex(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

/// Random real combination of the given Hermitian generators.
inline CMatrix random_element(const std::vector<CMatrix> &gens, std::mt19937_64 &rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix out = CMatrix::Zero(gens[0].rows(), gens[0].cols());
  for (const CMatrix &x : gens)
    out += g(rng) * x;
  return out;
}

/// Residual of the best scalar fit a ~ s b, relative to |a|.
inline double scalar_fit_residual(const CMatrix &a, const CMatrix &b, Complex *scale = nullptr)
{
  const Complex s = (b.conjugate().cwiseProduct(a)).sum() / (b.conjugate().cwiseProduct(b)).sum();
  if (scale)
    *scale = s;
  return (a - s * b).norm() / std::max(1e-300, a.norm());
}

} // namespace fixtures

#endif
