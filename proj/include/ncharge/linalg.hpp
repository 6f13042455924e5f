#ifndef NCHARGE_LINALG_HPP
#define NCHARGE_LINALG_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncharge
{

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Raised for incompatible matrix dimensions.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input violates a numerical precondition (Hermiticity, commutation, ...).
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Comparison tolerance. The threshold at scale s is max(abs, rel * s).
struct Tolerance
{
  double abs = 1e-10;
  double rel = 1e-10;

  double threshold(double scale) const { return std::max(abs, rel * scale); }
};

inline Complex imag_unit() { return Complex(0.0, 1.0); }

inline Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

/// AB - BA.
template <typename DerivedA, typename DerivedB>
CMatrix commutator(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b)
{
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
  {
    throw ShapeError("commutator: operands must be square with equal dimensions");
  }
  const CMatrix ab = a * b;
  const CMatrix ba = b * a;
  return ab - ba;
}

/// Hilbert-Schmidt inner product Tr(A^dagger B).
template <typename DerivedA, typename DerivedB>
Complex hs_inner(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b)
{
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
  {
    throw ShapeError("hs_inner: operands must be square with equal dimensions");
  }
  // sum_ij conj(a_ij) b_ij
  return (a.conjugate().cwiseProduct(b)).sum();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived> &a, double rel = 1e-12)
{
  if (a.rows() != a.cols())
  {
    return false;
  }
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel * scale;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived> &u, double tol = 1e-10)
{
  if (u.rows() != u.cols())
  {
    return false;
  }
  const CMatrix prod = u.adjoint() * u;
  return (prod - CMatrix::Identity(u.rows(), u.cols())).norm() <= tol * std::sqrt(double(u.rows()));
}

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix &a, const CMatrix &b);

/// Integer power D^n, throwing on overflow past `cap`.
std::size_t hilbert_dimension(std::size_t local_dim, std::size_t n_sites);

/// id^(site-1) (x) op (x) id^(n_sites-site). Sites are 1-based; site 1 is the leftmost factor.
CMatrix kron_embed(const CMatrix &op, std::size_t site, std::size_t n_sites, std::size_t local_dim);

/// Sum over all sites of kron_embed(op, j, n_sites, local_dim).
CMatrix total_operator(const CMatrix &op, std::size_t n_sites, std::size_t local_dim);

/// Adds weight * op acting on the listed (1-based, distinct) sites to the dense operator `target`.
/// `op` is D^k x D^k with sites[0] as its leftmost factor.
void add_embedded(const CMatrix &op, const std::vector<std::size_t> &sites, std::size_t n_sites,
                  std::size_t local_dim, Complex weight, CMatrix &target);

/// op acting on the listed sites (identity elsewhere) applied to every column of x.
CMatrix apply_embedded(const CMatrix &op, const std::vector<std::size_t> &sites, std::size_t n_sites,
                       std::size_t local_dim, const CMatrix &x);

/// (sum_j op^(j)) x without forming the D^N x D^N total.
CMatrix apply_total(const CMatrix &op, std::size_t n_sites, std::size_t local_dim, const CMatrix &x);

/// Permutation of sites: site j (1-based) is sent to perm[j-1]. Applied to every column of x.
CMatrix apply_site_permutation(const std::vector<std::size_t> &perm, std::size_t local_dim,
                               const CMatrix &x);

/// Frobenius norm of [H, sum_j op^(j)] for Hermitian H and op, computed column-wise.
double total_commutator_norm(const CMatrix &h, const CMatrix &op, std::size_t n_sites,
                             std::size_t local_dim);

/// Orthonormal basis of the right nullspace. Singular values below
/// max(tol.abs, tol.rel * sigma_max) count as zero. Vectors are returned starting from
/// the smallest singular value, each with its largest-modulus entry made real positive.
template <typename Derived>
std::vector<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>
nullspace(const Eigen::MatrixBase<Derived> &m, const Tolerance &tol = {})
{
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index n = m.cols();
  std::vector<Vector> out;
  if (n == 0)
  {
    return out;
  }
  Matrix work = m;
  if (work.rows() < n)
  {
    // Pad with zero rows so the SVD exposes the full right singular basis.
    Matrix padded = Matrix::Zero(n, n);
    padded.topRows(work.rows()) = work;
    work = padded;
  }
  Eigen::BDCSVD<Matrix> svd(work, Eigen::ComputeFullV);
  const auto &sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? double(sigma(0)) : 0.0;
  const double cut = tol.threshold(sigma_max);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
  {
    if (double(sigma(i)) >= cut && sigma_max > 0.0)
    {
      ++rank;
    }
  }
  const Matrix &v = svd.matrixV();
  for (Eigen::Index col = n - 1; col >= rank; --col)
  {
    Vector vec = v.col(col);
    Eigen::Index imax = 0;
    vec.cwiseAbs().maxCoeff(&imax);
    const Scalar pivot = vec(imax);
    vec *= std::abs(pivot) / pivot;
    out.push_back(vec);
  }
  return out;
}

struct EigenSystem
{
  RVector values;  // ascending
  CMatrix vectors; // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix; throws ValidationError on non-Hermitian input.
EigenSystem eig_hermitian(const CMatrix &h);

/// Eigenvalues only, ascending.
RVector eigvals_hermitian(const CMatrix &h);

/// exp(i A) for Hermitian A, via its eigendecomposition.
CMatrix expi_hermitian(const CMatrix &a);

struct JointEigenspace
{
  std::vector<double> values; // rounded joint eigenvalues, one per operator
  CMatrix basis;              // orthonormal columns
};

/// Partition of the full space into joint eigenspaces of pairwise-commuting Hermitian operators.
/// Eigenvalues are clustered after rounding to 8 decimal digits; sectors are sorted by label.
std::vector<JointEigenspace> simultaneous_eigenspaces(const std::vector<CMatrix> &ops,
                                                      const Tolerance &tol = {});

/// Rounds to the clustering resolution used for joint eigenvalue labels.
double round_label(double value);

} // namespace ncharge

#endif // NCHARGE_LINALG_HPP
