#ifndef NCHARGE_LIE_ALGEBRA_HPP
#define NCHARGE_LIE_ALGEBRA_HPP

#include "ncharge/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ncharge
{

class DependencyError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class SpanError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered Hermitian traceless generators of a Lie algebra in a D-dimensional representation.
struct LieBasis
{
  std::string name;
  std::size_t local_dim = 0;
  std::vector<CMatrix> generators;
  std::size_t rank = 0;

  std::size_t dimension() const { return generators.size(); }
};

/// Checks Hermiticity, tracelessness and linear independence; throws on violation.
void validate_basis(const LieBasis &basis);

/// su(2) with generators (sigma_x, sigma_y, sigma_z).
LieBasis pauli_basis();

/// su(D) generalized Gell-Mann matrices, Tr(l_a l_b) = 2 delta_ab.
/// D = 3 uses the standard lambda_1..lambda_8 order; otherwise symmetric pairs (row-major),
/// antisymmetric pairs, then diagonal matrices.
LieBasis gellmann_basis(std::size_t d);

/// Same algebra with every generator rescaled to unit Hilbert-Schmidt norm.
LieBasis normalized(const LieBasis &basis);

/// Parses "su(2)", "su2", "su(3)", ... into the matching generator family.
LieBasis algebra_by_name(const std::string &name);

/// The diagonal generators of su(D) (a Cartan subalgebra), in basis order.
std::vector<CMatrix> diagonal_cartan(const LieBasis &basis);

/// Expansion, adjoint action and Killing form relative to one basis. Expansions solve the
/// Gram system of hs_inner, so the basis need not be orthonormal.
class AlgebraFrame
{
public:
  explicit AlgebraFrame(LieBasis basis);

  const LieBasis &basis() const { return m_basis; }
  std::size_t dimension() const { return m_basis.dimension(); }

  /// Coefficients c with x = sum_a c_a G_a (least squares if x lies outside the span).
  CVector coordinates(const CMatrix &x) const;
  /// ||x - sum_a c_a G_a||_F.
  double span_residual(const CMatrix &x) const;
  /// Throws SpanError when x is not in the span.
  CVector coordinates_in_span(const CMatrix &x) const;

  CMatrix expand(const CVector &coords) const;

  /// Matrix of ad(x) in the basis coordinates: column b holds coordinates of [x, G_b].
  CMatrix adjoint(const CMatrix &x) const;

  /// Tr(ad(x) ad(y)).
  Complex killing(const CMatrix &x, const CMatrix &y) const;

  /// K_ab = (G_a, G_b).
  const CMatrix &killing_metric() const { return m_killing; }

  const CMatrix &gram() const { return m_gram; }

  /// HS-orthonormal Hermitian generators spanning the same space.
  const std::vector<CMatrix> &orthonormal_generators() const { return m_orthonormal; }

private:
  LieBasis m_basis;
  CMatrix m_gram;
  Eigen::LLT<CMatrix> m_gram_llt;
  CMatrix m_killing;
  std::vector<CMatrix> m_orthonormal;
};

/// f(gamma, alpha, beta) with [G_alpha, G_beta] = sum_gamma f(gamma, alpha, beta) G_gamma.
struct StructureConstants
{
  std::size_t dim = 0;
  std::vector<Complex> data;
  bool basis_normalized = false;

  Complex &operator()(std::size_t gamma, std::size_t alpha, std::size_t beta)
  {
    return data[(gamma * dim + alpha) * dim + beta];
  }
  Complex operator()(std::size_t gamma, std::size_t alpha, std::size_t beta) const
  {
    return data[(gamma * dim + alpha) * dim + beta];
  }
};

StructureConstants structure_constants(const LieBasis &basis);

/// Largest ||[G_a, G_b] - sum_g f(g,a,b) G_g||_F over all pairs.
double structure_constant_residual(const LieBasis &basis, const StructureConstants &f);

/// Killing form of x and y in the given basis; throws SpanError if either is outside the span.
Complex killing_form(const CMatrix &x, const CMatrix &y, const LieBasis &basis);

struct AntisymmetryReport
{
  double max_violation = 0.0;
  bool pass = false;
};

/// max |f(g,a,b) + f(a,g,b)|; requires f computed in an HS-orthonormal basis.
AntisymmetryReport check_antisymmetry(const StructureConstants &f, double threshold = 1e-10);

/// One row of the simple-Lie-algebra registry.
struct AlgebraRegistryEntry
{
  std::string family;
  std::optional<int> n;
  long dimension = 0;
  long rank = 0;

  long ratio() const { return rank == 0 ? 0 : dimension / rank; }
  std::string label() const;
};

/// so(2n) (n = 3..12), sl(n+1), so(2n+1), sp(2n) (n = 1..12), then g2, f4, e6, e7, e8.
std::vector<AlgebraRegistryEntry> registry_table();

} // namespace ncharge

#endif // NCHARGE_LIE_ALGEBRA_HPP
