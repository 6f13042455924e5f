#ifndef NCHARGE_HAMILTONIAN_HPP
#define NCHARGE_HAMILTONIAN_HPP

#include "ncharge/cartan_weyl.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncharge
{

/// Construction cannot proceed (trivial coupling nullspace, failed conservation).
class ConstructionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Hilbert-space dimension above the configured cap.
class ResourceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct HamiltonianTerm
{
  std::vector<std::size_t> sites; // 1-based labels, sites[0] is the leftmost factor
  CMatrix matrix;
  std::vector<double> couplings;

  std::size_t k() const { return sites.size(); }
};

/// sum_b J_b (L_{+b} (x) L_{-b} + L_{-b} (x) L_{+b}) kept linear in J.
struct ParametricTerm
{
  std::vector<std::size_t> sites{1, 2};
  std::vector<CMatrix> components;

  std::size_t n_couplings() const { return components.size(); }
  CMatrix evaluate(const RVector &j) const;
  HamiltonianTerm term(const RVector &j) const;
};

ParametricTerm two_body_unconstrained(const PreferredBasis &pb, std::vector<std::size_t> sites = {1, 2});

struct CouplingSolution
{
  RMatrix constraint_matrix; // real and imaginary parts stacked; columns are couplings (or monomials)
  std::vector<RVector> nullspace_basis;
  RVector chosen;

  std::size_t nullspace_dim() const { return nullspace_basis.size(); }
};

/// Conventional pick from a nullspace: the projection of the all-ones vector when every entry
/// shares a sign, else the first basis vector. Scaled so the largest-magnitude entry is 1.
RVector canonical_coupling(const std::vector<RVector> &basis);

/// Couplings J with [H(J), Q_a^tot] = 0 on two sites for every preferred charge.
CouplingSolution solve_couplings(const PreferredBasis &pb);

/// Largest ||[h, Q_a^tot]||_F / ||h||_F over preferred charges, h acting on n_sites sites.
double conservation_residual(const CMatrix &h, const std::vector<CMatrix> &charges, std::size_t n_sites,
                             std::size_t local_dim);

struct KBodyResult
{
  HamiltonianTerm product;   // raw cyclic product
  CMatrix remainder;         // product with identity and fewer-body conserving parts removed
  HamiltonianTerm term;      // Hermitian remainder, exp(i theta) remainder made Hermitian
  Complex phase{1.0, 0.0};   // exp(i theta)
  double product_conservation = 0.0;
  std::vector<CMatrix> subtraction_set;
  CVector subtraction_coefficients;
  std::optional<CouplingSolution> monomial_solution; // nullspace of the system linear in J products
};

/// Cyclic product of two-body factors on (s1 s2), (s2 s3), ..., (sk s1). `couplings[i]` is the
/// J vector of factor i. For k > 3 the solely-(k-1)-body remainders on every (k-1)-site sub-cycle
/// join the subtraction set, with factors at the canonical two-body coupling.
KBodyResult k_body(const PreferredBasis &pb, const std::vector<ParametricTerm> &cycle,
                   const std::vector<RVector> &couplings);

/// Monomial systems larger than this many unknowns are skipped in k_body.
inline constexpr std::size_t kMaxMonomials = 512;

/// The four coupling families for the su(2) three-body product, one J vector per factor.
/// Family 4 depends on the free ratio rho.
std::vector<std::vector<RVector>> su2_three_body_families(double rho);

/// i * sum over permutations sign(p) s_p1 (x) s_p2 (x) s_p3.
CMatrix scalar_chirality();

struct Edge
{
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;
};

struct SiteGroup
{
  std::vector<std::size_t> sites;
  double weight = 1.0;
};

struct LatticeSpec
{
  std::size_t n_sites = 0;
  std::vector<Edge> edges;
  std::vector<SiteGroup> k_body_groups;
  std::string geometry;
};

void validate_lattice(const LatticeSpec &lattice);

/// Chain of n sites with nearest-neighbor weight j1 and optional next-nearest weight j2.
LatticeSpec chain_lattice(std::size_t n_sites, bool periodic, double j1 = 1.0, double j2 = 0.0);

struct GlobalHamiltonian
{
  LatticeSpec lattice;
  std::string algebra;
  std::size_t local_dim = 0;
  RVector coupling;
  CMatrix matrix;
  double conservation_residual = 0.0;
};

struct AssemblyOptions
{
  std::size_t dimension_cap = 8192;
  double conservation_tol = 1e-9;
  /// Local operators for k-body groups. With one term per group they pair by index; otherwise
  /// each group takes the first term with its site count.
  std::vector<HamiltonianTerm> k_body_terms;
};

/// Sums embedded two-body terms H(J) over edges and k-body terms over groups, then checks
/// [H, Q_a^tot] = 0 for every preferred charge.
GlobalHamiltonian assemble_global(const LatticeSpec &lattice, const PreferredBasis &pb,
                                  const CouplingSolution &coupling, const AssemblyOptions &options = {});

/// sum_a Q_a (x) Q_a.
HamiltonianTerm simple_form(const std::vector<CMatrix> &charges);
HamiltonianTerm simple_form(const PreferredBasis &pb);

} // namespace ncharge

#endif // NCHARGE_HAMILTONIAN_HPP
