#ifndef NCHARGE_CARTAN_WEYL_HPP
#define NCHARGE_CARTAN_WEYL_HPP

#include "ncharge/lie_algebra.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncharge
{

/// Raised when the orthogonal-rotation search exhausts its restart budget.
class InfeasibleError : public std::runtime_error
{
public:
  InfeasibleError(const std::string &what, double best_residual)
      : std::runtime_error(what), m_best_residual(best_residual)
  {
  }
  double best_residual() const { return m_best_residual; }

private:
  double m_best_residual;
};

struct LadderPair
{
  CMatrix raising;
  CMatrix lowering;
  RVector root; // [Q_a, raising] = root(a) raising
};

struct CartanWeylBasis
{
  std::vector<CMatrix> charges;
  std::vector<LadderPair> ladders;
  CMatrix provenance; // U with charges = U^dagger (first basis) U
};

struct PreferredBasis
{
  std::string algebra;
  std::size_t local_dim = 0;
  std::size_t rank = 0;
  std::vector<CartanWeylBasis> cw_bases;
  std::vector<CMatrix> charges_flat;
  std::vector<LadderPair> ladders_flat;
  std::string method; // "closed_form" or "numerical"
  std::string choice; // free-form record of the parameter choice

  std::size_t dimension() const { return charges_flat.size(); }
};

/// Rebuilds charges_flat and ladders_flat from cw_bases.
void flatten(PreferredBasis &pb);

/// Root decomposition of `basis` relative to the commuting elements `cartan`.
/// Raising operators carry roots whose last nonzero component is positive, have
/// hs_inner(raising, raising) = 1 and a real positive largest-modulus entry. Pairs are sorted by
/// root in descending lexicographic order.
CartanWeylBasis seed_cartan_weyl(const LieBasis &basis, const std::vector<CMatrix> &cartan);

/// x -> U^dagger x U on every element; roots kept, provenance becomes prior * U.
CartanWeylBasis conjugate_basis(const CMatrix &u, const CartanWeylBasis &cw);

/// Unitary U = exp(iA) making the conjugated seed charges Killing-orthogonal to every existing
/// charge. Levenberg-Marquardt on the normalized Killing products, restarted up to
/// `max_restarts` times from points drawn with mt19937_64(rng_seed + restart).
CMatrix solve_orthogonal_rotation(const LieBasis &basis, const std::vector<CMatrix> &existing_charges,
                                  const CartanWeylBasis &seed_cw, std::uint64_t rng_seed,
                                  int max_restarts = 32);

/// Rotations U_1..U_m solved together so that the first basis and its m conjugates are all
/// mutually Killing-orthogonal. Used when round-by-round rotation gets stuck.
std::vector<CMatrix> solve_joint_rotations(const LieBasis &basis, const CartanWeylBasis &seed_cw, std::size_t m,
                                           std::uint64_t rng_seed, int max_restarts = 32);

/// Largest |(q, e)| / sqrt((q, q)(e, e)) over new charges q and existing charges e.
double orthogonality_residual(const LieBasis &basis, const std::vector<CMatrix> &new_charges,
                              const std::vector<CMatrix> &existing_charges);

enum class BuildMethod
{
  automatic, // closed form for su(2) and su(3), numerical otherwise
  closed_form,
  numerical
};

PreferredBasis build_preferred_basis(const LieBasis &basis, const std::vector<CMatrix> &cartan,
                                     std::uint64_t rng_seed, BuildMethod method = BuildMethod::automatic);

/// True when a closed-form parameterization exists (su(2), su(3)).
bool has_closed_form(const LieBasis &basis);

/// exp(i sz phi1/2) exp(i sy phi2/2) exp(i sz phi3/2).
CMatrix su2_euler_unitary(double phi1, double phi2, double phi3);

/// Charges {sz, cos(phi3) sx + sin(phi3) sy, (-1)^n (sin(phi3) sx - cos(phi3) sy)} with ladders
/// conjugated from (sx + i sy)/2.
PreferredBasis su2_closed_form(double phi1_i, double phi3_i, double phi1_ii, int n_ii);

enum class Su3Parity
{
  all_even,     // n = (0, 0, 0)
  i_iii_even,   // n = (0, 1, 0)
  i_ii_even,    // n = (0, 0, 1)
  ii_iii_even   // n = (0, 1, 1)
};

std::string to_string(Su3Parity p);

/// Integer n of U_i, U_ii, U_iii.
std::array<int, 3> parity_exponents(Su3Parity p);

struct Su3Solution
{
  double x23 = 0.0;
  double x34 = 0.0;
  double y23 = 0.0;
  double y34 = 0.0;
  Su3Parity parity = Su3Parity::all_even;
};

/// 4 parity classes x 18 tuples, each component reduced to [0, 2 pi).
std::vector<Su3Solution> su3_solution_families();

/// Largest violation of the pairwise orthogonality constraints on (x, y) angle differences.
double su3_constraint_residual(const Su3Solution &s);

/// Product of exp(i lambda_k phi/2) over k = 3, 2, 3, 5, 3, 2, 3, 8.
CMatrix su3_euler_unitary(const std::array<double, 8> &phi);

/// Euler unitary whose conjugates of lambda_3, lambda_8 are the charges parameterized by (a, b, n).
CMatrix su3_charge_unitary(double a, double b, int n, double phi1 = 0.0, double phi8 = 0.0);

/// Preferred basis from one solution tuple; a0, b0 fix the free angles of U_i.
PreferredBasis su3_closed_form(const Su3Solution &s, double a0 = 0.0, double b0 = 0.0);

} // namespace ncharge

#endif // NCHARGE_CARTAN_WEYL_HPP
