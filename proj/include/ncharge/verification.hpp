#ifndef NCHARGE_VERIFICATION_HPP
#define NCHARGE_VERIFICATION_HPP

#include "ncharge/hamiltonian.hpp"

#include <map>
#include <string>
#include <vector>

namespace ncharge
{

struct VerificationReport
{
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double threshold = 0.0;
  std::map<std::string, std::string> context;
};

/// Builds a report with pass = (residual <= threshold).
VerificationReport make_report(std::string name, double residual, double threshold,
                               std::map<std::string, std::string> context = {});

bool all_pass(const std::vector<VerificationReport> &reports);

/// One report per charge: ||[H, Q_a^tot]||_F / max(1, ||H||_F).
std::vector<VerificationReport> check_global_conservation(const GlobalHamiltonian &h, const PreferredBasis &pb,
                                                          double threshold = 1e-9);

/// Relative transport floor for check_local_transport.
inline constexpr double kTransportFloor = 0.01;

/// One report per charge and site of the term. The commutator c = ||[H, Q_a^(j)]||_F must exceed
/// f = kTransportFloor ||H||_F; the residual is f / (f + c) against threshold 1/2, so it stays
/// finite and pass still means residual <= threshold. Context carries both norms.
std::vector<VerificationReport> check_local_transport(const HamiltonianTerm &term, const PreferredBasis &pb);

/// Killing orthogonality of every charge pair, Gram rank, Hermiticity, ladder adjointness and
/// root equations of every Cartan-Weyl basis.
std::vector<VerificationReport> check_preferred_basis(const PreferredBasis &pb, const LieBasis &basis,
                                                      double threshold = 1e-9);

/// Passes iff the dimension is a multiple of the rank.
VerificationReport check_ratio(const AlgebraRegistryEntry &entry);

} // namespace ncharge

#endif // NCHARGE_VERIFICATION_HPP
