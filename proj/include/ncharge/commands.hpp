#ifndef NCHARGE_COMMANDS_HPP
#define NCHARGE_COMMANDS_HPP

#include "ncharge/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ncharge
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitInputError = 2,
  kExitInfeasible = 3,
  kExitResourceCap = 4
};

struct KBodyRequest
{
  std::vector<std::size_t> sites; // cycle order
  double weight = 1.0;
  std::vector<RVector> couplings; // one per factor; empty means the canonical two-body J
};

struct BuildConfig
{
  LieBasis basis;
  LatticeSpec lattice;
  std::vector<KBodyRequest> k_body;
  BuildMethod method = BuildMethod::automatic;
  std::uint64_t rng_seed = 0;
  double conservation_tol = 1e-9;
  std::size_t dimension_cap = 8192;
  std::string preferred_basis_file = "preferred_basis.json";
  std::string coupling_file = "coupling_solution.json";
  std::string hamiltonian_file = "hamiltonian.json";
};

/// Config document:
///   {"algebra": {"family": "su", "D": 3}            (or {"family": "sl", "n": 2})
///    "lattice": {"n_sites": 4, "edges": [{"i": 1, "j": 2, "weight": 1.0}, ...]}
///               or {"chain": {"n_sites": 8, "periodic": true, "j1": 1.0, "j2": 0.0}},
///    "k_body": [{"sites": [1, 2, 3], "weight": 1.0, "couplings": [[...], [...], [...]]}],
///    "closed_form": true, "rng_seed": 0,
///    "tolerance": {"conservation": 1e-9, "dimension_cap": 8192},
///    "outputs": {"preferred_basis": "...", "coupling_solution": "...", "hamiltonian": "..."}}
/// Only "algebra" and "lattice" are required. Throws SchemaError.
BuildConfig parse_build_config(const Json &j);

struct BuildResult
{
  PreferredBasis basis;
  CouplingSolution coupling;
  GlobalHamiltonian hamiltonian;
  std::vector<KBodyResult> k_body;
  std::string summary;
};

/// Runs the whole construction; throws the module exceptions on failure.
BuildResult run_build(const BuildConfig &config);

/// One-line summary: algebra, c, r, c/r, N, nullspace dim, canonical J and J_simple_form.
std::string build_summary(const BuildResult &result);

/// Uniform factor k with H(k J) = sum_a G_a (x) G_a for generators normalized to Tr(G^2) = 2;
/// nullopt when H(J) is not proportional to that form.
std::optional<double> simple_form_factor(const PreferredBasis &pb, const RVector &j);

struct SpectrumRequest
{
  std::string stats = "r";
  bool resolve_spatial = false;
  bool largest_only = false;
  std::optional<std::vector<double>> sector;
  std::size_t dimension_cap = 8192;
};

// Command front ends: report to `out`/`err` and return an ExitCode.
int cmd_build(const std::string &config_path, const std::string &out_dir, std::ostream &out, std::ostream &err);
int cmd_verify(const std::string &hamiltonian_path, const std::string &basis_path, std::ostream &out,
               std::ostream &err);
/// Without a basis path the preferred basis is rebuilt from the Hamiltonian's algebra; sectors
/// only depend on the first Cartan-Weyl basis, which is the same for every build of that algebra.
int cmd_spectrum(const std::string &hamiltonian_path, const std::optional<std::string> &basis_path,
                 const SpectrumRequest &request, std::ostream &out, std::ostream &err);
int cmd_table(std::ostream &out, std::ostream &err);
int cmd_preferred_basis(const std::string &algebra, bool closed_form, std::uint64_t rng_seed,
                        const std::string &out_path, std::ostream &out, std::ostream &err);

} // namespace ncharge

#endif // NCHARGE_COMMANDS_HPP
