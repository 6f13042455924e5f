#ifndef NCHARGE_SPECTRAL_HPP
#define NCHARGE_SPECTRAL_HPP

#include "ncharge/hamiltonian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ncharge
{

struct SectorSpectrum
{
  std::vector<std::string> label_names; // "Q1".."Qr", then any of "casimir", "translation_cos", "parity"
  std::vector<double> label;            // rounded joint eigenvalues, same order as label_names
  std::vector<double> levels;           // ascending
  std::size_t dimension = 0;
};

struct SpectralOptions
{
  /// Also split each charge sector by the quadratic Casimir and, when H is invariant under them,
  /// by T + T^dagger (cyclic site shift) and site reflection.
  bool resolve_spatial = false;
  /// Keep only the Cartan sector with this label (rounded).
  std::optional<std::vector<double>> sector;
  /// Keep only the largest Cartan sector (first by label on ties).
  bool largest_only = false;
  /// Relative commutator bound for the commutation precondition and the spatial operators.
  double commute_tol = 1e-9;
};

/// Spectra of H restricted to the joint eigenspaces of the totals of the first Cartan-Weyl
/// basis' charges. Throws PreconditionError if H does not commute with those totals.
std::vector<SectorSpectrum> sector_spectra(const GlobalHamiltonian &h, const PreferredBasis &pb,
                                           const SpectralOptions &options = {});

enum class Verdict
{
  poisson_like,
  wigner_dyson_like,
  inconclusive
};

std::string to_string(Verdict v);

/// 2 ln 2 - 1, mean r of uncorrelated levels.
inline constexpr double kPoissonMeanR = 0.38629436111989061;
/// Mean r of large GOE matrices, pinned by the random-matrix oracle in the tests.
inline constexpr double kGoeMeanR = 0.5307;
inline constexpr double kPoissonThreshold = 0.45;
inline constexpr double kWignerDysonThreshold = 0.50;
/// Fewer ratios than this (a sector of fewer than 20 distinct levels) gives an inconclusive verdict.
inline constexpr std::size_t kMinRatios = 18;
inline constexpr std::size_t kHistogramBins = 20;
inline constexpr double kDefaultDegeneracyTol = 1e-9;

struct GapStatistics
{
  double mean_r = 0.0;
  std::vector<std::size_t> histogram; // kHistogramBins equal bins over [0, 1]
  std::size_t n_gaps = 0;
  std::size_t n_ratios = 0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> ratios;
};

/// Consecutive-gap ratios r_n = min(g_n, g_n+1) / max(g_n, g_n+1) after merging levels closer than
/// degeneracy_tol times the spectral width.
GapStatistics gap_statistics(const SectorSpectrum &spectrum, double degeneracy_tol = kDefaultDegeneracyTol);

/// Ratios pooled over several sectors; gaps never cross sector boundaries.
GapStatistics gap_statistics(const std::vector<SectorSpectrum> &spectra,
                             double degeneracy_tol = kDefaultDegeneracyTol);

/// Index of the sector with the most levels (first on ties).
std::size_t largest_sector(const std::vector<SectorSpectrum> &spectra);

} // namespace ncharge

#endif // NCHARGE_SPECTRAL_HPP
