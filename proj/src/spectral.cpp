#include "ncharge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncharge
{

namespace
{

bool is_diagonal_matrix(const CMatrix &a)
{
  const double n = a.norm();
  return (a - CMatrix(a.diagonal().asDiagonal())).norm() <= 1e-12 * std::max(1.0, n);
}

struct CartanSector
{
  std::vector<double> label;
  std::vector<Eigen::Index> states; // computational basis states (diagonal charges)
  CMatrix basis;                    // orthonormal columns (general charges)
};

std::vector<CartanSector> cartan_sectors(const std::vector<CMatrix> &charges, std::size_t n_sites, std::size_t d)
{
  std::vector<CartanSector> out;
  if (std::all_of(charges.begin(), charges.end(), is_diagonal_matrix))
  {
    const std::size_t dim = hilbert_dimension(d, n_sites);
    std::vector<std::pair<std::vector<double>, Eigen::Index>> labelled;
    labelled.reserve(dim);
    std::vector<std::size_t> digits(n_sites);
    for (std::size_t s = 0; s < dim; ++s)
    {
      std::size_t rest = s;
      for (std::size_t p = n_sites; p-- > 0;)
      {
        digits[p] = rest % d;
        rest /= d;
      }
      std::vector<double> label;
      for (const CMatrix &q : charges)
      {
        double total = 0.0;
        for (std::size_t p = 0; p < n_sites; ++p)
        {
          total += q(as_index(digits[p]), as_index(digits[p])).real();
        }
        label.push_back(round_label(total));
      }
      labelled.emplace_back(std::move(label), as_index(s));
    }
    std::stable_sort(labelled.begin(), labelled.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    for (std::size_t i = 0; i < labelled.size();)
    {
      CartanSector sec;
      sec.label = labelled[i].first;
      std::size_t j = i;
      for (; j < labelled.size() && labelled[j].first == sec.label; ++j)
      {
        sec.states.push_back(labelled[j].second);
      }
      out.push_back(std::move(sec));
      i = j;
    }
    return out;
  }
  std::vector<CMatrix> totals;
  for (const CMatrix &q : charges)
  {
    totals.push_back(total_operator(q, n_sites, d));
  }
  for (JointEigenspace &js : simultaneous_eigenspaces(totals))
  {
    out.push_back({js.values, {}, std::move(js.basis)});
  }
  return out;
}

CMatrix selection_basis(const std::vector<Eigen::Index> &states, Eigen::Index dim)
{
  CMatrix v = CMatrix::Zero(dim, as_index(states.size()));
  for (std::size_t m = 0; m < states.size(); ++m)
  {
    v(states[m], as_index(m)) = 1.0;
  }
  return v;
}

std::vector<double> sorted_levels(const CMatrix &block)
{
  if (block.rows() == 0)
  {
    return {};
  }
  const RVector ev = eigvals_hermitian(block);
  std::vector<double> levels(ev.data(), ev.data() + ev.size());
  std::sort(levels.begin(), levels.end());
  return levels;
}

bool commutes(const CMatrix &a, const CMatrix &b, double tol)
{
  return (a * b - b * a).norm() <= tol * std::max(1.0, a.norm() * b.norm());
}

void add_ratios(const std::vector<double> &levels, double degeneracy_tol, GapStatistics &stats)
{
  if (levels.size() < 2)
  {
    return;
  }
  const double tol = degeneracy_tol * (levels.back() - levels.front());
  std::vector<double> unique{levels.front()};
  for (std::size_t i = 1; i < levels.size(); ++i)
  {
    if (levels[i] - unique.back() > tol)
    {
      unique.push_back(levels[i]);
    }
  }
  if (unique.size() < 2)
  {
    return;
  }
  stats.n_gaps += unique.size() - 1;
  for (std::size_t i = 1; i + 1 < unique.size(); ++i)
  {
    const double g0 = unique[i] - unique[i - 1];
    const double g1 = unique[i + 1] - unique[i];
    stats.ratios.push_back(std::min(g0, g1) / std::max(g0, g1));
  }
}

GapStatistics finish(GapStatistics stats)
{
  stats.n_ratios = stats.ratios.size();
  stats.histogram.assign(kHistogramBins, 0);
  double sum = 0.0;
  for (double r : stats.ratios)
  {
    sum += r;
    const std::size_t bin = std::min(kHistogramBins - 1, std::size_t(r * double(kHistogramBins)));
    ++stats.histogram[bin];
  }
  stats.mean_r = stats.n_ratios > 0 ? sum / double(stats.n_ratios) : 0.0;
  if (stats.n_ratios < kMinRatios)
  {
    stats.verdict = Verdict::inconclusive;
  }
  else if (stats.mean_r < kPoissonThreshold)
  {
    stats.verdict = Verdict::poisson_like;
  }
  else if (stats.mean_r > kWignerDysonThreshold)
  {
    stats.verdict = Verdict::wigner_dyson_like;
  }
  else
  {
    stats.verdict = Verdict::inconclusive;
  }
  return stats;
}

} // namespace

std::vector<SectorSpectrum> sector_spectra(const GlobalHamiltonian &h, const PreferredBasis &pb,
                                           const SpectralOptions &options)
{
  if (pb.cw_bases.empty())
  {
    throw PreconditionError("sector_spectra: preferred basis has no Cartan-Weyl basis");
  }
  const std::size_t n = h.lattice.n_sites;
  const std::size_t d = pb.local_dim;
  const Eigen::Index dim = as_index(hilbert_dimension(d, n));
  if (h.matrix.rows() != dim || h.matrix.cols() != dim)
  {
    throw ShapeError("sector_spectra: Hamiltonian dimension does not match D^N");
  }
  const std::vector<CMatrix> &cartan = pb.cw_bases.front().charges;
  const double hnorm = std::max(1.0, h.matrix.norm());
  for (std::size_t a = 0; a < cartan.size(); ++a)
  {
    const double res = total_commutator_norm(h.matrix, cartan[a], n, d) / hnorm;
    if (res > options.commute_tol)
    {
      std::ostringstream msg;
      msg << "sector_spectra: H does not commute with total Cartan charge " << a + 1 << " (residual " << res << ")";
      throw PreconditionError(msg.str());
    }
  }

  std::vector<CartanSector> sectors = cartan_sectors(cartan, n, d);
  if (options.sector)
  {
    std::vector<double> want;
    for (double v : *options.sector)
    {
      want.push_back(round_label(v));
    }
    sectors.erase(std::remove_if(sectors.begin(), sectors.end(), [&](const CartanSector &s) { return s.label != want; }),
                  sectors.end());
  }
  if (options.largest_only && !sectors.empty())
  {
    const auto size = [](const CartanSector &s) { return s.states.empty() ? s.basis.cols() : as_index(s.states.size()); };
    const auto it = std::max_element(sectors.begin(), sectors.end(),
                                     [&](const CartanSector &a, const CartanSector &b) { return size(a) < size(b); });
    sectors = {*it};
  }

  std::vector<std::string> cartan_names;
  for (std::size_t a = 0; a < cartan.size(); ++a)
  {
    cartan_names.push_back("Q" + std::to_string(a + 1));
  }

  std::vector<std::size_t> shift(n), mirror(n);
  for (std::size_t j = 0; j < n; ++j)
  {
    shift[j] = (j + 1) % n + 1;
    mirror[j] = n - j;
  }

  std::vector<SectorSpectrum> out;
  if (!options.resolve_spatial)
  {
    for (const CartanSector &sec : sectors)
    {
      const CMatrix block = sec.states.empty() ? CMatrix(sec.basis.adjoint() * h.matrix * sec.basis)
                                               : CMatrix(h.matrix(sec.states, sec.states));
      SectorSpectrum s{cartan_names, sec.label, sorted_levels(block), 0};
      s.dimension = s.levels.size();
      out.push_back(std::move(s));
    }
    return out;
  }

  // Restricted operators per sector. A spatial operator is used only if it commutes with H in
  // every sector, so all spectra carry the same label names.
  struct Restricted
  {
    CMatrix h, casimir, translation, parity;
  };
  std::vector<Restricted> restricted;
  bool use_translation = n > 2;
  bool use_parity = n > 1;
  for (const CartanSector &sec : sectors)
  {
    const CMatrix v = sec.states.empty() ? sec.basis : selection_basis(sec.states, dim);
    // V^dagger X; a row selection when V picks computational states.
    const auto restrict_rows = [&](const CMatrix &x) -> CMatrix {
      return sec.states.empty() ? CMatrix(v.adjoint() * x) : CMatrix(x(sec.states, Eigen::all));
    };
    Restricted r;
    r.h = sec.states.empty() ? CMatrix(v.adjoint() * h.matrix * v) : CMatrix(h.matrix(sec.states, sec.states));
    r.h = 0.5 * (r.h + r.h.adjoint());
    r.casimir = CMatrix::Zero(v.cols(), v.cols());
    for (const CMatrix &q : pb.charges_flat)
    {
      // V^dagger Q^2 V = (Q V)^dagger (Q V).
      const CMatrix qv = apply_total(q, n, d, v);
      r.casimir += (qv.adjoint() * qv) / hs_inner(q, q).real();
    }
    r.casimir = 0.5 * (r.casimir + r.casimir.adjoint());
    if (use_translation)
    {
      const CMatrix t = restrict_rows(apply_site_permutation(shift, d, v));
      r.translation = t + t.adjoint();
      r.translation = 0.5 * (r.translation + r.translation.adjoint());
      use_translation = commutes(r.h, r.translation, options.commute_tol);
    }
    if (use_parity)
    {
      r.parity = restrict_rows(apply_site_permutation(mirror, d, v));
      r.parity = 0.5 * (r.parity + r.parity.adjoint());
      use_parity = commutes(r.h, r.parity, options.commute_tol);
    }
    restricted.push_back(std::move(r));
  }

  std::vector<std::string> all_names = cartan_names;
  all_names.push_back("casimir");
  if (use_translation)
  {
    all_names.push_back("translation_cos");
  }
  if (use_parity)
  {
    all_names.push_back("parity");
  }
  for (std::size_t i = 0; i < sectors.size(); ++i)
  {
    const Restricted &r = restricted[i];
    std::vector<CMatrix> ops{r.casimir};
    if (use_translation)
    {
      ops.push_back(r.translation);
    }
    if (use_parity)
    {
      ops.push_back(r.parity);
    }
    for (const JointEigenspace &js : simultaneous_eigenspaces(ops))
    {
      CMatrix block = js.basis.adjoint() * r.h * js.basis;
      block = 0.5 * (block + block.adjoint());
      SectorSpectrum s{all_names, sectors[i].label, sorted_levels(block), 0};
      s.label.insert(s.label.end(), js.values.begin(), js.values.end());
      s.dimension = s.levels.size();
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string to_string(Verdict v)
{
  switch (v)
  {
  case Verdict::poisson_like:
    return "poisson-like";
  case Verdict::wigner_dyson_like:
    return "wigner-dyson-like";
  case Verdict::inconclusive:
    break;
  }
  return "inconclusive";
}

GapStatistics gap_statistics(const SectorSpectrum &spectrum, double degeneracy_tol)
{
  GapStatistics stats;
  add_ratios(spectrum.levels, degeneracy_tol, stats);
  return finish(std::move(stats));
}

GapStatistics gap_statistics(const std::vector<SectorSpectrum> &spectra, double degeneracy_tol)
{
  GapStatistics stats;
  for (const SectorSpectrum &s : spectra)
  {
    add_ratios(s.levels, degeneracy_tol, stats);
  }
  return finish(std::move(stats));
}

std::size_t largest_sector(const std::vector<SectorSpectrum> &spectra)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < spectra.size(); ++i)
  {
    if (spectra[i].dimension > spectra[best].dimension)
    {
      best = i;
    }
  }
  return best;
}

} // namespace ncharge
