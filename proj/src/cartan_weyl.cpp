#include "ncharge/cartan_weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace ncharge
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRootTol = 1e-8;

CMatrix phase_fixed(CMatrix m)
{
  // First entry (row-major) whose modulus is within rounding of the maximum.
  const double top = m.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
    {
      if (std::abs(m(i, j)) >= top * (1.0 - 1e-9))
      {
        const Complex p = m(i, j);
        m *= std::abs(p) / p;
        return m;
      }
    }
  }
  return m;
}

bool root_positive(const RVector &root)
{
  for (Eigen::Index a = root.size() - 1; a >= 0; --a)
  {
    if (std::abs(root(a)) > kRootTol)
    {
      return root(a) > 0.0;
    }
  }
  return false;
}

bool root_greater(const RVector &x, const RVector &y)
{
  for (Eigen::Index a = 0; a < x.size(); ++a)
  {
    if (std::abs(x(a) - y(a)) > kRootTol)
    {
      return x(a) > y(a);
    }
  }
  return false;
}

double canonical_angle(double v)
{
  v = std::fmod(v, kTwoPi);
  if (v < 0.0)
  {
    v += kTwoPi;
  }
  if (kTwoPi - v < 1e-12 || std::abs(v) < 1e-15)
  {
    v = 0.0;
  }
  return v;
}

bool is_diagonal(const CMatrix &m)
{
  const CMatrix off = m - CMatrix(m.diagonal().asDiagonal());
  return off.norm() <= 1e-14 * std::max(1.0, m.norm());
}

/// Killing products normalized by the Killing norms, precomputed against fixed targets.
class KillingTargets
{
public:
  KillingTargets(const AlgebraFrame &frame, const std::vector<CMatrix> &targets) : m_frame(frame)
  {
    for (const CMatrix &e : targets)
    {
      const CVector w = frame.killing_metric() * frame.coordinates_in_span(e);
      const double norm = std::sqrt(std::abs(frame.killing(e, e)));
      m_weights.push_back(w / norm);
    }
  }

  std::size_t size() const { return m_weights.size(); }

  /// (x, e_j) / |e_j| for every target j.
  RVector products(const CMatrix &x) const
  {
    const CVector cx = m_frame.coordinates(x);
    RVector out(as_index(m_weights.size()));
    for (std::size_t j = 0; j < m_weights.size(); ++j)
    {
      out(as_index(j)) = (cx.transpose() * m_weights[j]).value().real();
    }
    return out;
  }

private:
  const AlgebraFrame &m_frame;
  std::vector<CVector> m_weights;
};

/// Conjugates U_k^dagger h U_k of the seed charges h, with U_0 fixed to the identity when
/// `anchored`. Residuals are normalized Killing products between charge sets and against
/// fixed targets.
struct RotationProblem
{
  const AlgebraFrame &frame;
  std::vector<CMatrix> seeds;      // charges to rotate
  std::vector<double> seed_norms;  // Killing norms of the seeds
  KillingTargets targets;
  std::vector<CMatrix> generators; // HS-orthonormal directions
  std::size_t n_unitaries = 1;
  bool mutual = false;             // also constrain different rotated sets against each other

  std::size_t n_params() const { return n_unitaries * generators.size(); }

  std::vector<std::vector<CMatrix>> rotated(const std::vector<CMatrix> &us) const
  {
    std::vector<std::vector<CMatrix>> out;
    for (const CMatrix &u : us)
    {
      std::vector<CMatrix> set;
      for (const CMatrix &h : seeds)
      {
        set.push_back(u.adjoint() * h * u);
      }
      out.push_back(std::move(set));
    }
    return out;
  }

  std::size_t n_residuals() const
  {
    const std::size_t r = seeds.size();
    const std::size_t pairs = mutual ? n_unitaries * (n_unitaries - 1) / 2 : 0;
    return n_unitaries * r * targets.size() + pairs * r * r;
  }

  RVector residuals(const std::vector<CMatrix> &us) const
  {
    const auto q = rotated(us);
    RVector out(as_index(n_residuals()));
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < us.size(); ++k)
    {
      for (std::size_t a = 0; a < seeds.size(); ++a)
      {
        out.segment(row, as_index(targets.size())) = targets.products(q[k][a]) / seed_norms[a];
        row += as_index(targets.size());
      }
    }
    if (mutual)
    {
      for (std::size_t k = 0; k < us.size(); ++k)
        for (std::size_t l = k + 1; l < us.size(); ++l)
          for (std::size_t a = 0; a < seeds.size(); ++a)
            for (std::size_t b = 0; b < seeds.size(); ++b)
            {
              out(row++) = m_killing_scaled(q[k][a], q[l][b]) / (seed_norms[a] * seed_norms[b]);
            }
    }
    return out;
  }

  RMatrix jacobian(const std::vector<CMatrix> &us) const
  {
    // U -> U exp(i d G) moves q to q - i d [G, q].
    const auto q = rotated(us);
    const std::size_t ng = generators.size();
    RMatrix jac = RMatrix::Zero(as_index(n_residuals()), as_index(n_params()));
    std::vector<std::vector<std::vector<CMatrix>>> dq(us.size());
    for (std::size_t k = 0; k < us.size(); ++k)
    {
      dq[k].resize(seeds.size());
      for (std::size_t a = 0; a < seeds.size(); ++a)
        for (std::size_t g = 0; g < ng; ++g)
        {
          dq[k][a].push_back(-imag_unit() * commutator(generators[g], q[k][a]));
        }
    }
    Eigen::Index row = 0;
    for (std::size_t k = 0; k < us.size(); ++k)
    {
      for (std::size_t a = 0; a < seeds.size(); ++a)
      {
        for (std::size_t g = 0; g < ng; ++g)
        {
          jac.block(row, as_index(k * ng + g), as_index(targets.size()), 1) =
              targets.products(dq[k][a][g]) / seed_norms[a];
        }
        row += as_index(targets.size());
      }
    }
    if (mutual)
    {
      for (std::size_t k = 0; k < us.size(); ++k)
        for (std::size_t l = k + 1; l < us.size(); ++l)
          for (std::size_t a = 0; a < seeds.size(); ++a)
            for (std::size_t b = 0; b < seeds.size(); ++b)
            {
              const double norm = seed_norms[a] * seed_norms[b];
              for (std::size_t g = 0; g < ng; ++g)
              {
                jac(row, as_index(k * ng + g)) = m_killing_scaled(dq[k][a][g], q[l][b]) / norm;
                jac(row, as_index(l * ng + g)) = m_killing_scaled(q[k][a], dq[l][b][g]) / norm;
              }
              ++row;
            }
    }
    return jac;
  }

  std::vector<CMatrix> step(const std::vector<CMatrix> &us, const RVector &delta) const
  {
    std::vector<CMatrix> out;
    for (std::size_t k = 0; k < us.size(); ++k)
    {
      out.push_back(us[k] * exp_direction(delta.segment(as_index(k * generators.size()), as_index(generators.size()))));
    }
    return out;
  }

  CMatrix exp_direction(const RVector &theta) const
  {
    CMatrix a = CMatrix::Zero(generators[0].rows(), generators[0].cols());
    for (std::size_t k = 0; k < generators.size(); ++k)
    {
      a += theta(as_index(k)) * generators[k];
    }
    return expi_hermitian(0.5 * (a + a.adjoint()));
  }

private:
  double m_killing_scaled(const CMatrix &x, const CMatrix &y) const
  {
    const CVector cx = frame.coordinates(x);
    const CVector cy = frame.coordinates(y);
    return (cx.transpose() * frame.killing_metric() * cy).value().real();
  }
};

struct SolveOutcome
{
  std::vector<CMatrix> us;
  double residual = 0.0;
  bool converged = false;
};

SolveOutcome levenberg_marquardt(const RotationProblem &prob, std::vector<CMatrix> us)
{
  constexpr double kTarget = 1e-10;
  constexpr int kMaxIter = 400;
  const Eigen::Index n = as_index(prob.n_params());

  RVector r = prob.residuals(us);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  for (int iter = 0; iter < kMaxIter; ++iter)
  {
    if (r.cwiseAbs().maxCoeff() < kTarget)
    {
      return {us, r.cwiseAbs().maxCoeff(), true};
    }
    const RMatrix jac = prob.jacobian(us);
    const RMatrix jtj = jac.transpose() * jac;
    const RVector grad = jac.transpose() * r;
    bool accepted = false;
    while (mu < 1e10)
    {
      const RMatrix lhs = jtj + mu * RMatrix::Identity(n, n);
      const RVector delta = lhs.ldlt().solve(-grad);
      std::vector<CMatrix> trial = prob.step(us, delta);
      const RVector r_trial = prob.residuals(trial);
      const double cost_trial = r_trial.squaredNorm();
      if (cost_trial < cost)
      {
        us = std::move(trial);
        r = r_trial;
        cost = cost_trial;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted)
    {
      break;
    }
  }
  const double res = r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  return {us, res, res < kTarget};
}

RotationProblem make_problem(const AlgebraFrame &frame, const std::vector<CMatrix> &existing,
                             const CartanWeylBasis &seed_cw, std::size_t n_unitaries, bool mutual)
{
  RotationProblem prob{frame, seed_cw.charges, {}, KillingTargets(frame, existing),
                       frame.orthonormal_generators(), n_unitaries, mutual};
  for (const CMatrix &q : prob.seeds)
  {
    prob.seed_norms.push_back(std::sqrt(std::abs(frame.killing(q, q))));
  }
  for (std::size_t a = 0; a < prob.seeds.size(); ++a)
  {
    for (std::size_t b = a + 1; b < prob.seeds.size(); ++b)
    {
      const double k = std::abs(frame.killing(prob.seeds[a], prob.seeds[b])) /
                       (prob.seed_norms[a] * prob.seed_norms[b]);
      if (k > 1e-8)
      {
        throw PreconditionError("orthogonal rotation: seed charges are not mutually Killing-orthogonal");
      }
    }
  }
  return prob;
}

SolveOutcome solve_with_restarts(const RotationProblem &prob, std::uint64_t rng_seed, int max_restarts)
{
  SolveOutcome best{{}, std::numeric_limits<double>::infinity(), false};
  for (int restart = 0; restart < max_restarts; ++restart)
  {
    std::mt19937_64 rng(rng_seed + std::uint64_t(restart));
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::vector<CMatrix> start;
    for (std::size_t k = 0; k < prob.n_unitaries; ++k)
    {
      RVector theta(as_index(prob.generators.size()));
      for (Eigen::Index g = 0; g < theta.size(); ++g)
      {
        theta(g) = angle(rng);
      }
      start.push_back(prob.exp_direction(theta));
    }
    SolveOutcome outcome = levenberg_marquardt(prob, std::move(start));
    if (outcome.converged)
    {
      return outcome;
    }
    if (outcome.residual < best.residual)
    {
      best = std::move(outcome);
    }
  }
  return best;
}

/// Makes the first nonzero hs_inner(Q, G_ref) of each charge positive; roots follow the sign.
void fix_charge_signs(CartanWeylBasis &cw, const LieBasis &reference)
{
  for (std::size_t a = 0; a < cw.charges.size(); ++a)
  {
    for (const CMatrix &g : reference.generators)
    {
      const double overlap = hs_inner(g, cw.charges[a]).real();
      if (std::abs(overlap) > 1e-8)
      {
        if (overlap < 0.0)
        {
          cw.charges[a] = -cw.charges[a];
          for (LadderPair &lp : cw.ladders)
          {
            lp.root(as_index(a)) = -lp.root(as_index(a));
          }
        }
        break;
      }
    }
  }
}

std::vector<CMatrix> normalized_cartan(const std::vector<CMatrix> &cartan)
{
  std::vector<CMatrix> out;
  if (cartan.size() <= 1)
  {
    return cartan;
  }
  for (const CMatrix &h : cartan)
  {
    out.push_back(h / h.norm());
  }
  return out;
}

PreferredBasis numerical_preferred_basis(const LieBasis &basis, const std::vector<CMatrix> &cartan,
                                         std::uint64_t rng_seed)
{
  constexpr int kAttempts = 2;
  const std::size_t c = basis.dimension();
  const std::size_t r = cartan.size();
  const CartanWeylBasis cw0 = seed_cartan_weyl(basis, normalized_cartan(cartan));
  double best = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < kAttempts; ++attempt)
  {
    PreferredBasis pb;
    pb.algebra = basis.name;
    pb.local_dim = basis.local_dim;
    pb.rank = r;
    pb.method = "numerical";
    pb.cw_bases.push_back(cw0);
    std::vector<CMatrix> existing = cw0.charges;
    std::ostringstream choice;
    choice << "rng_seed=" << rng_seed << " attempt=" << attempt;
    try
    {
      for (std::size_t round = 1; round < c / r; ++round)
      {
        const std::uint64_t seed = rng_seed + 7919ULL * std::uint64_t(attempt) + 104729ULL * std::uint64_t(round);
        const CMatrix u = solve_orthogonal_rotation(basis, existing, cw0, seed);
        CartanWeylBasis cw = conjugate_basis(u, cw0);
        fix_charge_signs(cw, basis);
        existing.insert(existing.end(), cw.charges.begin(), cw.charges.end());
        pb.cw_bases.push_back(std::move(cw));
      }
    }
    catch (const InfeasibleError &err)
    {
      best = std::min(best, err.best_residual());
      continue;
    }
    pb.choice = choice.str();
    flatten(pb);
    return pb;
  }
  // Round-by-round rotation over-constrains the last rounds for some algebras; solve them together.
  try
  {
    const std::vector<CMatrix> us = solve_joint_rotations(basis, cw0, c / r - 1, rng_seed);
    PreferredBasis pb;
    pb.algebra = basis.name;
    pb.local_dim = basis.local_dim;
    pb.rank = r;
    pb.method = "numerical";
    pb.cw_bases.push_back(cw0);
    for (const CMatrix &u : us)
    {
      CartanWeylBasis cw = conjugate_basis(u, cw0);
      fix_charge_signs(cw, basis);
      pb.cw_bases.push_back(std::move(cw));
    }
    pb.choice = "rng_seed=" + std::to_string(rng_seed) + " joint";
    flatten(pb);
    return pb;
  }
  catch (const InfeasibleError &err)
  {
    best = std::min(best, err.best_residual());
  }
  throw InfeasibleError("build_preferred_basis: no Killing-orthogonal rotation found for " + basis.name, best);
}

} // namespace

void flatten(PreferredBasis &pb)
{
  pb.charges_flat.clear();
  pb.ladders_flat.clear();
  for (const CartanWeylBasis &cw : pb.cw_bases)
  {
    pb.charges_flat.insert(pb.charges_flat.end(), cw.charges.begin(), cw.charges.end());
    pb.ladders_flat.insert(pb.ladders_flat.end(), cw.ladders.begin(), cw.ladders.end());
  }
}

CartanWeylBasis seed_cartan_weyl(const LieBasis &basis, const std::vector<CMatrix> &cartan)
{
  const AlgebraFrame frame(basis);
  const std::size_t c = basis.dimension();
  const std::size_t r = cartan.size();
  if (r == 0)
  {
    throw PreconditionError("seed_cartan_weyl: empty Cartan set");
  }
  for (std::size_t a = 0; a < r; ++a)
  {
    if (!is_hermitian(cartan[a]))
    {
      throw ValidationError("seed_cartan_weyl: Cartan element " + std::to_string(a) + " is not Hermitian");
    }
    frame.coordinates_in_span(cartan[a]);
    for (std::size_t b = a + 1; b < r; ++b)
    {
      const double scale = std::max(1.0, cartan[a].norm() * cartan[b].norm());
      if (commutator(cartan[a], cartan[b]).norm() > 1e-10 * scale)
      {
        throw ValidationError("seed_cartan_weyl: Cartan elements " + std::to_string(a) + " and " +
                              std::to_string(b) + " do not commute");
      }
    }
  }
  {
    CMatrix gram(as_index(r), as_index(r));
    for (std::size_t a = 0; a < r; ++a)
    {
      for (std::size_t b = 0; b < r; ++b)
      {
        gram(as_index(a), as_index(b)) = hs_inner(cartan[a], cartan[b]);
      }
    }
    if (!nullspace(gram, {1e-10, 1e-10}).empty())
    {
      throw DependencyError("seed_cartan_weyl: Cartan elements are linearly dependent");
    }
  }

  // The adjoint action is HS-self-adjoint, so in an orthonormal frame it is a Hermitian matrix.
  const std::vector<CMatrix> &ortho = frame.orthonormal_generators();
  std::vector<CMatrix> ads;
  for (const CMatrix &h : cartan)
  {
    CMatrix ad(as_index(c), as_index(c));
    for (std::size_t b = 0; b < c; ++b)
    {
      const CMatrix img = commutator(h, ortho[b]);
      for (std::size_t a = 0; a < c; ++a)
      {
        ad(as_index(a), as_index(b)) = hs_inner(ortho[a], img);
      }
    }
    ads.push_back(0.5 * (ad + ad.adjoint()));
  }
  double scale = 1.0;
  for (const CMatrix &ad : ads)
  {
    scale = std::max(scale, ad.norm());
  }
  const double tol = kRootTol * scale;

  // Diagonalize a random combination of the adjoint matrices. Accidental coincidences of the
  // combined eigenvalues show up as eigenvectors that are not joint root vectors; retry then.
  constexpr int kAttempts = 8;
  for (int attempt = 0; attempt < kAttempts; ++attempt)
  {
    std::mt19937_64 rng(0x5eedULL + std::uint64_t(attempt));
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    CMatrix generic = CMatrix::Zero(as_index(c), as_index(c));
    for (const CMatrix &ad : ads)
    {
      generic += weight(rng) * ad;
    }
    const EigenSystem es = eig_hermitian(generic);

    CartanWeylBasis cw;
    cw.charges = cartan;
    cw.provenance = CMatrix::Identity(as_index(basis.local_dim), as_index(basis.local_dim));
    std::size_t zero_count = 0;
    std::size_t negative_count = 0;
    bool joint = true;
    for (Eigen::Index i = 0; i < es.values.size() && joint; ++i)
    {
      CMatrix e = CMatrix::Zero(as_index(basis.local_dim), as_index(basis.local_dim));
      for (std::size_t a = 0; a < c; ++a)
      {
        e += es.vectors(as_index(a), i) * ortho[a];
      }
      e /= std::sqrt(hs_inner(e, e).real());
      RVector root(as_index(r));
      for (std::size_t a = 0; a < r; ++a)
      {
        const CMatrix img = commutator(cartan[a], e);
        root(as_index(a)) = hs_inner(e, img).real();
        joint = joint && (img - root(as_index(a)) * e).norm() <= tol;
      }
      if (!joint)
      {
        break;
      }
      if (root.cwiseAbs().maxCoeff() <= tol)
      {
        ++zero_count;
      }
      else if (!root_positive(root))
      {
        ++negative_count;
      }
      else
      {
        const CMatrix raising = phase_fixed(e);
        cw.ladders.push_back({raising, raising.adjoint(), root});
      }
    }
    if (!joint)
    {
      continue;
    }
    if (zero_count > r)
    {
      throw ValidationError("seed_cartan_weyl: Cartan set is not maximal (" + std::to_string(zero_count) +
                            " zero roots for rank " + std::to_string(r) + ")");
    }
    if (2 * cw.ladders.size() != c - r || negative_count != cw.ladders.size())
    {
      throw ValidationError("seed_cartan_weyl: found " + std::to_string(cw.ladders.size()) +
                            " ladder pairs, expected " + std::to_string((c - r) / 2));
    }
    for (std::size_t k = 0; k + 1 < cw.ladders.size(); ++k)
    {
      for (std::size_t l = k + 1; l < cw.ladders.size(); ++l)
      {
        if ((cw.ladders[k].root - cw.ladders[l].root).cwiseAbs().maxCoeff() <= kRootTol)
        {
          throw ValidationError("seed_cartan_weyl: degenerate roots cannot be resolved at tolerance");
        }
      }
    }
    std::stable_sort(cw.ladders.begin(), cw.ladders.end(),
                     [](const LadderPair &x, const LadderPair &y) { return root_greater(x.root, y.root); });
    return cw;
  }
  throw ValidationError("seed_cartan_weyl: degenerate roots cannot be resolved at tolerance");
}

CartanWeylBasis conjugate_basis(const CMatrix &u, const CartanWeylBasis &cw)
{
  if (!cw.charges.empty() && (u.rows() != cw.charges[0].rows() || u.cols() != cw.charges[0].cols()))
  {
    throw ShapeError("conjugate_basis: unitary dimension does not match the generators");
  }
  if (!is_unitary(u))
  {
    throw ValidationError("conjugate_basis: U is not unitary");
  }
  const CMatrix ud = u.adjoint();
  CartanWeylBasis out;
  for (const CMatrix &q : cw.charges)
  {
    out.charges.push_back(ud * q * u);
  }
  for (const LadderPair &lp : cw.ladders)
  {
    out.ladders.push_back({ud * lp.raising * u, ud * lp.lowering * u, lp.root});
  }
  out.provenance = cw.provenance * u;
  return out;
}

double orthogonality_residual(const LieBasis &basis, const std::vector<CMatrix> &new_charges,
                              const std::vector<CMatrix> &existing_charges)
{
  const AlgebraFrame frame(basis);
  const KillingTargets targets(frame, existing_charges);
  double worst = 0.0;
  for (const CMatrix &q : new_charges)
  {
    const double norm = std::sqrt(std::abs(frame.killing(q, q)));
    if (targets.size() > 0)
    {
      worst = std::max(worst, targets.products(q).cwiseAbs().maxCoeff() / norm);
    }
  }
  return worst;
}

CMatrix solve_orthogonal_rotation(const LieBasis &basis, const std::vector<CMatrix> &existing_charges,
                                  const CartanWeylBasis &seed_cw, std::uint64_t rng_seed, int max_restarts)
{
  const AlgebraFrame frame(basis);
  // New charges stay mutually orthogonal under a common conjugation when the seeds are.
  const RotationProblem prob = make_problem(frame, existing_charges, seed_cw, 1, false);
  const SolveOutcome outcome = solve_with_restarts(prob, rng_seed, max_restarts);
  if (!outcome.converged)
  {
    std::ostringstream msg;
    msg << "solve_orthogonal_rotation: no solution after " << max_restarts << " restarts (best residual "
        << outcome.residual << ")";
    throw InfeasibleError(msg.str(), outcome.residual);
  }
  return outcome.us.front();
}

std::vector<CMatrix> solve_joint_rotations(const LieBasis &basis, const CartanWeylBasis &seed_cw, std::size_t m,
                                           std::uint64_t rng_seed, int max_restarts)
{
  const AlgebraFrame frame(basis);
  const RotationProblem prob = make_problem(frame, seed_cw.charges, seed_cw, m, true);
  const SolveOutcome outcome = solve_with_restarts(prob, rng_seed, max_restarts);
  if (!outcome.converged)
  {
    std::ostringstream msg;
    msg << "solve_joint_rotations: no solution after " << max_restarts << " restarts (best residual "
        << outcome.residual << ")";
    throw InfeasibleError(msg.str(), outcome.residual);
  }
  return outcome.us;
}

bool has_closed_form(const LieBasis &basis)
{
  return (basis.local_dim == 2 && basis.dimension() == 3) || (basis.local_dim == 3 && basis.dimension() == 8);
}

PreferredBasis build_preferred_basis(const LieBasis &basis, const std::vector<CMatrix> &cartan,
                                     std::uint64_t rng_seed, BuildMethod method)
{
  validate_basis(basis);
  const std::size_t c = basis.dimension();
  const std::size_t r = cartan.size();
  if (r != basis.rank)
  {
    throw PreconditionError("build_preferred_basis: expected " + std::to_string(basis.rank) +
                            " Cartan elements, got " + std::to_string(r));
  }
  if (r == 0 || c % r != 0)
  {
    throw PreconditionError("build_preferred_basis: c/r is not an integer");
  }
  const bool diagonal = std::all_of(cartan.begin(), cartan.end(), is_diagonal);
  if (method == BuildMethod::automatic)
  {
    method = has_closed_form(basis) && diagonal ? BuildMethod::closed_form : BuildMethod::numerical;
  }
  if (method == BuildMethod::numerical)
  {
    return numerical_preferred_basis(basis, cartan, rng_seed);
  }
  if (!has_closed_form(basis))
  {
    throw PreconditionError("build_preferred_basis: closed form is only available for su(2) and su(3)");
  }
  if (!diagonal)
  {
    throw PreconditionError("build_preferred_basis: closed form requires the diagonal Cartan subalgebra");
  }
  if (basis.local_dim == 2)
  {
    // Pedagogical choice giving {sz, sx, sy}.
    return su2_closed_form(0.0, 0.0, 0.0, 1);
  }
  return su3_closed_form(su3_solution_families().front());
}

CMatrix su2_euler_unitary(double phi1, double phi2, double phi3)
{
  const LieBasis p = pauli_basis();
  return expi_hermitian(0.5 * phi1 * p.generators[2]) * expi_hermitian(0.5 * phi2 * p.generators[1]) *
         expi_hermitian(0.5 * phi3 * p.generators[2]);
}

PreferredBasis su2_closed_form(double phi1_i, double phi3_i, double phi1_ii, int n_ii)
{
  const LieBasis p = pauli_basis();
  const CartanWeylBasis cw0 = seed_cartan_weyl(p, {p.generators[2]});
  const CMatrix u_i = su2_euler_unitary(phi1_i, kPi / 2.0, phi3_i);
  const CMatrix u_ii = su2_euler_unitary(phi1_ii, kPi / 2.0, phi3_i + kPi * (double(n_ii) - 0.5));

  PreferredBasis pb;
  pb.algebra = p.name;
  pb.local_dim = 2;
  pb.rank = 1;
  pb.method = "closed_form";
  pb.cw_bases = {cw0, conjugate_basis(u_i, cw0), conjugate_basis(u_ii, cw0)};
  std::ostringstream choice;
  choice.precision(17);
  choice << "phi1_i=" << phi1_i << " phi3_i=" << phi3_i << " phi1_ii=" << phi1_ii << " n_ii=" << n_ii;
  pb.choice = choice.str();
  flatten(pb);
  return pb;
}

std::string to_string(Su3Parity p)
{
  switch (p)
  {
  case Su3Parity::all_even:
    return "all_even";
  case Su3Parity::i_iii_even:
    return "i_iii_even";
  case Su3Parity::i_ii_even:
    return "i_ii_even";
  case Su3Parity::ii_iii_even:
    return "ii_iii_even";
  }
  return "unknown";
}

std::array<int, 3> parity_exponents(Su3Parity p)
{
  switch (p)
  {
  case Su3Parity::all_even:
    return {0, 0, 0};
  case Su3Parity::i_iii_even:
    return {0, 1, 0};
  case Su3Parity::i_ii_even:
    return {0, 0, 1};
  case Su3Parity::ii_iii_even:
    return {0, 1, 1};
  }
  return {0, 0, 0};
}

std::vector<Su3Solution> su3_solution_families()
{
  // Each entry is (value, sign tag): tag 0 fixed, +1 follows the upper sign, -1 the lower.
  using Pattern = std::array<std::pair<double, int>, 4>;
  const double t1 = kPi / 3.0;
  const double t2 = 2.0 * kPi / 3.0;
  const double pi = kPi;

  const auto expand = [](const std::vector<Pattern> &patterns, Su3Parity parity) {
    std::vector<Su3Solution> out;
    for (const Pattern &p : patterns)
    {
      for (int sign : {1, -1})
      {
        std::array<double, 4> v{};
        for (std::size_t k = 0; k < 4; ++k)
        {
          v[k] = p[k].second == 0 ? p[k].first : double(p[k].second * sign) * p[k].first;
        }
        out.push_back({v[0], v[1], v[2], v[3], parity});
      }
    }
    // Swapping x and y gives further solutions; the last pattern is symmetric under the swap.
    for (std::size_t k = 0; k < 8; ++k)
    {
      const Su3Solution s = out[k];
      out.push_back({s.y23, s.y34, s.x23, s.x34, parity});
    }
    return out;
  };

  std::vector<Su3Solution> all;
  const auto append = [&all](const std::vector<Su3Solution> &v) { all.insert(all.end(), v.begin(), v.end()); };
  append(expand({Pattern{{{0, 0}, {t2, 1}, {t2, -1}, {t2, 1}}}, Pattern{{{0, 0}, {0, 0}, {t2, 1}, {t2, 1}}},
                 Pattern{{{0, 0}, {t2, 1}, {t2, 1}, {0, 0}}}, Pattern{{{t2, 1}, {0, 0}, {t2, 1}, {t2, -1}}},
                 Pattern{{{t2, 1}, {t2, 1}, {t2, 1}, {t2, 1}}}},
                Su3Parity::all_even));
  append(expand({Pattern{{{pi, 0}, {t1, 1}, {t1, -1}, {t1, 1}}}, Pattern{{{pi, 0}, {pi, 0}, {t1, 1}, {t1, 1}}},
                 Pattern{{{pi, 0}, {t1, 1}, {t1, 1}, {pi, 0}}}, Pattern{{{t1, 1}, {pi, 0}, {t1, 1}, {t1, -1}}},
                 Pattern{{{t1, 1}, {t1, 1}, {t1, 1}, {t1, 1}}}},
                Su3Parity::i_iii_even));
  append(expand({Pattern{{{0, 0}, {t1, 1}, {t2, 1}, {t1, 1}}}, Pattern{{{0, 0}, {pi, 0}, {t2, 1}, {t1, -1}}},
                 Pattern{{{0, 0}, {t1, -1}, {t2, 1}, {pi, 0}}}, Pattern{{{t2, 1}, {pi, 0}, {t2, 1}, {t1, 1}}},
                 Pattern{{{t2, 1}, {t1, -1}, {t2, 1}, {t1, -1}}}},
                Su3Parity::i_ii_even));
  append(expand({Pattern{{{pi, 0}, {t2, 1}, {t1, 1}, {t2, 1}}}, Pattern{{{pi, 0}, {0, 0}, {t1, 1}, {t2, -1}}},
                 Pattern{{{pi, 0}, {t2, -1}, {t1, 1}, {0, 0}}}, Pattern{{{t1, 1}, {0, 0}, {t1, 1}, {t2, 1}}},
                 Pattern{{{t1, 1}, {t2, -1}, {t1, 1}, {t2, -1}}}},
                Su3Parity::ii_iii_even));
  for (Su3Solution &s : all)
  {
    s.x23 = canonical_angle(s.x23);
    s.x34 = canonical_angle(s.x34);
    s.y23 = canonical_angle(s.y23);
    s.y34 = canonical_angle(s.y34);
  }
  return all;
}

double su3_constraint_residual(const Su3Solution &s)
{
  const std::array<int, 3> n = parity_exponents(s.parity);
  const auto sign = [](int m) { return m % 2 == 0 ? 1.0 : -1.0; };
  const auto pair = [](double x, double y, double par) {
    return std::max(std::abs(par * std::cos(x - y) + std::cos(x) + std::cos(y)),
                    std::abs(par * std::sin(x - y) - std::sin(x) + std::sin(y)));
  };
  return std::max({pair(s.x23, s.y23, sign(n[0] + n[1])), pair(s.x34, s.y34, sign(n[1] + n[2])),
                   pair(s.x23 + s.x34, s.y23 + s.y34, sign(n[0] + n[2]))});
}

CMatrix su3_euler_unitary(const std::array<double, 8> &phi)
{
  const LieBasis g = gellmann_basis(3);
  constexpr std::array<int, 8> order{3, 2, 3, 5, 3, 2, 3, 8};
  CMatrix u = CMatrix::Identity(3, 3);
  for (std::size_t k = 0; k < 8; ++k)
  {
    u = u * expi_hermitian(0.5 * phi[k] * g.generators[std::size_t(order[k] - 1)]);
  }
  return u;
}

CMatrix su3_charge_unitary(double a, double b, int n, double phi1, double phi8)
{
  const double phi7 = b - a;
  const double phi3 = a + b + std::sqrt(3.0) * phi8 - kPi * double(n) - kPi / 2.0;
  const double phi5 = kPi * (double(n) - 0.5) - phi3;
  return su3_euler_unitary({phi1, kPi / 2.0, phi3, std::acos(-1.0 / 3.0), phi5, kPi / 2.0, phi7, phi8});
}

PreferredBasis su3_closed_form(const Su3Solution &s, double a0, double b0)
{
  const LieBasis g = gellmann_basis(3);
  const double inv = 1.0 / std::sqrt(2.0);
  const CartanWeylBasis cw0 = seed_cartan_weyl(g, {inv * g.generators[2], inv * g.generators[7]});
  const std::array<int, 3> n = parity_exponents(s.parity);
  const std::array<double, 3> a{a0, a0 - s.x23, a0 - s.x23 - s.x34};
  const std::array<double, 3> b{b0, b0 - s.y23, b0 - s.y23 - s.y34};

  PreferredBasis pb;
  pb.algebra = g.name;
  pb.local_dim = 3;
  pb.rank = 2;
  pb.method = "closed_form";
  pb.cw_bases.push_back(cw0);
  for (std::size_t k = 0; k < 3; ++k)
  {
    pb.cw_bases.push_back(conjugate_basis(su3_charge_unitary(a[k], b[k], n[k]), cw0));
  }
  std::ostringstream choice;
  choice.precision(17);
  choice << "parity=" << to_string(s.parity) << " x23=" << s.x23 << " x34=" << s.x34 << " y23=" << s.y23
         << " y34=" << s.y34 << " a0=" << a0 << " b0=" << b0;
  pb.choice = choice.str();
  flatten(pb);
  return pb;
}

} // namespace ncharge
