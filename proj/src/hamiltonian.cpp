#include "ncharge/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace ncharge
{

namespace
{

/// vec([op, sum_j Q^(j)]) for every charge, real part stacked over imaginary part.
RVector stacked_constraint(const CMatrix &op, const std::vector<CMatrix> &charges, std::size_t n_sites,
                           std::size_t local_dim)
{
  const Eigen::Index block = op.size();
  CVector all(block * as_index(charges.size()));
  for (std::size_t a = 0; a < charges.size(); ++a)
  {
    const CMatrix qtot = total_operator(charges[a], n_sites, local_dim);
    const CMatrix c = op * qtot - qtot * op;
    all.segment(as_index(a) * block, block) = c.reshaped();
  }
  RVector out(2 * all.size());
  out << all.real(), all.imag();
  return out;
}

CouplingSolution solve_linear_constraints(const std::vector<CMatrix> &columns, const std::vector<CMatrix> &charges,
                                          std::size_t n_sites, std::size_t local_dim)
{
  CouplingSolution sol;
  RMatrix m;
  for (std::size_t b = 0; b < columns.size(); ++b)
  {
    const RVector col = stacked_constraint(columns[b], charges, n_sites, local_dim);
    if (b == 0)
    {
      m.resize(col.size(), as_index(columns.size()));
    }
    m.col(as_index(b)) = col;
  }
  sol.constraint_matrix = m;
  sol.nullspace_basis = nullspace(m, Tolerance{1e-10, 1e-9});
  if (!sol.nullspace_basis.empty())
  {
    sol.chosen = canonical_coupling(sol.nullspace_basis);
  }
  return sol;
}

/// Position of each label in a k-site register, in the order given.
std::map<std::size_t, std::size_t> positions(const std::vector<std::size_t> &sites)
{
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t p = 0; p < sites.size(); ++p)
  {
    pos[sites[p]] = p + 1;
  }
  return pos;
}

CMatrix embed_in_register(const CMatrix &op, const std::vector<std::size_t> &op_sites,
                          const std::map<std::size_t, std::size_t> &pos, std::size_t local_dim)
{
  const std::size_t k = pos.size();
  const std::size_t dim = hilbert_dimension(local_dim, k);
  CMatrix out = CMatrix::Zero(as_index(dim), as_index(dim));
  std::vector<std::size_t> where;
  for (std::size_t s : op_sites)
  {
    where.push_back(pos.at(s));
  }
  add_embedded(op, where, k, local_dim, 1.0, out);
  return out;
}

std::vector<std::size_t> cycle_sites(const std::vector<ParametricTerm> &cycle)
{
  const std::size_t k = cycle.size();
  if (k < 3)
  {
    throw std::invalid_argument("k_body: a cycle needs at least three two-body factors");
  }
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i < k; ++i)
  {
    if (cycle[i].sites.size() != 2)
    {
      throw std::invalid_argument("k_body: every factor must act on two sites");
    }
    if (cycle[i].sites[1] != cycle[(i + 1) % k].sites[0])
    {
      throw std::invalid_argument("k_body: factors do not form a cycle");
    }
    sites.push_back(cycle[i].sites[0]);
  }
  if (std::set<std::size_t>(sites.begin(), sites.end()).size() != k)
  {
    throw std::invalid_argument("k_body: cycle sites are not distinct");
  }
  return sites;
}

} // namespace

CMatrix ParametricTerm::evaluate(const RVector &j) const
{
  if (std::size_t(j.size()) != components.size())
  {
    throw std::invalid_argument("two-body term: expected " + std::to_string(components.size()) + " couplings, got " +
                                std::to_string(j.size()));
  }
  CMatrix h = CMatrix::Zero(components[0].rows(), components[0].cols());
  for (std::size_t b = 0; b < components.size(); ++b)
  {
    h += j(as_index(b)) * components[b];
  }
  return h;
}

HamiltonianTerm ParametricTerm::term(const RVector &j) const
{
  return {sites, evaluate(j), std::vector<double>(j.data(), j.data() + j.size())};
}

ParametricTerm two_body_unconstrained(const PreferredBasis &pb, std::vector<std::size_t> sites)
{
  if (sites.size() != 2 || sites[0] == sites[1])
  {
    throw std::invalid_argument("two_body_unconstrained: needs two distinct sites");
  }
  ParametricTerm t;
  t.sites = std::move(sites);
  for (const LadderPair &lp : pb.ladders_flat)
  {
    t.components.push_back(kron(lp.raising, lp.lowering) + kron(lp.lowering, lp.raising));
  }
  return t;
}

RVector canonical_coupling(const std::vector<RVector> &basis)
{
  if (basis.empty())
  {
    return {};
  }
  const Eigen::Index n = basis.front().size();
  RVector proj = RVector::Zero(n);
  for (const RVector &v : basis)
  {
    proj += v.sum() * v;
  }
  const double top = proj.cwiseAbs().maxCoeff();
  const bool same_sign = top > 1e-12 && ((proj.array() > 1e-9 * top).all() || (proj.array() < -1e-9 * top).all());
  RVector pick = same_sign ? proj : basis.front();
  Eigen::Index imax = 0;
  pick.cwiseAbs().maxCoeff(&imax);
  return pick / pick(imax);
}

CouplingSolution solve_couplings(const PreferredBasis &pb)
{
  const ParametricTerm t = two_body_unconstrained(pb);
  CouplingSolution sol = solve_linear_constraints(t.components, pb.charges_flat, 2, pb.local_dim);
  if (sol.nullspace_basis.empty())
  {
    throw ConstructionError("solve_couplings: no coupling vector conserves every charge (defective preferred basis?)");
  }
  return sol;
}

double conservation_residual(const CMatrix &h, const std::vector<CMatrix> &charges, std::size_t n_sites,
                             std::size_t local_dim)
{
  const double norm = h.norm();
  if (norm == 0.0)
  {
    return 0.0;
  }
  double worst = 0.0;
  for (const CMatrix &q : charges)
  {
    worst = std::max(worst, total_commutator_norm(h, q, n_sites, local_dim) / norm);
  }
  return worst;
}

KBodyResult k_body(const PreferredBasis &pb, const std::vector<ParametricTerm> &cycle,
                   const std::vector<RVector> &couplings)
{
  const std::vector<std::size_t> sites = cycle_sites(cycle);
  const std::size_t k = sites.size();
  if (couplings.size() != k)
  {
    throw std::invalid_argument("k_body: one coupling vector per factor is required");
  }
  const std::size_t d = pb.local_dim;
  const auto pos = positions(sites);
  const std::size_t dim = hilbert_dimension(d, k);

  KBodyResult out;
  CMatrix product = CMatrix::Identity(as_index(dim), as_index(dim));
  std::vector<double> all_j;
  for (std::size_t i = 0; i < k; ++i)
  {
    product = product * embed_in_register(cycle[i].evaluate(couplings[i]), cycle[i].sites, pos, d);
    all_j.insert(all_j.end(), couplings[i].data(), couplings[i].data() + couplings[i].size());
  }
  out.product = {sites, product, all_j};
  out.product_conservation = conservation_residual(product, pb.charges_flat, k, d);

  // Identity, canonical two-body terms on every pair, and lower-order remainders.
  const CouplingSolution two = solve_couplings(pb);
  const CMatrix h2 = two_body_unconstrained(pb).evaluate(two.chosen);
  out.subtraction_set.push_back(CMatrix::Identity(as_index(dim), as_index(dim)));
  for (std::size_t p = 0; p < k; ++p)
  {
    for (std::size_t q = p + 1; q < k; ++q)
    {
      out.subtraction_set.push_back(embed_in_register(h2, {sites[p], sites[q]}, pos, d));
    }
  }
  if (k > 3)
  {
    for (std::size_t drop = 0; drop < k; ++drop)
    {
      std::vector<std::size_t> sub;
      for (std::size_t p = 0; p < k; ++p)
      {
        if (p != drop)
        {
          sub.push_back(sites[p]);
        }
      }
      std::vector<ParametricTerm> sub_cycle;
      std::vector<RVector> sub_j;
      for (std::size_t p = 0; p < sub.size(); ++p)
      {
        sub_cycle.push_back(two_body_unconstrained(pb, {sub[p], sub[(p + 1) % sub.size()]}));
        sub_j.push_back(two.chosen);
      }
      const KBodyResult lower = k_body(pb, sub_cycle, sub_j);
      if (lower.remainder.norm() > 0.0)
      {
        out.subtraction_set.push_back(embed_in_register(lower.remainder, sub, pos, d));
      }
    }
  }

  CMatrix a(as_index(dim * dim), as_index(out.subtraction_set.size()));
  for (std::size_t m = 0; m < out.subtraction_set.size(); ++m)
  {
    a.col(as_index(m)) = out.subtraction_set[m].reshaped();
  }
  const CVector target = product.reshaped();
  out.subtraction_coefficients = a.colPivHouseholderQr().solve(target);
  const CVector rem = target - a * out.subtraction_coefficients;
  out.remainder = rem.reshaped(as_index(dim), as_index(dim));

  const double scale = std::max(1.0, product.norm());
  if (out.remainder.norm() <= 1e-12 * scale)
  {
    out.remainder.setZero();
    out.term = {sites, CMatrix::Zero(as_index(dim), as_index(dim)), all_j};
  }
  else
  {
    const Complex t = (out.remainder * out.remainder).trace();
    const double theta = std::abs(t) > 0.0 ? -0.5 * std::arg(t) : 0.0;
    out.phase = std::polar(1.0, theta);
    const CMatrix rotated = out.phase * out.remainder;
    out.term = {sites, 0.5 * (rotated + rotated.adjoint()), all_j};
  }

  // System linear in the coupling products J1_b1 J2_b2 ... Jk_bk.
  std::size_t n_monomials = 1;
  for (const ParametricTerm &f : cycle)
  {
    n_monomials *= f.n_couplings();
  }
  if (n_monomials <= kMaxMonomials)
  {
    std::vector<std::vector<CMatrix>> factors(k);
    for (std::size_t i = 0; i < k; ++i)
    {
      for (const CMatrix &c : cycle[i].components)
      {
        factors[i].push_back(embed_in_register(c, cycle[i].sites, pos, d));
      }
    }
    std::vector<CMatrix> columns;
    std::vector<std::size_t> index(k, 0);
    for (std::size_t m = 0; m < n_monomials; ++m)
    {
      std::size_t rest = m;
      for (std::size_t i = k; i-- > 0;)
      {
        index[i] = rest % cycle[i].n_couplings();
        rest /= cycle[i].n_couplings();
      }
      CMatrix prod = factors[0][index[0]];
      for (std::size_t i = 1; i < k; ++i)
      {
        prod = prod * factors[i][index[i]];
      }
      columns.push_back(std::move(prod));
    }
    out.monomial_solution = solve_linear_constraints(columns, pb.charges_flat, k, d);
  }
  return out;
}

std::vector<std::vector<RVector>> su2_three_body_families(double rho)
{
  const auto same = [](double a, double b, double c) {
    RVector v(3);
    v << a, b, c;
    return std::vector<RVector>{v, v, v};
  };
  return {same(1, 1, 1), same(1, 1, -1), same(1, 1, -2), same(1, rho, -1 - rho)};
}

CMatrix scalar_chirality()
{
  const LieBasis p = pauli_basis();
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}, {0, 2, 1}, {1, 0, 2}};
  CMatrix chi = CMatrix::Zero(8, 8);
  for (int n = 0; n < 6; ++n)
  {
    const double sign = n < 3 ? 1.0 : -1.0;
    chi += sign * kron(kron(p.generators[std::size_t(perms[n][0])], p.generators[std::size_t(perms[n][1])]),
                       p.generators[std::size_t(perms[n][2])]);
  }
  return imag_unit() * chi;
}

void validate_lattice(const LatticeSpec &lattice)
{
  if (lattice.n_sites == 0)
  {
    throw std::invalid_argument("lattice: n_sites must be positive");
  }
  const auto in_range = [&](std::size_t s) { return s >= 1 && s <= lattice.n_sites; };
  for (std::size_t e = 0; e < lattice.edges.size(); ++e)
  {
    const Edge &edge = lattice.edges[e];
    if (!in_range(edge.i) || !in_range(edge.j))
    {
      throw std::invalid_argument("lattice: edge " + std::to_string(e) + " has a site outside [1, n_sites]");
    }
    if (edge.i == edge.j)
    {
      throw std::invalid_argument("lattice: edge " + std::to_string(e) + " is a self-edge");
    }
  }
  for (std::size_t g = 0; g < lattice.k_body_groups.size(); ++g)
  {
    const auto &sites = lattice.k_body_groups[g].sites;
    if (sites.size() < 2 || !std::all_of(sites.begin(), sites.end(), in_range) ||
        std::set<std::size_t>(sites.begin(), sites.end()).size() != sites.size())
    {
      throw std::invalid_argument("lattice: k-body group " + std::to_string(g) +
                                  " needs at least two distinct sites in [1, n_sites]");
    }
  }
}

LatticeSpec chain_lattice(std::size_t n_sites, bool periodic, double j1, double j2)
{
  LatticeSpec lat;
  lat.n_sites = n_sites;
  lat.geometry = std::string(periodic ? "chain-pbc" : "chain-obc") + (j2 != 0.0 ? "-nnn" : "");
  for (std::size_t i = 1; i < n_sites; ++i)
  {
    lat.edges.push_back({i, i + 1, j1});
  }
  if (periodic && n_sites > 2)
  {
    lat.edges.push_back({n_sites, 1, j1});
  }
  if (j2 != 0.0)
  {
    for (std::size_t i = 1; i + 2 <= n_sites; ++i)
    {
      lat.edges.push_back({i, i + 2, j2});
    }
    if (periodic && n_sites > 4)
    {
      lat.edges.push_back({n_sites - 1, 1, j2});
      lat.edges.push_back({n_sites, 2, j2});
    }
  }
  return lat;
}

GlobalHamiltonian assemble_global(const LatticeSpec &lattice, const PreferredBasis &pb,
                                  const CouplingSolution &coupling, const AssemblyOptions &options)
{
  validate_lattice(lattice);
  const std::size_t d = pb.local_dim;
  std::size_t dim = 1;
  for (std::size_t s = 0; s < lattice.n_sites; ++s)
  {
    if (dim > options.dimension_cap / d + 1)
    {
      dim = options.dimension_cap + 1;
      break;
    }
    dim *= d;
  }
  if (dim > options.dimension_cap)
  {
    throw ResourceError("assemble_global: D^N = " + std::to_string(d) + "^" + std::to_string(lattice.n_sites) +
                        " exceeds the dimension cap " + std::to_string(options.dimension_cap));
  }

  GlobalHamiltonian g;
  g.lattice = lattice;
  g.algebra = pb.algebra;
  g.local_dim = d;
  g.coupling = coupling.chosen;
  g.matrix = CMatrix::Zero(as_index(dim), as_index(dim));
  if (!lattice.edges.empty())
  {
    const CMatrix h2 = two_body_unconstrained(pb).evaluate(coupling.chosen);
    for (const Edge &e : lattice.edges)
    {
      add_embedded(h2, {e.i, e.j}, lattice.n_sites, d, e.weight, g.matrix);
    }
  }
  const bool paired = options.k_body_terms.size() == lattice.k_body_groups.size();
  for (std::size_t gi = 0; gi < lattice.k_body_groups.size(); ++gi)
  {
    const SiteGroup &group = lattice.k_body_groups[gi];
    auto it = std::find_if(options.k_body_terms.begin(), options.k_body_terms.end(),
                           [&](const HamiltonianTerm &t) { return t.k() == group.sites.size(); });
    if (paired && options.k_body_terms[gi].k() == group.sites.size())
    {
      it = options.k_body_terms.begin() + std::ptrdiff_t(gi);
    }
    if (it == options.k_body_terms.end())
    {
      throw ConstructionError("assemble_global: no " + std::to_string(group.sites.size()) +
                              "-body term supplied for a k-body group");
    }
    if (!is_hermitian(it->matrix))
    {
      throw ConstructionError("assemble_global: the " + std::to_string(group.sites.size()) +
                              "-body term is not Hermitian");
    }
    add_embedded(it->matrix, group.sites, lattice.n_sites, d, group.weight, g.matrix);
  }

  const double scale = std::max(1.0, g.matrix.norm());
  for (std::size_t a = 0; a < pb.charges_flat.size(); ++a)
  {
    const double res = total_commutator_norm(g.matrix, pb.charges_flat[a], lattice.n_sites, d) / scale;
    g.conservation_residual = std::max(g.conservation_residual, res);
    if (res > options.conservation_tol)
    {
      std::ostringstream msg;
      msg << "assemble_global: total charge " << a + 1 << " is not conserved (residual " << res << ")";
      throw ConstructionError(msg.str());
    }
  }
  return g;
}

HamiltonianTerm simple_form(const std::vector<CMatrix> &charges)
{
  if (charges.empty())
  {
    throw std::invalid_argument("simple_form: no charges");
  }
  CMatrix h = CMatrix::Zero(charges[0].rows() * charges[0].rows(), charges[0].cols() * charges[0].cols());
  for (const CMatrix &q : charges)
  {
    h += kron(q, q);
  }
  return {{1, 2}, h, {}};
}

HamiltonianTerm simple_form(const PreferredBasis &pb) { return simple_form(pb.charges_flat); }

} // namespace ncharge
