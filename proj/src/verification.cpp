#include "ncharge/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ncharge
{

namespace
{

std::string num(double v)
{
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string idx(std::size_t v) { return std::to_string(v); }

} // namespace

VerificationReport make_report(std::string name, double residual, double threshold,
                               std::map<std::string, std::string> context)
{
  VerificationReport r;
  r.name = std::move(name);
  r.residual = residual;
  r.threshold = threshold;
  r.pass = residual <= threshold;
  r.context = std::move(context);
  return r;
}

bool all_pass(const std::vector<VerificationReport> &reports)
{
  return std::all_of(reports.begin(), reports.end(), [](const VerificationReport &r) { return r.pass; });
}

std::vector<VerificationReport> check_global_conservation(const GlobalHamiltonian &h, const PreferredBasis &pb,
                                                          double threshold)
{
  const std::size_t n = h.lattice.n_sites;
  if (std::size_t(h.matrix.rows()) != hilbert_dimension(pb.local_dim, n))
  {
    throw ShapeError("check_global_conservation: Hamiltonian dimension does not match D^N");
  }
  const double scale = std::max(1.0, h.matrix.norm());
  std::vector<VerificationReport> out;
  for (std::size_t a = 0; a < pb.charges_flat.size(); ++a)
  {
    const double res = total_commutator_norm(h.matrix, pb.charges_flat[a], n, pb.local_dim) / scale;
    out.push_back(make_report("global_conservation", res, threshold, {{"charge", idx(a + 1)}}));
  }
  return out;
}

std::vector<VerificationReport> check_local_transport(const HamiltonianTerm &term, const PreferredBasis &pb)
{
  const std::size_t k = term.k();
  if (k < 2)
  {
    throw std::invalid_argument("check_local_transport: the term must act on at least two sites");
  }
  const double floor = kTransportFloor * term.matrix.norm();
  std::vector<VerificationReport> out;
  for (std::size_t a = 0; a < pb.charges_flat.size(); ++a)
  {
    for (std::size_t p = 0; p < k; ++p)
    {
      const CMatrix q = kron_embed(pb.charges_flat[a], p + 1, k, pb.local_dim);
      const double c = commutator(term.matrix, q).norm();
      const double res = floor + c > 0.0 ? floor / (floor + c) : 1.0;
      out.push_back(make_report("local_transport", res, 0.5,
                                {{"charge", idx(a + 1)},
                                 {"site", idx(term.sites[p])},
                                 {"commutator_norm", num(c)},
                                 {"floor", num(floor)}}));
    }
  }
  return out;
}

std::vector<VerificationReport> check_preferred_basis(const PreferredBasis &pb, const LieBasis &basis,
                                                      double threshold)
{
  std::vector<VerificationReport> out;
  const std::vector<CMatrix> &q = pb.charges_flat;
  const std::size_t c = q.size();

  double herm = 0.0;
  for (const CMatrix &x : q)
  {
    herm = std::max(herm, (x - x.adjoint()).norm() / std::max(1.0, x.norm()));
  }
  out.push_back(make_report("charges_hermitian", herm, threshold));

  const AlgebraFrame frame(basis);
  double span = 0.0;
  for (const CMatrix &x : q)
  {
    span = std::max(span, frame.span_residual(x) / std::max(1.0, x.norm()));
  }
  out.push_back(make_report("charges_in_span", span, threshold));

  std::vector<double> self(c);
  for (std::size_t a = 0; a < c; ++a)
  {
    self[a] = std::abs(frame.killing(q[a], q[a]));
  }
  for (std::size_t a = 0; a < c; ++a)
  {
    for (std::size_t b = a + 1; b < c; ++b)
    {
      const double denom = std::sqrt(self[a] * self[b]);
      const double res = denom > 0.0 ? std::abs(frame.killing(q[a], q[b])) / denom : 1.0;
      out.push_back(make_report("killing_orthogonality", res, threshold, {{"charge_a", idx(a + 1)}, {"charge_b", idx(b + 1)}}));
    }
  }

  // Gram rank of the charges in the HS inner product; residual counts missing dimensions.
  RMatrix gram(as_index(c), as_index(c));
  for (std::size_t a = 0; a < c; ++a)
  {
    for (std::size_t b = 0; b < c; ++b)
    {
      gram(as_index(a), as_index(b)) = hs_inner(q[a], q[b]).real();
    }
  }
  long rank = 0;
  if (c > 0)
  {
    const RVector sv = Eigen::JacobiSVD<RMatrix>(gram).singularValues();
    const double cut = 1e-9 * std::max(1.0, sv(0));
    rank = long((sv.array() > cut).count());
  }
  const long expected = long(basis.dimension());
  out.push_back(make_report("gram_rank", double(std::labs(expected - rank) + std::labs(expected - long(c))), 0.0,
                            {{"rank", std::to_string(rank)}, {"expected", std::to_string(expected)}}));

  for (std::size_t s = 0; s < pb.cw_bases.size(); ++s)
  {
    const CartanWeylBasis &cw = pb.cw_bases[s];
    double comm = 0.0;
    for (std::size_t a = 0; a < cw.charges.size(); ++a)
    {
      for (std::size_t b = a + 1; b < cw.charges.size(); ++b)
      {
        comm = std::max(comm, commutator(cw.charges[a], cw.charges[b]).norm());
      }
    }
    out.push_back(make_report("cartan_commute", comm, threshold, {{"cw_basis", idx(s + 1)}}));
    for (std::size_t l = 0; l < cw.ladders.size(); ++l)
    {
      const LadderPair &lp = cw.ladders[l];
      const double scale = std::max(1.0, lp.raising.norm());
      const std::map<std::string, std::string> ctx{{"cw_basis", idx(s + 1)}, {"ladder", idx(l + 1)}};
      out.push_back(make_report("ladder_adjoint", (lp.lowering - lp.raising.adjoint()).norm() / scale, threshold, ctx));
      double root = 0.0;
      for (std::size_t a = 0; a < cw.charges.size(); ++a)
      {
        const double alpha = a < std::size_t(lp.root.size()) ? lp.root(as_index(a)) : 0.0;
        root = std::max(root, (commutator(cw.charges[a], lp.raising) - alpha * lp.raising).norm() / scale);
        root = std::max(root, (commutator(cw.charges[a], lp.lowering) + alpha * lp.lowering).norm() / scale);
      }
      out.push_back(make_report("root_equation", root, threshold, ctx));
    }
  }
  return out;
}

VerificationReport check_ratio(const AlgebraRegistryEntry &entry)
{
  const double res = entry.rank > 0 ? double(entry.dimension % entry.rank) : double(entry.dimension);
  return make_report("integer_ratio", res, 0.0,
                     {{"algebra", entry.label()},
                      {"c", std::to_string(entry.dimension)},
                      {"r", std::to_string(entry.rank)}});
}

} // namespace ncharge
