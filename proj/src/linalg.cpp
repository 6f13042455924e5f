#include "ncharge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ncharge
{

namespace
{

struct SiteLayout
{
  std::vector<std::size_t> strides; // stride of each listed site in the full index
  std::vector<std::size_t> offsets; // full-index offset of every local configuration
  std::size_t local_size = 1;
};

SiteLayout make_layout(const std::vector<std::size_t> &sites, std::size_t n_sites, std::size_t local_dim)
{
  SiteLayout layout;
  std::vector<bool> seen(n_sites + 1, false);
  for (std::size_t site : sites)
  {
    if (site < 1 || site > n_sites)
    {
      throw std::out_of_range("site index " + std::to_string(site) + " outside [1, " +
                              std::to_string(n_sites) + "]");
    }
    if (seen[site])
    {
      throw std::invalid_argument("site " + std::to_string(site) + " listed twice");
    }
    seen[site] = true;
    std::size_t stride = 1;
    for (std::size_t j = site; j < n_sites; ++j)
    {
      stride *= local_dim;
    }
    layout.strides.push_back(stride);
    layout.local_size *= local_dim;
  }
  const std::size_t k = sites.size();
  layout.offsets.assign(layout.local_size, 0);
  for (std::size_t l = 0; l < layout.local_size; ++l)
  {
    std::size_t rem = l;
    std::size_t off = 0;
    for (std::size_t m = k; m-- > 0;)
    {
      off += (rem % local_dim) * layout.strides[m];
      rem /= local_dim;
    }
    layout.offsets[l] = off;
  }
  return layout;
}

// Splits a full index into (local configuration, remainder with listed digits zeroed).
inline std::pair<std::size_t, std::size_t> split_index(std::size_t s, const SiteLayout &layout,
                                                       std::size_t local_dim)
{
  std::size_t local = 0;
  std::size_t rest = s;
  for (std::size_t m = 0; m < layout.strides.size(); ++m)
  {
    const std::size_t digit = (s / layout.strides[m]) % local_dim;
    local = local * local_dim + digit;
    rest -= digit * layout.strides[m];
  }
  return {local, rest};
}

void check_square(const CMatrix &op, std::size_t expected, const char *what)
{
  if (std::size_t(op.rows()) != expected || std::size_t(op.cols()) != expected)
  {
    std::ostringstream msg;
    msg << what << ": operator is " << op.rows() << "x" << op.cols() << ", expected " << expected << "x"
        << expected;
    throw ShapeError(msg.str());
  }
}

bool is_diagonal(const CMatrix &m, double tol)
{
  for (Eigen::Index j = 0; j < m.cols(); ++j)
  {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
      if (i != j && std::abs(m(i, j)) > tol)
      {
        return false;
      }
    }
  }
  return true;
}

} // namespace

CMatrix kron(const CMatrix &a, const CMatrix &b)
{
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

std::size_t hilbert_dimension(std::size_t local_dim, std::size_t n_sites)
{
  std::size_t dim = 1;
  for (std::size_t j = 0; j < n_sites; ++j)
  {
    if (dim > std::numeric_limits<std::size_t>::max() / std::max<std::size_t>(local_dim, 1))
    {
      throw std::overflow_error("Hilbert-space dimension overflows");
    }
    dim *= local_dim;
  }
  return dim;
}

CMatrix kron_embed(const CMatrix &op, std::size_t site, std::size_t n_sites, std::size_t local_dim)
{
  check_square(op, local_dim, "kron_embed");
  if (site < 1 || site > n_sites)
  {
    throw std::out_of_range("kron_embed: site " + std::to_string(site) + " outside [1, " +
                            std::to_string(n_sites) + "]");
  }
  const std::size_t left = hilbert_dimension(local_dim, site - 1);
  const std::size_t right = hilbert_dimension(local_dim, n_sites - site);
  CMatrix out = kron(CMatrix::Identity(left, left), op);
  return kron(out, CMatrix::Identity(right, right));
}

CMatrix total_operator(const CMatrix &op, std::size_t n_sites, std::size_t local_dim)
{
  const std::size_t dim = hilbert_dimension(local_dim, n_sites);
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::size_t j = 1; j <= n_sites; ++j)
  {
    add_embedded(op, {j}, n_sites, local_dim, 1.0, out);
  }
  return out;
}

void add_embedded(const CMatrix &op, const std::vector<std::size_t> &sites, std::size_t n_sites,
                  std::size_t local_dim, Complex weight, CMatrix &target)
{
  const SiteLayout layout = make_layout(sites, n_sites, local_dim);
  check_square(op, layout.local_size, "add_embedded");
  const std::size_t dim = hilbert_dimension(local_dim, n_sites);
  if (std::size_t(target.rows()) != dim || std::size_t(target.cols()) != dim)
  {
    throw ShapeError("add_embedded: target has wrong dimension");
  }
  const CMatrix scaled = weight * op;
  for (std::size_t s = 0; s < dim; ++s)
  {
    const auto [local, rest] = split_index(s, layout, local_dim);
    for (std::size_t l = 0; l < layout.local_size; ++l)
    {
      const Complex v = scaled(Eigen::Index(l), Eigen::Index(local));
      if (v != Complex(0.0, 0.0))
      {
        target(Eigen::Index(rest + layout.offsets[l]), Eigen::Index(s)) += v;
      }
    }
  }
}

CMatrix apply_embedded(const CMatrix &op, const std::vector<std::size_t> &sites, std::size_t n_sites,
                       std::size_t local_dim, const CMatrix &x)
{
  const SiteLayout layout = make_layout(sites, n_sites, local_dim);
  check_square(op, layout.local_size, "apply_embedded");
  const std::size_t dim = hilbert_dimension(local_dim, n_sites);
  if (std::size_t(x.rows()) != dim)
  {
    throw ShapeError("apply_embedded: operand has wrong row count");
  }
  // Work on the transpose so that a "row" of x is contiguous.
  const CMatrix xt = x.transpose();
  CMatrix outt = CMatrix::Zero(x.cols(), x.rows());
  for (std::size_t s = 0; s < dim; ++s)
  {
    const auto [local, rest] = split_index(s, layout, local_dim);
    for (std::size_t l = 0; l < layout.local_size; ++l)
    {
      const Complex v = op(Eigen::Index(l), Eigen::Index(local));
      if (v != Complex(0.0, 0.0))
      {
        outt.col(Eigen::Index(rest + layout.offsets[l])) += v * xt.col(Eigen::Index(s));
      }
    }
  }
  return outt.transpose();
}

CMatrix apply_total(const CMatrix &op, std::size_t n_sites, std::size_t local_dim, const CMatrix &x)
{
  check_square(op, local_dim, "apply_total");
  const std::size_t dim = hilbert_dimension(local_dim, n_sites);
  if (std::size_t(x.rows()) != dim)
  {
    throw ShapeError("apply_total: operand has wrong row count");
  }
  if (is_diagonal(op, 0.0))
  {
    // The total is diagonal in the product basis.
    RVector re(as_index(dim));
    RVector im(as_index(dim));
    for (std::size_t s = 0; s < dim; ++s)
    {
      Complex t = 0.0;
      std::size_t rest = s;
      for (std::size_t j = 0; j < n_sites; ++j)
      {
        const auto digit = as_index(rest % local_dim);
        t += op(digit, digit);
        rest /= local_dim;
      }
      re(as_index(s)) = t.real();
      im(as_index(s)) = t.imag();
    }
    const CVector diag = re.cast<Complex>() + imag_unit() * im.cast<Complex>();
    return diag.asDiagonal() * x;
  }
  const CMatrix xt = x.transpose();
  CMatrix outt = CMatrix::Zero(x.cols(), x.rows());
  for (std::size_t j = 1; j <= n_sites; ++j)
  {
    const SiteLayout layout = make_layout({j}, n_sites, local_dim);
    for (std::size_t s = 0; s < dim; ++s)
    {
      const auto [local, rest] = split_index(s, layout, local_dim);
      for (std::size_t l = 0; l < local_dim; ++l)
      {
        const Complex v = op(as_index(l), as_index(local));
        if (v != Complex(0.0, 0.0))
        {
          outt.col(as_index(rest + layout.offsets[l])) += v * xt.col(as_index(s));
        }
      }
    }
  }
  return outt.transpose();
}

CMatrix apply_site_permutation(const std::vector<std::size_t> &perm, std::size_t local_dim, const CMatrix &x)
{
  const std::size_t n_sites = perm.size();
  const std::size_t dim = hilbert_dimension(local_dim, n_sites);
  if (std::size_t(x.rows()) != dim)
  {
    throw ShapeError("apply_site_permutation: operand has wrong row count");
  }
  std::vector<std::size_t> stride(n_sites + 1, 1);
  for (std::size_t j = n_sites; j-- > 1;)
  {
    stride[j] = stride[j + 1] * local_dim;
  }
  stride[0] = 0;
  std::vector<bool> seen(n_sites + 1, false);
  for (std::size_t target : perm)
  {
    if (target < 1 || target > n_sites || seen[target])
    {
      throw std::invalid_argument("apply_site_permutation: not a permutation of 1..N");
    }
    seen[target] = true;
  }
  CMatrix out(x.rows(), x.cols());
  for (std::size_t s = 0; s < dim; ++s)
  {
    std::size_t image = 0;
    for (std::size_t j = 1; j <= n_sites; ++j)
    {
      const std::size_t digit = (s / stride[j]) % local_dim;
      image += digit * stride[perm[j - 1]];
    }
    out.row(Eigen::Index(image)) = x.row(Eigen::Index(s));
  }
  return out;
}

double total_commutator_norm(const CMatrix &h, const CMatrix &op, std::size_t n_sites, std::size_t local_dim)
{
  const CMatrix qh = apply_total(op, n_sites, local_dim, h);
  if (is_hermitian(h) && is_hermitian(op))
  {
    // [H, Q] = (Q H)^dagger - Q H.
    return (qh.adjoint() - qh).norm();
  }
  const CMatrix hq = apply_total(op.adjoint(), n_sites, local_dim, h.adjoint()).adjoint();
  return (hq - qh).norm();
}

EigenSystem eig_hermitian(const CMatrix &h)
{
  if (h.rows() != h.cols())
  {
    throw ShapeError("eig_hermitian: matrix must be square");
  }
  if (!is_hermitian(h))
  {
    throw ValidationError("eig_hermitian: matrix is not Hermitian");
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
  {
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RVector eigvals_hermitian(const CMatrix &h)
{
  if (h.rows() != h.cols())
  {
    throw ShapeError("eigvals_hermitian: matrix must be square");
  }
  if (!is_hermitian(h))
  {
    throw ValidationError("eigvals_hermitian: matrix is not Hermitian");
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
  {
    throw std::runtime_error("eigvals_hermitian: eigensolver did not converge");
  }
  return solver.eigenvalues();
}

CMatrix expi_hermitian(const CMatrix &a)
{
  const EigenSystem es = eig_hermitian(a);
  const CVector phases = (imag_unit() * es.values.cast<Complex>()).array().exp();
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

double round_label(double value)
{
  const double r = std::round(value * 1e8) / 1e8;
  return r == 0.0 ? 0.0 : r; // no negative zero in labels
}

std::vector<JointEigenspace> simultaneous_eigenspaces(const std::vector<CMatrix> &ops, const Tolerance &tol)
{
  if (ops.empty())
  {
    throw std::invalid_argument("simultaneous_eigenspaces: no operators given");
  }
  const Eigen::Index n = ops.front().rows();
  for (std::size_t i = 0; i < ops.size(); ++i)
  {
    if (ops[i].rows() != n || ops[i].cols() != n)
    {
      throw ShapeError("simultaneous_eigenspaces: operators differ in dimension");
    }
    if (!is_hermitian(ops[i]))
    {
      throw ValidationError("simultaneous_eigenspaces: operator " + std::to_string(i) + " is not Hermitian");
    }
  }

  const bool all_diagonal = std::all_of(ops.begin(), ops.end(), [&](const CMatrix &op) {
    return is_diagonal(op, tol.threshold(op.norm()));
  });

  std::vector<JointEigenspace> sectors;
  if (all_diagonal)
  {
    // Computational basis states already diagonalize everything; group by rounded tuple.
    std::vector<std::pair<std::vector<double>, Eigen::Index>> labelled;
    labelled.reserve(std::size_t(n));
    for (Eigen::Index s = 0; s < n; ++s)
    {
      std::vector<double> label;
      for (const CMatrix &op : ops)
      {
        label.push_back(round_label(op(s, s).real()));
      }
      labelled.emplace_back(std::move(label), s);
    }
    std::stable_sort(labelled.begin(), labelled.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });
    std::size_t i = 0;
    while (i < labelled.size())
    {
      std::size_t j = i;
      while (j < labelled.size() && labelled[j].first == labelled[i].first)
      {
        ++j;
      }
      JointEigenspace sector;
      sector.values = labelled[i].first;
      sector.basis = CMatrix::Zero(n, Eigen::Index(j - i));
      for (std::size_t m = i; m < j; ++m)
      {
        sector.basis(labelled[m].second, Eigen::Index(m - i)) = 1.0;
      }
      sectors.push_back(std::move(sector));
      i = j;
    }
    return sectors;
  }

  for (std::size_t i = 0; i < ops.size(); ++i)
  {
    for (std::size_t j = i + 1; j < ops.size(); ++j)
    {
      const double res = commutator(ops[i], ops[j]).norm();
      if (res > tol.threshold(ops[i].norm() * ops[j].norm()))
      {
        std::ostringstream msg;
        msg << "simultaneous_eigenspaces: operators " << i << " and " << j << " do not commute (residual "
            << res << ")";
        throw ValidationError(msg.str());
      }
    }
  }

  sectors.push_back({{}, CMatrix::Identity(n, n)});
  for (const CMatrix &op : ops)
  {
    std::vector<JointEigenspace> refined;
    for (const JointEigenspace &block : sectors)
    {
      CMatrix restricted = block.basis.adjoint() * op * block.basis;
      restricted = 0.5 * (restricted + restricted.adjoint());
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(restricted);
      const RVector &w = solver.eigenvalues();
      const CMatrix &v = solver.eigenvectors();
      Eigen::Index start = 0;
      while (start < w.size())
      {
        Eigen::Index stop = start + 1;
        while (stop < w.size() && w(stop) - w(stop - 1) <= 1e-8 * std::max(1.0, std::abs(w(stop))))
        {
          ++stop;
        }
        JointEigenspace child;
        child.values = block.values;
        child.values.push_back(round_label(w.segment(start, stop - start).mean()));
        child.basis = block.basis * v.middleCols(start, stop - start);
        refined.push_back(std::move(child));
        start = stop;
      }
    }
    sectors = std::move(refined);
  }
  std::stable_sort(sectors.begin(), sectors.end(),
                   [](const JointEigenspace &a, const JointEigenspace &b) { return a.values < b.values; });
  return sectors;
}

} // namespace ncharge
