#include "ncharge/lie_algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace ncharge
{

namespace
{

constexpr double kSpanTol = 1e-8;

CMatrix unit_matrix(std::size_t d, std::size_t i, std::size_t j)
{
  CMatrix e = CMatrix::Zero(as_index(d), as_index(d));
  e(as_index(i), as_index(j)) = 1.0;
  return e;
}

} // namespace

void validate_basis(const LieBasis &basis)
{
  if (basis.generators.empty())
  {
    throw std::invalid_argument("basis '" + basis.name + "' has no generators");
  }
  for (std::size_t a = 0; a < basis.generators.size(); ++a)
  {
    const CMatrix &g = basis.generators[a];
    if (std::size_t(g.rows()) != basis.local_dim || std::size_t(g.cols()) != basis.local_dim)
    {
      throw ShapeError("generator " + std::to_string(a) + " does not match local dimension");
    }
    if (!is_hermitian(g))
    {
      throw ValidationError("generator " + std::to_string(a) + " is not Hermitian");
    }
    if (std::abs(g.trace()) > 1e-10 * std::max(1.0, g.norm()))
    {
      throw ValidationError("generator " + std::to_string(a) + " is not traceless");
    }
  }
  // Gram rank check via AlgebraFrame construction.
  AlgebraFrame frame(basis);
  (void)frame;
}

LieBasis pauli_basis()
{
  const Complex i = imag_unit();
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  return {"su(2)", 2, {sx, sy, sz}, 1};
}

LieBasis gellmann_basis(std::size_t d)
{
  if (d < 2)
  {
    throw std::invalid_argument("gellmann_basis: D must be at least 2");
  }
  const Complex i = imag_unit();
  std::vector<CMatrix> symmetric, antisymmetric, diagonal;
  for (std::size_t j = 0; j < d; ++j)
  {
    for (std::size_t k = j + 1; k < d; ++k)
    {
      symmetric.push_back(unit_matrix(d, j, k) + unit_matrix(d, k, j));
      antisymmetric.push_back(-i * unit_matrix(d, j, k) + i * unit_matrix(d, k, j));
    }
  }
  for (std::size_t l = 1; l < d; ++l)
  {
    CMatrix m = CMatrix::Zero(as_index(d), as_index(d));
    for (std::size_t j = 0; j < l; ++j)
    {
      m(as_index(j), as_index(j)) = 1.0;
    }
    m(as_index(l), as_index(l)) = -double(l);
    diagonal.push_back(std::sqrt(2.0 / double(l * (l + 1))) * m);
  }

  LieBasis basis;
  basis.name = "su(" + std::to_string(d) + ")";
  basis.local_dim = d;
  basis.rank = d - 1;
  if (d == 3)
  {
    // lambda_1 .. lambda_8
    basis.generators = {symmetric[0], antisymmetric[0], diagonal[0], symmetric[1],
                        antisymmetric[1], symmetric[2], antisymmetric[2], diagonal[1]};
  }
  else
  {
    basis.generators = symmetric;
    basis.generators.insert(basis.generators.end(), antisymmetric.begin(), antisymmetric.end());
    basis.generators.insert(basis.generators.end(), diagonal.begin(), diagonal.end());
  }
  return basis;
}

LieBasis normalized(const LieBasis &basis)
{
  LieBasis out = basis;
  for (CMatrix &g : out.generators)
  {
    g /= g.norm();
  }
  return out;
}

LieBasis algebra_by_name(const std::string &name)
{
  std::string key;
  for (char ch : name)
  {
    if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '(' && ch != ')')
    {
      key.push_back(char(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (key.rfind("su", 0) == 0 && key.size() > 2)
  {
    std::size_t pos = 0;
    int d = 0;
    try
    {
      d = std::stoi(key.substr(2), &pos);
    }
    catch (const std::exception &)
    {
      pos = 0;
    }
    if (pos == key.size() - 2 && d >= 2)
    {
      return d == 2 ? pauli_basis() : gellmann_basis(std::size_t(d));
    }
  }
  throw std::invalid_argument("unknown algebra '" + name + "' (supported: su(D), D >= 2)");
}

std::vector<CMatrix> diagonal_cartan(const LieBasis &basis)
{
  std::vector<CMatrix> out;
  for (const CMatrix &g : basis.generators)
  {
    const CMatrix off = g - CMatrix(g.diagonal().asDiagonal());
    if (off.norm() <= 1e-14)
    {
      out.push_back(g);
    }
  }
  if (out.size() != basis.rank)
  {
    throw std::invalid_argument("basis '" + basis.name + "' has no diagonal Cartan subalgebra of rank " +
                                std::to_string(basis.rank));
  }
  return out;
}

AlgebraFrame::AlgebraFrame(LieBasis basis) : m_basis(std::move(basis))
{
  const std::size_t c = m_basis.dimension();
  if (c == 0)
  {
    throw DependencyError("empty basis");
  }
  m_gram.resize(as_index(c), as_index(c));
  for (std::size_t a = 0; a < c; ++a)
  {
    for (std::size_t b = 0; b < c; ++b)
    {
      m_gram(as_index(a), as_index(b)) = hs_inner(m_basis.generators[a], m_basis.generators[b]);
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> gram_eig(m_gram);
  const RVector &w = gram_eig.eigenvalues();
  if (w(0) <= 1e-10 * std::max(1.0, w(w.size() - 1)))
  {
    throw DependencyError("basis '" + m_basis.name + "' is linearly dependent (Gram rank deficient)");
  }
  m_gram_llt.compute(m_gram);

  // Gram^{-1/2} gives an orthonormal set; for Hermitian generators the Gram is real and so is
  // the transform, which keeps the combinations Hermitian.
  const CMatrix inv_sqrt = gram_eig.eigenvectors() * w.cwiseSqrt().cwiseInverse().asDiagonal() *
                           gram_eig.eigenvectors().adjoint();
  for (std::size_t a = 0; a < c; ++a)
  {
    CMatrix o = CMatrix::Zero(m_basis.generators[0].rows(), m_basis.generators[0].cols());
    for (std::size_t b = 0; b < c; ++b)
    {
      o += inv_sqrt(as_index(b), as_index(a)) * m_basis.generators[b];
    }
    m_orthonormal.push_back(0.5 * (o + o.adjoint()));
  }

  std::vector<CMatrix> ads;
  ads.reserve(c);
  for (const CMatrix &g : m_basis.generators)
  {
    ads.push_back(adjoint(g));
  }
  m_killing.resize(as_index(c), as_index(c));
  for (std::size_t a = 0; a < c; ++a)
  {
    for (std::size_t b = 0; b < c; ++b)
    {
      m_killing(as_index(a), as_index(b)) = (ads[a] * ads[b]).trace();
    }
  }
}

CVector AlgebraFrame::coordinates(const CMatrix &x) const
{
  const std::size_t c = dimension();
  CVector rhs{as_index(c)};
  for (std::size_t a = 0; a < c; ++a)
  {
    rhs(as_index(a)) = hs_inner(m_basis.generators[a], x);
  }
  return m_gram_llt.solve(rhs);
}

CMatrix AlgebraFrame::expand(const CVector &coords) const
{
  CMatrix out = CMatrix::Zero(m_basis.generators[0].rows(), m_basis.generators[0].cols());
  for (std::size_t a = 0; a < dimension(); ++a)
  {
    out += coords(as_index(a)) * m_basis.generators[a];
  }
  return out;
}

double AlgebraFrame::span_residual(const CMatrix &x) const { return (x - expand(coordinates(x))).norm(); }

CVector AlgebraFrame::coordinates_in_span(const CMatrix &x) const
{
  CVector coords = coordinates(x);
  const double res = (x - expand(coords)).norm();
  if (res > kSpanTol * std::max(1.0, x.norm()))
  {
    std::ostringstream msg;
    msg << "element lies outside the span of '" << m_basis.name << "' (residual " << res << ")";
    throw SpanError(msg.str());
  }
  return coords;
}

CMatrix AlgebraFrame::adjoint(const CMatrix &x) const
{
  const std::size_t c = dimension();
  CMatrix ad{as_index(c), as_index(c)};
  for (std::size_t b = 0; b < c; ++b)
  {
    ad.col(as_index(b)) = coordinates(commutator(x, m_basis.generators[b]));
  }
  return ad;
}

Complex AlgebraFrame::killing(const CMatrix &x, const CMatrix &y) const
{
  const CVector cx = coordinates_in_span(x);
  const CVector cy = coordinates_in_span(y);
  return cx.transpose() * m_killing * cy;
}

StructureConstants structure_constants(const LieBasis &basis)
{
  const AlgebraFrame frame(basis);
  const std::size_t c = basis.dimension();
  StructureConstants f;
  f.dim = c;
  f.data.assign(c * c * c, Complex(0.0, 0.0));
  const CMatrix id = CMatrix::Identity(as_index(c), as_index(c));
  f.basis_normalized = (frame.gram() - id).cwiseAbs().maxCoeff() <= 1e-10;
  for (std::size_t alpha = 0; alpha < c; ++alpha)
  {
    for (std::size_t beta = 0; beta < c; ++beta)
    {
      const CVector coords = frame.coordinates(commutator(basis.generators[alpha], basis.generators[beta]));
      for (std::size_t gamma = 0; gamma < c; ++gamma)
      {
        f(gamma, alpha, beta) = coords(as_index(gamma));
      }
    }
  }
  return f;
}

double structure_constant_residual(const LieBasis &basis, const StructureConstants &f)
{
  double worst = 0.0;
  const std::size_t c = basis.dimension();
  for (std::size_t alpha = 0; alpha < c; ++alpha)
  {
    for (std::size_t beta = 0; beta < c; ++beta)
    {
      CMatrix r = commutator(basis.generators[alpha], basis.generators[beta]);
      for (std::size_t gamma = 0; gamma < c; ++gamma)
      {
        r -= f(gamma, alpha, beta) * basis.generators[gamma];
      }
      worst = std::max(worst, r.norm());
    }
  }
  return worst;
}

Complex killing_form(const CMatrix &x, const CMatrix &y, const LieBasis &basis)
{
  const AlgebraFrame frame(basis);
  const CMatrix adx = frame.adjoint(frame.expand(frame.coordinates_in_span(x)));
  const CMatrix ady = frame.adjoint(frame.expand(frame.coordinates_in_span(y)));
  return (adx * ady).trace();
}

AntisymmetryReport check_antisymmetry(const StructureConstants &f, double threshold)
{
  if (!f.basis_normalized)
  {
    throw PreconditionError("check_antisymmetry: structure constants must come from an HS-orthonormal basis");
  }
  AntisymmetryReport report;
  for (std::size_t gamma = 0; gamma < f.dim; ++gamma)
  {
    for (std::size_t alpha = 0; alpha < f.dim; ++alpha)
    {
      for (std::size_t beta = 0; beta < f.dim; ++beta)
      {
        report.max_violation = std::max(report.max_violation, std::abs(f(gamma, alpha, beta) + f(alpha, gamma, beta)));
      }
    }
  }
  report.pass = report.max_violation <= threshold;
  return report;
}

std::string AlgebraRegistryEntry::label() const
{
  if (!n)
  {
    return family;
  }
  const int v = *n;
  if (family == "so(2n)")
  {
    return "so(" + std::to_string(2 * v) + ")";
  }
  if (family == "sl(n+1)")
  {
    return "sl(" + std::to_string(v + 1) + ")";
  }
  if (family == "so(2n+1)")
  {
    return "so(" + std::to_string(2 * v + 1) + ")";
  }
  if (family == "sp(2n)")
  {
    return "sp(" + std::to_string(2 * v) + ")";
  }
  return family;
}

std::vector<AlgebraRegistryEntry> registry_table()
{
  std::vector<AlgebraRegistryEntry> table;
  // so(2) and so(4) are not simple.
  for (int n = 3; n <= 12; ++n)
  {
    table.push_back({"so(2n)", n, long(n) * (2 * n - 1), n});
  }
  for (int n = 1; n <= 12; ++n)
  {
    table.push_back({"sl(n+1)", n, long(n + 1) * (n + 1) - 1, n});
  }
  for (int n = 1; n <= 12; ++n)
  {
    table.push_back({"so(2n+1)", n, long(n) * (2 * n + 1), n});
  }
  for (int n = 1; n <= 12; ++n)
  {
    table.push_back({"sp(2n)", n, long(n) * (2 * n + 1), n});
  }
  table.push_back({"g2", std::nullopt, 14, 2});
  table.push_back({"f4", std::nullopt, 52, 4});
  table.push_back({"e6", std::nullopt, 78, 6});
  table.push_back({"e7", std::nullopt, 133, 7});
  table.push_back({"e8", std::nullopt, 248, 8});
  return table;
}

} // namespace ncharge
