#include "doctest.h"
#include "support.hpp"

#include "ncharge/lie_algebra.hpp"

using namespace ncharge;
using namespace fixtures;

namespace
{

double levi_civita(int a, int b, int c)
{
  return double((a - b) * (b - c) * (c - a)) / 2.0;
}

/// Killing form straight from the definition with a hand-built adjoint in an orthogonal basis.
Complex killing_bruteforce(const CMatrix &x, const CMatrix &y, const std::vector<CMatrix> &gens)
{
  const std::size_t c = gens.size();
  CMatrix adx(as_index(c), as_index(c)), ady(as_index(c), as_index(c));
  for (std::size_t b = 0; b < c; ++b)
  {
    const CMatrix cx = x * gens[b] - gens[b] * x;
    const CMatrix cy = y * gens[b] - gens[b] * y;
    for (std::size_t a = 0; a < c; ++a)
    {
      const Complex n = (gens[a].adjoint() * gens[a]).trace();
      adx(as_index(a), as_index(b)) = (gens[a].adjoint() * cx).trace() / n;
      ady(as_index(a), as_index(b)) = (gens[a].adjoint() * cy).trace() / n;
    }
  }
  return (adx * ady).trace();
}

} // namespace

TEST_CASE("pauli_basis")
{
  const LieBasis p = pauli_basis();
  CHECK(p.dimension() == 3);
  CHECK(p.rank == 1);
  CHECK(p.local_dim == 2);
  CHECK((p.generators[0] - sx()).norm() == 0.0);
  CHECK((p.generators[1] - sy()).norm() == 0.0);
  CHECK((p.generators[2] - sz()).norm() == 0.0);
  for (std::size_t a = 0; a < 3; ++a)
  {
    CHECK((p.generators[a] * p.generators[a] - id(2)).norm() == 0.0);
    for (std::size_t b = 0; b < 3; ++b)
      CHECK(hs_inner(p.generators[a], p.generators[b]) == Complex(a == b ? 2.0 : 0.0, 0.0));
  }
  CHECK_NOTHROW(validate_basis(p));
}

TEST_CASE("gellmann_basis")
{
  const LieBasis g3 = gellmann_basis(3);
  CHECK(g3.dimension() == 8);
  CHECK(g3.rank == 2);
  for (int k = 1; k <= 8; ++k)
    CHECK((g3.generators[std::size_t(k - 1)] - lambda(k)).norm() < 1e-15);

  // D = 2 spans the Pauli matrices: sx, sy, sz in this ordering.
  const LieBasis g2 = gellmann_basis(2);
  CHECK((g2.generators[0] - sx()).norm() == 0.0);
  CHECK((g2.generators[1] - sy()).norm() == 0.0);
  CHECK((g2.generators[2] - sz()).norm() < 1e-15);

  for (std::size_t d : {4u, 5u})
  {
    const LieBasis g = gellmann_basis(d);
    CHECK(g.dimension() == d * d - 1);
    CHECK(g.rank == d - 1);
    for (std::size_t a = 0; a < g.dimension(); ++a)
    {
      CHECK(std::abs(g.generators[a].trace()) < 1e-14);
      CHECK(is_hermitian(g.generators[a]));
      for (std::size_t b = 0; b < g.dimension(); ++b)
      {
        const Complex tr = (g.generators[a] * g.generators[b]).trace();
        CHECK(std::abs(tr - (a == b ? 2.0 : 0.0)) < 1e-14);
      }
    }
  }
  CHECK_THROWS(gellmann_basis(1));
}

TEST_CASE("algebra_by_name")
{
  CHECK(algebra_by_name("su(2)").dimension() == 3);
  CHECK(algebra_by_name("SU3").dimension() == 8);
  CHECK(algebra_by_name("su(4)").dimension() == 15);
  CHECK_THROWS(algebra_by_name("so(5)"));
  CHECK_THROWS(algebra_by_name("su(x)"));
}

TEST_CASE("validate_basis rejects defective inputs")
{
  LieBasis b = pauli_basis();
  b.generators.push_back(sx() + sy());
  CHECK_THROWS_AS(validate_basis(b), DependencyError);
  LieBasis nh = pauli_basis();
  nh.generators[0] = sx() + I * sz();
  CHECK_THROWS_AS(validate_basis(nh), ValidationError);
  LieBasis tr = pauli_basis();
  tr.generators[0] = sx() + id(2);
  CHECK_THROWS_AS(validate_basis(tr), ValidationError);
}

TEST_CASE("structure constants of su(2) and su(3)")
{
  const StructureConstants f = structure_constants(pauli_basis());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(f(std::size_t(c), std::size_t(a), std::size_t(b)) - 2.0 * I * levi_civita(a, b, c)) < 1e-14);
  CHECK(structure_constant_residual(pauli_basis(), f) < 1e-10);

  const LieBasis g3 = gellmann_basis(3);
  const StructureConstants f3 = structure_constants(g3);
  CHECK(std::abs(f3(2, 0, 1) - 2.0 * I) < 1e-14);
  CHECK(structure_constant_residual(g3, f3) < 1e-10);
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t g = 0; g < 8; ++g)
    {
      CHECK(std::abs(f3(g, a, a)) == 0.0);
      for (std::size_t b = 0; b < 8; ++b)
        CHECK(std::abs(f3(g, a, b) + f3(g, b, a)) < 1e-14);
    }
}

TEST_CASE("structure constants on a non-orthogonal basis")
{
  LieBasis skew = pauli_basis();
  skew.generators[1] = sx() + 2.0 * sy();
  skew.generators[2] = sx() - sy() + 0.5 * sz();
  const StructureConstants f = structure_constants(skew);
  CHECK(!f.basis_normalized);
  CHECK(structure_constant_residual(skew, f) < 1e-10);
  CHECK_THROWS_AS(check_antisymmetry(f), PreconditionError);

  LieBasis dep = pauli_basis();
  dep.generators[2] = sx();
  CHECK_THROWS_AS(structure_constants(dep), DependencyError);
}

TEST_CASE("check_antisymmetry on normalized bases")
{
  for (std::size_t d : {2u, 3u, 4u})
  {
    const StructureConstants f = structure_constants(normalized(algebra_by_name("su(" + std::to_string(d) + ")")));
    REQUIRE(f.basis_normalized);
    const AntisymmetryReport rep = check_antisymmetry(f);
    CHECK(rep.pass);
    CHECK(rep.max_violation < 1e-12);
  }
  StructureConstants f = structure_constants(normalized(pauli_basis()));
  f(0, 1, 2) += 0.1;
  const AntisymmetryReport bad = check_antisymmetry(f);
  CHECK(!bad.pass);
  CHECK(bad.max_violation == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("killing_form")
{
  const LieBasis p = pauli_basis();
  CHECK(std::abs(killing_form(sz(), sx(), p)) < 1e-14);
  CHECK(std::abs(killing_form(sz(), sz(), p) - 8.0) < 1e-12);
  CHECK_THROWS_AS(killing_form(id(2), sx(), p), SpanError);

  // Frame on a skewed basis yields the same basis-independent value.
  LieBasis skew = p;
  skew.generators[0] = sx() + sy();
  CHECK(std::abs(killing_form(sz(), sz(), skew) - 8.0) < 1e-12);
  const AlgebraFrame frame(skew);
  CHECK(std::abs(frame.killing(sz(), sz()) - 8.0) < 1e-12);
}

TEST_CASE("Killing form is a fixed multiple of the trace form on su(D)")
{
  std::mt19937_64 rng(21);
  for (std::size_t d : {2u, 3u, 4u})
  {
    const LieBasis b = gellmann_basis(d);
    const AlgebraFrame frame(b);
    std::vector<double> ratios;
    for (int trial = 0; trial < 20; ++trial)
    {
      const CMatrix x = random_element(b.generators, rng);
      const CMatrix y = random_element(b.generators, rng);
      const Complex k = frame.killing(x, y);
      CHECK(std::abs(k - killing_bruteforce(x, y, b.generators)) < 1e-9 * std::max(1.0, std::abs(k)));
      ratios.push_back((k / hs_inner(x, y)).real());
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK((*hi - *lo) / std::abs(*lo) < 1e-8);
    CHECK(*lo == doctest::Approx(2.0 * double(d)));
  }
}

TEST_CASE("Killing form is symmetric and bilinear")
{
  std::mt19937_64 rng(22);
  const LieBasis b = gellmann_basis(3);
  const AlgebraFrame frame(b);
  for (int trial = 0; trial < 10; ++trial)
  {
    const CMatrix x = random_element(b.generators, rng);
    const CMatrix y = random_element(b.generators, rng);
    const CMatrix z = random_element(b.generators, rng);
    const double s = 0.7 + trial;
    CHECK(std::abs(frame.killing(x, y) - frame.killing(y, x)) < 1e-10 * std::abs(frame.killing(x, y)));
    const Complex lhs = frame.killing(s * x + z, y);
    const Complex rhs = s * frame.killing(x, y) + frame.killing(z, y);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("Jacobi identity on constructed bases")
{
  std::mt19937_64 rng(23);
  for (std::size_t d : {2u, 3u, 4u})
  {
    const LieBasis b = gellmann_basis(d);
    for (int trial = 0; trial < 10; ++trial)
    {
      const CMatrix x = random_element(b.generators, rng);
      const CMatrix y = random_element(b.generators, rng);
      const CMatrix z = random_element(b.generators, rng);
      const CMatrix j = commutator(x, commutator(y, z)) + commutator(y, commutator(z, x)) +
                        commutator(z, commutator(x, y));
      CHECK(j.norm() <= 1e-9 * x.norm() * y.norm() * z.norm());
    }
  }
}

TEST_CASE("AlgebraFrame expansion and span checks")
{
  std::mt19937_64 rng(24);
  const LieBasis b = gellmann_basis(3);
  const AlgebraFrame frame(b);
  const CMatrix x = random_element(b.generators, rng);
  CHECK((frame.expand(frame.coordinates_in_span(x)) - x).norm() < 1e-12);
  CHECK(frame.span_residual(x) < 1e-12);
  CHECK(frame.span_residual(id(3)) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(frame.coordinates_in_span(id(3)), SpanError);
  for (const CMatrix &o : frame.orthonormal_generators())
    CHECK(is_hermitian(o));
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t c = 0; c < 8; ++c)
      CHECK(std::abs(hs_inner(frame.orthonormal_generators()[a], frame.orthonormal_generators()[c]) -
                     (a == c ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("registry_table")
{
  const auto table = registry_table();
  CHECK(table.size() == 10 + 12 * 3 + 5);
  const auto find = [&](const std::string &label) {
    for (const auto &e : table)
      if (e.label() == label)
        return e;
    FAIL("missing registry row " << label);
    return table.front();
  };
  const auto sl3 = find("sl(3)");
  CHECK(sl3.dimension == 8);
  CHECK(sl3.rank == 2);
  CHECK(sl3.ratio() == 4);
  const auto so7 = find("so(7)");
  CHECK(so7.dimension == 21);
  CHECK(so7.ratio() == 7);
  const auto e8 = find("e8");
  CHECK(e8.dimension == 248);
  CHECK(e8.ratio() == 31);
  CHECK(find("e7").ratio() == 19);
  CHECK(find("sp(4)").dimension == 10);
  CHECK(find("sp(4)").ratio() == 5);
  CHECK(find("g2").ratio() == 7);
  for (const auto &e : table)
  {
    CHECK(e.dimension % e.rank == 0);
    if (e.n)
    {
      const long n = *e.n;
      if (e.family == "so(2n)")
        CHECK(e.dimension == n * (2 * n - 1));
      if (e.family == "sl(n+1)")
        CHECK(e.dimension == (n + 1) * (n + 1) - 1);
      if (e.family == "so(2n+1)" || e.family == "sp(2n)")
        CHECK(e.dimension == n * (2 * n + 1));
      CHECK(e.rank == n);
    }
  }
}
