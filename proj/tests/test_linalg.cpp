#include "doctest.h"
#include "support.hpp"

#include "ncharge/linalg.hpp"

#include <numeric>

using namespace ncharge;
using namespace fixtures;

TEST_CASE("commutator of Pauli matrices")
{
  CHECK((commutator(sx(), sy()) - 2.0 * I * sz()).norm() < 1e-15);
  std::mt19937_64 rng(1);
  const CMatrix a = random_complex(4, 4, rng);
  CHECK(commutator(id(4), a).norm() == 0.0);
  CHECK((commutator(lambda(3), lambda(1)) - 2.0 * I * lambda(2)).norm() < 1e-15);
  CHECK_THROWS_AS(commutator(sx(), lambda(1)), ShapeError);
}

TEST_CASE("commutator is exactly antisymmetric")
{
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial)
  {
    const Eigen::Index n = 1 + trial % 6;
    const CMatrix a = random_complex(n, n, rng);
    const CMatrix b = random_complex(n, n, rng);
    const CMatrix ab = commutator(a, b);
    const CMatrix ba = commutator(b, a);
    CHECK(ab == CMatrix(-ba));
  }
}

TEST_CASE("kron_embed places the operator at the requested site")
{
  CHECK((kron_embed(sz(), 1, 2, 2) - kron2(sz(), id(2))).norm() == 0.0);
  CHECK((kron_embed(id(3), 2, 3, 3) - id(27)).norm() == 0.0);
  const CMatrix e = kron_embed(sx(), 2, 3, 2);
  CHECK(std::abs(e.trace()) < 1e-15);
  CHECK(e.norm() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK((e - kron3(id(2), sx(), id(2))).norm() == 0.0);
  CHECK_THROWS(kron_embed(sx(), 0, 3, 2));
  CHECK_THROWS(kron_embed(sx(), 4, 3, 2));
  CHECK_THROWS(kron_embed(sx(), 1, 3, 3));
}

TEST_CASE("kron_embed preserves Hermiticity and tracelessness")
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial)
  {
    CMatrix h = random_hermitian(3, rng);
    h -= (h.trace() / 3.0) * id(3);
    const std::size_t site = 1 + std::size_t(trial % 3);
    const CMatrix e = kron_embed(h, site, 3, 3);
    CHECK(is_hermitian(e));
    CHECK(std::abs(e.trace()) < 1e-10 * e.norm());
  }
}

TEST_CASE("embedded application matches dense embedding")
{
  std::mt19937_64 rng(4);
  const CMatrix op2 = random_complex(9, 9, rng);
  const CMatrix x = random_complex(81, 3, rng);
  // op on sites (3, 1) of a four-qutrit register: build densely by permuting factors.
  CMatrix dense = CMatrix::Zero(81, 81);
  add_embedded(op2, {3, 1}, 4, 3, 1.0, dense);
  CMatrix perm_dense = CMatrix::Zero(81, 81);
  for (int i = 0; i < 81; ++i)
  {
    int d[4] = {i / 27, (i / 9) % 3, (i / 3) % 3, i % 3};
    for (int j = 0; j < 81; ++j)
    {
      int e[4] = {j / 27, (j / 9) % 3, (j / 3) % 3, j % 3};
      if (d[1] != e[1] || d[3] != e[3])
        continue;
      perm_dense(i, j) = op2(d[2] * 3 + d[0], e[2] * 3 + e[0]);
    }
  }
  CHECK((dense - perm_dense).norm() < 1e-12);
  CHECK((apply_embedded(op2, {3, 1}, 4, 3, x) - perm_dense * x).norm() < 1e-10);

  const CMatrix h = random_hermitian(3, rng);
  CHECK((apply_total(h, 4, 3, x) - total_operator(h, 4, 3) * x).norm() < 1e-10);
}

TEST_CASE("site permutation is a relabeling of tensor factors")
{
  // Cyclic shift 1->2->3->1 maps sz on site 1 to sz on site 2.
  const std::vector<std::size_t> shift{2, 3, 1};
  const CMatrix x = kron_embed(sz(), 1, 3, 2);
  const CMatrix p = apply_site_permutation(shift, 2, CMatrix::Identity(8, 8));
  CHECK((p * x * p.adjoint() - kron_embed(sz(), 2, 3, 2)).norm() < 1e-14);
}

TEST_CASE("total_commutator_norm agrees with a dense commutator")
{
  std::mt19937_64 rng(5);
  const CMatrix h = random_hermitian(27, rng);
  const CMatrix q = random_hermitian(3, rng);
  const double dense = commutator(h, total_operator(q, 3, 3)).norm();
  CHECK(total_commutator_norm(h, q, 3, 3) == doctest::Approx(dense).epsilon(1e-12));
  const CMatrix g = random_complex(27, 27, rng);
  const double dense_g = commutator(g, total_operator(q, 3, 3)).norm();
  CHECK(total_commutator_norm(g, q, 3, 3) == doctest::Approx(dense_g).epsilon(1e-12));
}

TEST_CASE("hs_inner")
{
  CHECK(hs_inner(sz(), sz()) == Complex(2.0, 0.0));
  CHECK(std::abs(hs_inner(sz(), sx())) == 0.0);
  CHECK(std::abs(hs_inner(lambda(3), lambda(8))) < 1e-15);
  CHECK_THROWS_AS(hs_inner(sz(), lambda(3)), ShapeError);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial)
  {
    const CMatrix a = random_complex(4, 4, rng);
    const CMatrix b = random_complex(4, 4, rng);
    CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);
    CHECK(std::abs(hs_inner(a, b) - (a.adjoint() * b).trace()) < 1e-10);
  }
}

TEST_CASE("nullspace")
{
  CHECK(nullspace(CMatrix(CMatrix::Zero(2, 2))).size() == 2);
  CHECK(nullspace(CMatrix(id(3))).empty());
  RMatrix m(2, 3);
  m << 1, 2, 3, 2, 4, 6;
  const auto ns = nullspace(m);
  REQUIRE(ns.size() == 2);
  for (const auto &v : ns)
  {
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    CHECK((m * v).norm() < 1e-12);
  }
  CHECK(std::abs(ns[0].dot(ns[1])) < 1e-12);
}

TEST_CASE("nullspace vectors satisfy the residual bound on random rank-deficient matrices")
{
  std::mt19937_64 rng(7);
  const Tolerance tol;
  for (int trial = 0; trial < 20; ++trial)
  {
    const Eigen::Index rows = 3 + trial % 5;
    const Eigen::Index rank = 1 + trial % 3;
    const CMatrix m = random_complex(rows, rank, rng) * random_complex(rank, 6, rng);
    const auto ns = nullspace(m, tol);
    CHECK(ns.size() == std::size_t(6 - rank));
    const double sigma_max = Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
    for (const auto &v : ns)
      CHECK((m * v).norm() <= 10.0 * tol.threshold(sigma_max) * m.norm());
  }
}

TEST_CASE("nullspace rank cut is scale invariant")
{
  std::mt19937_64 rng(8);
  const CMatrix m = random_complex(4, 2, rng) * random_complex(2, 5, rng);
  CHECK(nullspace(m).size() == nullspace(CMatrix(1e6 * m)).size());
}

TEST_CASE("eig_hermitian")
{
  const EigenSystem a = eig_hermitian(sz());
  CHECK(a.values(0) == doctest::Approx(-1.0));
  CHECK(a.values(1) == doctest::Approx(1.0));
  const RVector l8 = eigvals_hermitian(lambda(8));
  CHECK(l8(0) == doctest::Approx(-2.0 / std::sqrt(3.0)));
  CHECK(l8(1) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(l8(2) == doctest::Approx(1.0 / std::sqrt(3.0)));
  const CMatrix heis = kron2(sx(), sx()) + kron2(sy(), sy()) + kron2(sz(), sz());
  const RVector h = eigvals_hermitian(heis);
  CHECK(h(0) == doctest::Approx(-3.0));
  for (int k = 1; k < 4; ++k)
    CHECK(h(k) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eig_hermitian(sz() + I * sx()), ValidationError);
}

TEST_CASE("eig_hermitian reconstruction and trace on random matrices")
{
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial)
  {
    const CMatrix h = random_hermitian(2 + trial, rng);
    const EigenSystem es = eig_hermitian(h);
    const CMatrix rec = es.vectors * es.values.cast<Complex>().asDiagonal() * es.vectors.adjoint();
    CHECK((h - rec).norm() <= 1e-9 * h.norm());
    CHECK(std::abs(es.values.sum() - h.trace().real()) <= 1e-9 * h.norm());
    CHECK(is_unitary(es.vectors));
    for (Eigen::Index k = 1; k < es.values.size(); ++k)
      CHECK(es.values(k - 1) <= es.values(k));
  }
}

TEST_CASE("expi_hermitian is unitary and matches a series expansion")
{
  std::mt19937_64 rng(10);
  const CMatrix a = 0.3 * random_hermitian(3, rng);
  CMatrix series = CMatrix::Identity(3, 3);
  CMatrix term = CMatrix::Identity(3, 3);
  for (int k = 1; k < 40; ++k)
  {
    term = term * (I * a) / double(k);
    series += term;
  }
  const CMatrix u = expi_hermitian(a);
  CHECK(is_unitary(u));
  CHECK((u - series).norm() < 1e-12);
}

TEST_CASE("simultaneous_eigenspaces")
{
  const auto one = simultaneous_eigenspaces({sz()});
  REQUIRE(one.size() == 2);
  CHECK(one[0].values[0] == -1.0);
  CHECK(one[1].values[0] == 1.0);

  const auto mag = simultaneous_eigenspaces({total_operator(sz(), 2, 2)});
  REQUIRE(mag.size() == 3);
  CHECK(mag[0].basis.cols() == 1);
  CHECK(mag[1].basis.cols() == 2);
  CHECK(mag[2].basis.cols() == 1);

  // Two qutrits: weights of 3 (x) 3 under (lambda_3, lambda_8) totals.
  const auto w = simultaneous_eigenspaces({total_operator(lambda(3), 2, 3), total_operator(lambda(8), 2, 3)});
  std::size_t total = 0;
  for (const auto &s : w)
    total += std::size_t(s.basis.cols());
  CHECK(total == 9);
  CHECK(w.size() == 6); // weights of 6 + 3bar: 6 distinct, three doubly degenerate

  CHECK_THROWS_AS(simultaneous_eigenspaces({sz(), sx()}), ValidationError);
}

TEST_CASE("simultaneous_eigenspaces on non-diagonal commuting operators gives a complete orthonormal set")
{
  const CMatrix heis = kron2(sx(), sx()) + kron2(sy(), sy()) + kron2(sz(), sz());
  const CMatrix xtot = kron2(sx(), id(2)) + kron2(id(2), sx());
  const auto sectors = simultaneous_eigenspaces({heis, xtot});
  CMatrix all(4, 0);
  for (const auto &s : sectors)
  {
    CMatrix next(4, all.cols() + s.basis.cols());
    next << all, s.basis;
    all = next;
    CHECK((heis * s.basis - s.values[0] * s.basis).norm() < 1e-10);
    CHECK((xtot * s.basis - s.values[1] * s.basis).norm() < 1e-10);
  }
  CHECK(all.cols() == 4);
  CHECK(is_unitary(all));
  try
  {
    simultaneous_eigenspaces({heis, xtot, total_operator(sz(), 2, 2)});
    FAIL("expected a commutation failure");
  }
  catch (const ValidationError &e)
  {
    CHECK(std::string(e.what()).find("operators 1 and 2") != std::string::npos);
  }
}

TEST_CASE("round_label resolves to eight decimals")
{
  CHECK(round_label(0.5 + 1e-10) == 0.5);
  CHECK(round_label(-1e-12) == 0.0);
  CHECK(!std::signbit(round_label(-1e-12)));
  CHECK(round_label(1.0 / 3.0) != round_label(1.0 / 3.0 + 2e-8));
}
