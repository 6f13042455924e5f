#include "doctest.h"
#include "support.hpp"

#include "ncharge/hamiltonian.hpp"

using namespace ncharge;
using namespace fixtures;

namespace
{

CMatrix heisenberg2() { return kron2(sx(), sx()) + kron2(sy(), sy()) + kron2(sz(), sz()); }

CMatrix gellmann2()
{
  CMatrix h = CMatrix::Zero(9, 9);
  for (int k = 1; k <= 8; ++k)
    h += kron2(lambda(k), lambda(k));
  return h;
}

RVector vec3(double a, double b, double c)
{
  RVector v(3);
  v << a, b, c;
  return v;
}

/// Projector onto the span of the given vectors.
RMatrix projector(const std::vector<RVector> &basis)
{
  RMatrix p = RMatrix::Zero(basis[0].size(), basis[0].size());
  for (const RVector &v : basis)
    p += v * v.transpose();
  return p;
}

/// Dense two-site transport residual ||[h, Q (x) I]||_F.
double transport(const CMatrix &h, const CMatrix &q)
{
  const CMatrix e = kron2(q, id(q.rows()));
  return (h * e - e * h).norm();
}

} // namespace

TEST_CASE("two-body term for su(2)")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const ParametricTerm t = two_body_unconstrained(pb);
  CHECK(t.n_couplings() == 3);
  CHECK((t.evaluate(vec3(1, 1, 1)) - heisenberg2()).norm() < 1e-13);
  // Ladder exchange along z alone is the XY coupling.
  CHECK((t.evaluate(vec3(1, 0, 0)) - 0.5 * (kron2(sx(), sx()) + kron2(sy(), sy()))).norm() < 1e-13);
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial)
    CHECK(is_hermitian(t.evaluate(vec3(g(rng), g(rng), g(rng)))));
  CHECK_THROWS(t.evaluate(RVector::Ones(2)));
  CHECK_THROWS(two_body_unconstrained(pb, {1, 1}));
}

TEST_CASE("solve_couplings for su(2) gives the Heisenberg model")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const CouplingSolution sol = solve_couplings(pb);
  REQUIRE(sol.nullspace_dim() == 1);
  CHECK((sol.chosen - vec3(1, 1, 1)).norm() < 1e-12);
  const CMatrix h = two_body_unconstrained(pb).evaluate(sol.chosen);
  CHECK(scalar_fit_residual(h, heisenberg2()) < 1e-12);
  CHECK(conservation_residual(h, pb.charges_flat, 2, 2) < 1e-12);

  // Generic closed-form parameters lead to the same model.
  const PreferredBasis gen = su2_closed_form(0.3, 1.1, -0.4, 2);
  const CouplingSolution gsol = solve_couplings(gen);
  CHECK(gsol.nullspace_dim() == 1);
  CHECK(scalar_fit_residual(two_body_unconstrained(gen).evaluate(gsol.chosen), heisenberg2()) < 1e-10);
}

TEST_CASE("every su(3) solution tuple collapses to sum lambda (x) lambda")
{
  for (const Su3Solution &s : su3_solution_families())
  {
    const PreferredBasis pb = su3_closed_form(s);
    const CouplingSolution sol = solve_couplings(pb);
    REQUIRE(sol.nullspace_dim() == 1);
    CHECK((sol.chosen - RVector::Ones(12)).norm() < 1e-9);
    const CMatrix h = two_body_unconstrained(pb).evaluate(sol.chosen);
    Complex scale;
    CHECK(scalar_fit_residual(h, gellmann2(), &scale) < 1e-8);
    // With unit-HS ladders, J = 1 gives 3/2 sum lambda (x) lambda.
    CHECK(std::abs(scale - 1.5) < 1e-9);
  }
}

TEST_CASE("nullspace vectors conserve the charges and survive charge rescaling")
{
  const PreferredBasis pb = build_preferred_basis(gellmann_basis(3), {lambda(3), lambda(8)}, 0);
  const CouplingSolution sol = solve_couplings(pb);
  for (const RVector &v : sol.nullspace_basis)
  {
    const CMatrix h = two_body_unconstrained(pb).evaluate(v);
    CHECK(conservation_residual(h, pb.charges_flat, 2, 3) <= 1e-8);
  }
  PreferredBasis scaled = pb;
  for (CMatrix &q : scaled.charges_flat)
    q *= 3.5;
  const CouplingSolution ssol = solve_couplings(scaled);
  CHECK((projector(sol.nullspace_basis) - projector(ssol.nullspace_basis)).norm() < 1e-9);
}

TEST_CASE("solve_couplings reports a defective preferred basis")
{
  PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  // Charges that no exchange Hamiltonian built from these ladders can conserve.
  pb.charges_flat = {sz(), sx() + 0.3 * sz(), sy()};
  pb.ladders_flat.resize(1);
  CHECK_THROWS_AS(solve_couplings(pb), ConstructionError);
}

TEST_CASE("canonical_coupling")
{
  CHECK((canonical_coupling({vec3(-1, -1, -1) / std::sqrt(3.0)}) - vec3(1, 1, 1)).norm() < 1e-14);
  // Mixed signs: first basis vector scaled so its largest entry is 1.
  const RVector v = vec3(0.2, -0.8, 0.1);
  CHECK((canonical_coupling({v}) - v / -0.8).norm() < 1e-14);
  // Two-dimensional space containing (1,1,1).
  const RVector a = vec3(1, 0, 1) / std::sqrt(2.0);
  const RVector b = vec3(0, 1, 0);
  CHECK((canonical_coupling({a, b}) - vec3(1, 1, 1)).norm() < 1e-14);
}

TEST_CASE("three-body su(2) families")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const std::vector<ParametricTerm> cycle{two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {2, 3}),
                                          two_body_unconstrained(pb, {3, 1})};
  const auto families = su2_three_body_families(0.37);
  REQUIRE(families.size() == 4);
  const CMatrix chi = scalar_chirality();
  for (std::size_t f = 0; f < families.size(); ++f)
  {
    CAPTURE(f);
    const KBodyResult res = k_body(pb, cycle, families[f]);
    CHECK(res.product_conservation <= 1e-10);
    REQUIRE(res.monomial_solution);
    // The family's coupling products lie in the nullspace of the linearized system.
    RVector mono(27);
    for (int m = 0; m < 27; ++m)
      mono(m) = families[f][0](m / 9) * families[f][1]((m / 3) % 3) * families[f][2](m % 3);
    const RMatrix p = projector(res.monomial_solution->nullspace_basis);
    CHECK((p * mono - mono).norm() <= 1e-10 * mono.norm());
    // Remainder is orthogonal to the whole subtraction set.
    for (const CMatrix &s : res.subtraction_set)
      CHECK(std::abs(hs_inner(s, res.remainder)) <= 1e-10 * std::max(1.0, res.product.matrix.norm()) * s.norm());
    if (f == 1)
      CHECK(res.remainder.norm() == 0.0);
    else
    {
      Complex scale;
      CHECK(scalar_fit_residual(res.remainder, chi, &scale) <= 1e-10);
      CHECK(std::abs(scale.imag()) <= 1e-10 * std::abs(scale));
      CHECK(is_hermitian(res.term.matrix));
      CHECK(scalar_fit_residual(res.term.matrix, chi) <= 1e-10);
    }
  }
  // Family 1 leaves exactly 0.91 i chi for the product of J = 0.91... couplings scaled to 1.
  const KBodyResult one = k_body(pb, cycle, families[0]);
  Complex s1;
  scalar_fit_residual(one.remainder, chi, &s1);
  CHECK(std::abs(s1) > 0.1);

  // A generic coupling choice does not conserve the charges.
  const KBodyResult bad = k_body(pb, cycle, {vec3(1, 0.2, 0.7), vec3(0.3, 1, -0.4), vec3(1, 1, 0.1)});
  CHECK(bad.product_conservation > 1e-3);
}

TEST_CASE("three-body families hold for generic su(2) closed-form parameters")
{
  const PreferredBasis pb = su2_closed_form(0.3, 0.4, -0.8, 0);
  const std::vector<ParametricTerm> cycle{two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {2, 3}),
                                          two_body_unconstrained(pb, {3, 1})};
  for (const auto &fam : su2_three_body_families(-1.7))
    CHECK(k_body(pb, cycle, fam).product_conservation <= 1e-10);
}

TEST_CASE("cyclic relabeling reproduces the three-body Hamiltonian")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const auto fam = su2_three_body_families(0.5)[0];
  const KBodyResult a = k_body(pb,
                               {two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {2, 3}),
                                two_body_unconstrained(pb, {3, 1})},
                               fam);
  const KBodyResult b = k_body(pb,
                               {two_body_unconstrained(pb, {2, 3}), two_body_unconstrained(pb, {3, 1}),
                                two_body_unconstrained(pb, {1, 2})},
                               fam);
  // b lives on the register ordered (2, 3, 1); move it back to (1, 2, 3).
  CMatrix back = CMatrix::Zero(8, 8);
  add_embedded(b.term.matrix, {2, 3, 1}, 3, 2, 1.0, back);
  CHECK((back - a.term.matrix).norm() < 1e-12);
  // The raw products differ by a cyclic reordering of factors, so only their traces agree.
  CHECK(std::abs(b.product.matrix.trace() - a.product.matrix.trace()) < 1e-12);
}

TEST_CASE("k_body input validation")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const RVector j = RVector::Ones(3);
  CHECK_THROWS(k_body(pb, {two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {2, 1})}, {j, j}));
  CHECK_THROWS(k_body(pb,
                      {two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {3, 4}),
                       two_body_unconstrained(pb, {4, 1})},
                      {j, j, j}));
  CHECK_THROWS(k_body(pb,
                      {two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {2, 3}),
                       two_body_unconstrained(pb, {3, 1})},
                      {j, j}));
}

TEST_CASE("four-body su(2) product after subtraction")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const RVector j = RVector::Ones(3);
  const KBodyResult res = k_body(pb,
                                 {two_body_unconstrained(pb, {1, 2}), two_body_unconstrained(pb, {2, 3}),
                                  two_body_unconstrained(pb, {3, 4}), two_body_unconstrained(pb, {4, 1})},
                                 {j, j, j, j});
  CHECK(res.product_conservation < 1e-10);
  CHECK(res.subtraction_set.size() == 1 + 6 + 4);
  for (const CMatrix &s : res.subtraction_set)
    CHECK(std::abs(hs_inner(s, res.remainder)) <= 1e-9 * res.product.matrix.norm() * s.norm());
  CHECK(res.remainder.norm() > 1e-3);
  CHECK(is_hermitian(res.term.matrix));
  CHECK(conservation_residual(res.term.matrix, pb.charges_flat, 4, 2) < 1e-10);
  // 81 monomials, within the bound; the all-ones product vector solves the linearized system.
  REQUIRE(res.monomial_solution);
  const RVector ones = RVector::Ones(81);
  const RMatrix p = projector(res.monomial_solution->nullspace_basis);
  CHECK((p * ones - ones).norm() < 1e-9 * ones.norm());
}

TEST_CASE("chain_lattice and validation")
{
  const LatticeSpec obc = chain_lattice(4, false);
  CHECK(obc.edges.size() == 3);
  const LatticeSpec pbc = chain_lattice(6, true, 1.0, 0.5);
  CHECK(pbc.edges.size() == 12);
  CHECK(chain_lattice(2, true).edges.size() == 1);
  LatticeSpec bad = obc;
  bad.edges.push_back({2, 2, 1.0});
  CHECK_THROWS(validate_lattice(bad));
  bad = obc;
  bad.edges.push_back({1, 5, 1.0});
  CHECK_THROWS(validate_lattice(bad));
}

TEST_CASE("assemble_global")
{
  const PreferredBasis pb = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const CouplingSolution sol = solve_couplings(pb);

  const GlobalHamiltonian two = assemble_global(chain_lattice(2, false, 0.7), pb, sol);
  const RVector ev = eigvals_hermitian(two.matrix);
  CHECK(ev(0) == doctest::Approx(-3 * 0.7));
  for (int k = 1; k < 4; ++k)
    CHECK(ev(k) == doctest::Approx(0.7));

  // Arbitrary topology still conserves every total spin component.
  LatticeSpec star;
  star.n_sites = 5;
  star.edges = {{1, 2, 1.0}, {1, 3, -0.4}, {1, 4, 2.0}, {4, 5, 0.3}, {2, 5, 1.1}};
  const GlobalHamiltonian g = assemble_global(star, pb, sol);
  for (const CMatrix &s : {sx(), sy(), sz()})
    CHECK(commutator(g.matrix, total_operator(s, 5, 2)).norm() <= 1e-10 * g.matrix.norm());

  LatticeSpec empty;
  empty.n_sites = 3;
  CHECK(assemble_global(empty, pb, sol).matrix.norm() == 0.0);

  CHECK_THROWS_AS(assemble_global(chain_lattice(14, false), pb, sol), ResourceError);
  AssemblyOptions small;
  small.dimension_cap = 16;
  CHECK_THROWS_AS(assemble_global(chain_lattice(5, false), pb, sol, small), ResourceError);

  // A three-body term that breaks the symmetry is caught.
  LatticeSpec grouped = chain_lattice(3, false);
  grouped.k_body_groups.push_back({{1, 2, 3}, 1.0});
  AssemblyOptions with_bad;
  with_bad.k_body_terms.push_back({{1, 2, 3}, kron3(sz(), sz(), sz()), {}});
  CHECK_THROWS_AS(assemble_global(grouped, pb, sol, with_bad), ConstructionError);
  AssemblyOptions with_chi;
  with_chi.k_body_terms.push_back({{1, 2, 3}, scalar_chirality(), {}});
  CHECK_THROWS_AS(assemble_global(grouped, pb, sol, with_chi), ConstructionError); // anti-Hermitian
  with_chi.k_body_terms[0].matrix *= -imag_unit();
  CHECK_NOTHROW(assemble_global(grouped, pb, sol, with_chi));
  CHECK_THROWS_AS(assemble_global(grouped, pb, sol), ConstructionError);
}

TEST_CASE("simple_form")
{
  const PreferredBasis p2 = build_preferred_basis(pauli_basis(), {sz()}, 0);
  CHECK((simple_form(p2).matrix - heisenberg2()).norm() < 1e-13);
  const PreferredBasis p3 = build_preferred_basis(gellmann_basis(3), {lambda(3), lambda(8)}, 0);
  CHECK(scalar_fit_residual(simple_form(p3).matrix, gellmann2()) < 1e-10);
  CHECK(conservation_residual(simple_form(p3).matrix, p3.charges_flat, 2, 3) < 1e-10);

  for (std::size_t d : {2u, 3u, 4u})
  {
    const LieBasis b = normalized(gellmann_basis(d));
    REQUIRE(check_antisymmetry(structure_constants(b)).pass);
    CHECK(conservation_residual(simple_form(b.generators).matrix, b.generators, 2, d) <= 1e-9);
  }
}

TEST_CASE("solved two-body Hamiltonians equal the simple form up to scale and transport every charge")
{
  const PreferredBasis p2 = build_preferred_basis(pauli_basis(), {sz()}, 0);
  const PreferredBasis p3 = build_preferred_basis(gellmann_basis(3), {lambda(3), lambda(8)}, 0);
  for (const PreferredBasis *pb : {&p2, &p3})
  {
    const CMatrix h = two_body_unconstrained(*pb).evaluate(solve_couplings(*pb).chosen);
    CHECK(scalar_fit_residual(h, simple_form(*pb).matrix) < 1e-8);
    for (const CMatrix &q : pb->charges_flat)
      CHECK(transport(h, q) > 0.01 * h.norm());
  }
}
