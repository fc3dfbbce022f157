#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lck/catalog.hpp"
#include "lck/lie_algebra.hpp"
#include "oracles.hpp"

using namespace lck;

namespace {

Vec<Rat> basis_vec(int n, int i) {
  Vec<Rat> v(n, Rat(0));
  v[i] = Rat(1);
  return v;
}

// Basis (A, X, Y, Z): [A,X] = X, [A,Y] = -Y, [X,Y] = Z.
LieAlgebra<Rat> acfm_algebra() { return acfm_solvable<Rat>().algebra(); }

// Commutative associative test corpus, dim <= 4, with hand-known
// nilpotency: (algebra, nilpotent?, index when nilpotent).
struct CorpusEntry {
  const char* name;
  AssociativeAlgebra<Rat> alg;
  bool nilpotent;
  int index;  // meaningful only when nilpotent
};

// span{t, t^2, ..., t^m} inside R[t]/(t^{m+1}); nilpotent of index m+1.
AssociativeAlgebra<Rat> t_span(int m) {
  std::vector<std::tuple<int, int, int, Rat>> products;
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b)
      if (a + b <= m) products.emplace_back(a - 1, b - 1, a + b - 1, Rat(1));
  return AssociativeAlgebra<Rat>::from_products(m, products);
}

std::vector<CorpusEntry> commutative_corpus() {
  using E = std::tuple<int, int, int, Rat>;
  std::vector<CorpusEntry> out;
  auto null_algebra = [](int d) {
    return AssociativeAlgebra<Rat>::from_products(d, {});
  };
  out.push_back({"null1", null_algebra(1), true, 2});
  out.push_back({"null2", null_algebra(2), true, 2});
  out.push_back({"null3", null_algebra(3), true, 2});
  out.push_back({"null4", null_algebra(4), true, 2});
  // R with e^2 = e: the idempotent line.
  out.push_back({"R", AssociativeAlgebra<Rat>::from_products(
                          1, std::vector<E>{{0, 0, 0, Rat(1)}}),
                 false, 0});
  // R x R, componentwise products.
  out.push_back({"RxR", AssociativeAlgebra<Rat>::from_products(
                            2, std::vector<E>{{0, 0, 0, Rat(1)},
                                              {1, 1, 1, Rat(1)}}),
                 false, 0});
  // Truncated polynomial algebras with unit: R[t]/(t^m), basis 1, t, ...
  auto truncated_with_unit = [](int m) {
    std::vector<E> es;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a + b < m) es.push_back({a, b, a + b, Rat(1)});
    return AssociativeAlgebra<Rat>::from_products(m, es);
  };
  out.push_back({"R[t]/(t^2)", truncated_with_unit(2), false, 0});
  out.push_back({"R[t]/(t^3)", truncated_with_unit(3), false, 0});
  out.push_back({"R[t]/(t^4)", truncated_with_unit(4), false, 0});
  // Maximal ideals span{t, ..., t^m} of R[t]/(t^{m+1}): nilpotent, index m+1.
  out.push_back({"tR[t]/(t^3)", t_span(2), true, 3});
  out.push_back({"tR[t]/(t^4)", t_span(3), true, 4});
  // span{x, y, xy} in R[x,y]/(x^2, y^2): x*y = xy, everything else 0.
  out.push_back({"(x,y)/(x2,y2)",
                 AssociativeAlgebra<Rat>::from_products(
                     3, std::vector<E>{{0, 1, 2, Rat(1)}, {1, 0, 2, Rat(1)}}),
                 true, 3});
  // R plus a null line: idempotent in a 2-dim algebra.
  out.push_back({"R+null", AssociativeAlgebra<Rat>::from_products(
                               2, std::vector<E>{{0, 0, 0, Rat(1)}}),
                 false, 0});
  return out;
}

}  // namespace

TEST_CASE("bracket is bilinear, antisymmetric, and matches the tables") {
  auto h = heisenberg_family<Rat>(1, Rat(1));
  const auto& g = h.algebra();
  int n = g.dim();
  // basis order (X1, Y1, Z1, Z2)
  CHECK(g.bracket_basis(0, 1) == basis_vec(n, 2));
  CHECK(g.bracket_basis(1, 0) == vec_scale(Rat(-1), basis_vec(n, 2)));

  auto a = acfm_algebra();
  CHECK(a.bracket_basis(0, 1) == basis_vec(4, 1));   // [A,X] = X
  CHECK(a.bracket_basis(0, 2) == vec_scale(Rat(-1), basis_vec(4, 2)));
  CHECK(a.bracket_basis(1, 2) == basis_vec(4, 3));   // [X,Y] = Z

  oracle::TestRng rng(7);
  for (int t = 0; t < 25; ++t) {
    Vec<Rat> x = oracle::random_vec(rng, 4);
    Vec<Rat> y = oracle::random_vec(rng, 4);
    Vec<Rat> z = oracle::random_vec(rng, 4);
    Rat al = rng.rational(), be = rng.rational();
    CHECK(vec_is_zero(a.bracket(x, x), 0.0));
    Vec<Rat> lhs = a.bracket(vec_add(vec_scale(al, x), vec_scale(be, y)), z);
    Vec<Rat> rhs = vec_add(vec_scale(al, a.bracket(x, z)),
                           vec_scale(be, a.bracket(y, z)));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("bracket entry validation") {
  using E = std::tuple<int, int, int, Rat>;
  CHECK_THROWS_AS(LieAlgebra<Rat>::from_brackets(
                      2, std::vector<E>{{1, 0, 0, Rat(1)}}),
                  ValidationError);
  CHECK_THROWS_AS(LieAlgebra<Rat>::from_brackets(
                      2, std::vector<E>{{0, 2, 0, Rat(1)}}),
                  ValidationError);
}

TEST_CASE("jacobi checker accepts the catalog and pinpoints failures") {
  CHECK(heisenberg_family<Rat>(3, Rat(2)).algebra().check_jacobi().ok);
  CHECK(acfm_algebra().check_jacobi().ok);
  CHECK(bi_model<Rat>(2).algebra().check_jacobi().ok);
  CHECK(complex_heisenberg<Rat>().algebra.check_jacobi().ok);

  // (A, X, Y, Z) with [A,X] = X, [A,Y] = -Y but [X,Z] = Y instead of
  // [X,Y] = Z: the first failing triple is (A, X, Z).
  using E = std::tuple<int, int, int, Rat>;
  auto bad = LieAlgebra<Rat>::from_brackets(
      4, std::vector<E>{{0, 1, 1, Rat(1)}, {0, 2, 2, Rat(-1)}, {1, 3, 2, Rat(1)}});
  auto rep = bad.check_jacobi();
  CHECK_FALSE(rep.ok);
  CHECK(rep.witness == std::make_tuple(0, 1, 3));
  CHECK(rep.worst > 0.0);

  // [X,Y]=Z, [X,Z]=X, [Y,Z]=Y fails (jacobiator of (X,Y,Z) is -2Z)...
  auto bad2 = LieAlgebra<Rat>::from_brackets(
      3, std::vector<E>{{0, 1, 2, Rat(1)}, {0, 2, 0, Rat(1)}, {1, 2, 1, Rat(1)}});
  CHECK_FALSE(bad2.check_jacobi().ok);
  // ...while [X,Y]=Z, [X,Z]=Y, [Y,Z]=X is a genuine Lie algebra (≅ sl(2)).
  auto sl2like = LieAlgebra<Rat>::from_brackets(
      3, std::vector<E>{{0, 1, 2, Rat(1)}, {0, 2, 1, Rat(1)}, {1, 2, 0, Rat(1)}});
  CHECK(sl2like.check_jacobi().ok);
}

TEST_CASE("ad matrices, linearity, and traces") {
  auto h = heisenberg_family<Rat>(1, Rat(1));
  const auto& g = h.algebra();
  CHECK(g.ad(basis_vec(4, 3)).is_zero_matrix(0.0));  // Z2 central
  CHECK(g.ad(Vec<Rat>(4, Rat(0))).is_zero_matrix(0.0));

  auto a = acfm_algebra();
  Mat<Rat> adA = a.ad_basis(0);
  Mat<Rat> expect(4, 4);
  expect(1, 1) = Rat(1);
  expect(2, 2) = Rat(-1);
  CHECK((adA - expect).is_zero_matrix(0.0));

  oracle::TestRng rng(11);
  for (int t = 0; t < 25; ++t) {
    Vec<Rat> x = oracle::random_vec(rng, 4);
    Vec<Rat> y = oracle::random_vec(rng, 4);
    Rat al = rng.rational(), be = rng.rational();
    Mat<Rat> lhs = a.ad(vec_add(vec_scale(al, x), vec_scale(be, y)));
    Mat<Rat> rhs = al * a.ad(x) + be * a.ad(y);
    CHECK((lhs - rhs).is_zero_matrix(0.0));
    // trace is linear too
    Rat tl(0), tr(0);
    for (int i = 0; i < 4; ++i) {
      tl += lhs(i, i);
      tr += rhs(i, i);
    }
    CHECK(tl == tr);
  }
}

TEST_CASE("unimodularity by traces") {
  CHECK(heisenberg_family<Rat>(2, Rat(1)).algebra().is_unimodular());
  auto a = acfm_algebra();
  CHECK(a.is_unimodular());
  for (const Rat& t : a.ad_traces()) CHECK(t == Rat(0));

  auto b = bi_model<Rat>(1);
  CHECK_FALSE(b.algebra().is_unimodular());
  CHECK(b.algebra().ad_traces()[0] == Rat(-1));  // tr ad_A = 2·(−1/2)
  CHECK(complex_heisenberg<Rat>().algebra.is_unimodular());
}

TEST_CASE("derived algebra and center") {
  auto h = heisenberg_family<Rat>(1, Rat(1)).algebra();
  CHECK(subspace_equal(h.derived_algebra(), {basis_vec(4, 2)}));
  CHECK(subspace_equal(h.center(), {basis_vec(4, 2), basis_vec(4, 3)}));

  auto abelian = LieAlgebra<Rat>(4);
  CHECK(abelian.derived_algebra().empty());
  CHECK(subspace_equal(abelian.center(),
                       {basis_vec(4, 0), basis_vec(4, 1), basis_vec(4, 2),
                        basis_vec(4, 3)}));
  CHECK(abelian.is_abelian_algebra());

  auto a = acfm_algebra();
  CHECK(subspace_equal(a.derived_algebra(),
                       {basis_vec(4, 1), basis_vec(4, 2), basis_vec(4, 3)}));
  CHECK(subspace_equal(a.center(), {basis_vec(4, 3)}));
}

TEST_CASE("lower central series and nilpotency") {
  CHECK(heisenberg_family<Rat>(2, Rat(1)).algebra().is_nilpotent());
  CHECK(complex_heisenberg<Rat>().algebra.is_nilpotent());
  CHECK_FALSE(acfm_algebra().is_nilpotent());
  CHECK_FALSE(bi_model<Rat>(1).algebra().is_nilpotent());
  auto series = heisenberg_family<Rat>(1, Rat(1)).algebra().lower_central_series();
  REQUIRE(series.size() >= 2);
  CHECK(series.back().empty());      // reaches 0
  CHECK(series[1].size() == 1);      // g^2 = span{Z1}
}

TEST_CASE("change of basis transports brackets, metric, and J coherently") {
  oracle::TestRng rng(23);
  auto h = heisenberg_family<Rat>(1, make_rat(3, 2));
  const auto& g = h.algebra();
  int n = g.dim();
  for (int t = 0; t < 10; ++t) {
    Mat<Rat> p(n, n);
    do {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i, j) = rng.rational(2, 2);
    } while (determinant(p) == Rat(0));
    LieAlgebra<Rat> gp = change_basis(g, p);
    CHECK(gp.check_jacobi().ok);
    CHECK(gp.is_unimodular() == g.is_unimodular());
    CHECK(gp.derived_algebra().size() == g.derived_algebra().size());
    CHECK(gp.center().size() == g.center().size());
    // bracket naturality: P[x,y]_new = [Px,Py]_old
    Vec<Rat> x = oracle::random_vec(rng, n), y = oracle::random_vec(rng, n);
    CHECK(p.apply(gp.bracket(x, y)) == g.bracket(p.apply(x), p.apply(y)));
    // pulled-back metric represents the same inner product
    Mat<Rat> gm = pull_back_metric(h.metric().matrix(), p);
    CHECK(dot(x, gm.apply(y)) ==
          dot(p.apply(x), h.metric().matrix().apply(p.apply(y))));
    // conjugated J commutes with the transport
    Mat<Rat> jp = conjugate_endomorphism(h.J(), p);
    CHECK(p.apply(jp.apply(x)) == h.J().apply(p.apply(x)));
  }
}

TEST_CASE("associative algebra validation and commutativity") {
  using E = std::tuple<int, int, int, Rat>;
  // e0*e0 = e1, e0*e1 = e0 violates associativity: (e0 e0)e0 != e0(e0 e0).
  CHECK_THROWS_AS(AssociativeAlgebra<Rat>::from_products(
                      2, std::vector<E>{{0, 0, 1, Rat(1)}, {0, 1, 0, Rat(1)}}),
                  ValidationError);
  for (const auto& entry : commutative_corpus()) {
    CAPTURE(entry.name);
    CHECK(entry.alg.is_commutative());
  }
  // a non-commutative associative algebra: 2x2 upper triangular span{E11,E12}
  auto upper = AssociativeAlgebra<Rat>::from_products(
      2, std::vector<E>{{0, 0, 0, Rat(1)}, {0, 1, 1, Rat(1)}});
  CHECK_FALSE(upper.is_commutative());
}

TEST_CASE("nilpotency index of associative algebras") {
  for (const auto& entry : commutative_corpus()) {
    CAPTURE(entry.name);
    auto [nil, index] = entry.alg.nilpotency_index();
    CHECK(nil == entry.nilpotent);
    if (entry.nilpotent) CHECK(index == entry.index);
  }
}

TEST_CASE("aff construction: brackets, jacobi, and the idempotent witness") {
  using E = std::tuple<int, int, int, Rat>;
  // A = R with e^2 = e: aff(R) is the 2-dim non-abelian algebra and
  // ad_{(e,0)} is the block matrix [[0,0],[0,l_e]] = [[0,0],[0,1]].
  auto affR = aff_construct(AssociativeAlgebra<Rat>::from_products(
      1, std::vector<E>{{0, 0, 0, Rat(1)}}));
  CHECK(affR.lie.dim() == 2);
  CHECK_FALSE(affR.lie.is_abelian_algebra());
  Mat<Rat> adE = affR.lie.ad_basis(0);
  Mat<Rat> block(2, 2);
  block(1, 1) = Rat(1);
  CHECK((adE - block).is_zero_matrix(0.0));
  CHECK_FALSE(affR.lie.is_unimodular());

  // A = null line: aff is abelian R^2.
  auto affNull = aff_construct(AssociativeAlgebra<Rat>::from_products(1, {}));
  CHECK(affNull.lie.is_abelian_algebra());

  // A = R[t]/(t^2): 4-dim, not unimodular (tr ad_{(1,0)} = tr l_1 = 2).
  auto affDual = aff_construct(AssociativeAlgebra<Rat>::from_products(
      2, std::vector<E>{{0, 0, 0, Rat(1)},
                        {0, 1, 1, Rat(1)},
                        {1, 0, 1, Rat(1)}}));
  CHECK(affDual.lie.dim() == 4);
  CHECK_FALSE(affDual.lie.is_unimodular());
  CHECK(affDual.lie.ad_traces()[0] == Rat(2));

  for (const auto& entry : commutative_corpus()) {
    CAPTURE(entry.name);
    auto data = aff_construct(entry.alg);
    CHECK(data.lie.check_jacobi().ok);
    CHECK((data.J * data.J + Mat<Rat>::identity(data.lie.dim()))
              .is_zero_matrix(0.0));
    // Lemma-level property: aff(A) unimodular forces A nilpotent.
    if (data.lie.is_unimodular()) CHECK(entry.alg.nilpotency_index().first);
    // and commutative nilpotent A gives a nilpotent Lie algebra
    if (entry.nilpotent) CHECK(data.lie.is_nilpotent());
  }
}

TEST_CASE("aff of the maximal ideal of R[t]/(t^{m+1})") {
  for (int m = 1; m <= 4; ++m) {
    auto [nil, index] = t_span(m).nilpotency_index();
    CHECK(nil);
    CHECK(index == m + 1);
    auto data = aff_nilpotent<Rat>(m);
    CHECK(data.lie.dim() == 2 * m);
    CHECK(data.lie.is_nilpotent());
    CHECK(data.lie.is_unimodular());
  }
}
