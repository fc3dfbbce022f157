#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lck/catalog.hpp"
#include "lck/hermitian.hpp"
#include "oracles.hpp"

using namespace lck;

namespace {

Vec<Rat> basis_vec(int n, int i) {
  Vec<Rat> v(n, Rat(0));
  v[i] = Rat(1);
  return v;
}

// All residual-zero catalog structures plus random positive rescalings of
// their metrics: conformal scaling keeps theta and the zero residual exact,
// so this generates arbitrarily many certified instances.
std::vector<HermitianStructure<Rat>> certified_instances(int target) {
  oracle::TestRng rng(2024);
  std::vector<HermitianStructure<Rat>> out;
  std::vector<HermitianStructure<Rat>> seeds;
  for (int n = 1; n <= 3; ++n)
    for (const Rat& lam : {Rat(1), Rat(2), make_rat(1, 2), make_rat(5, 3)})
      seeds.push_back(heisenberg_family<Rat>(n, lam));
  for (int n = 1; n <= 3; ++n) seeds.push_back(bi_model<Rat>(n));
  seeds.push_back(acfm_solvable<Rat>());
  int i = 0;
  while ((int)out.size() < target) {
    const auto& s = seeds[i++ % seeds.size()];
    Rat c = make_rat(rng.integer(1, 12), rng.integer(1, 7));
    out.emplace_back(s.algebra(), InnerProduct<Rat>(c * s.metric().matrix()),
                     s.J(), s.orientation());
  }
  return out;
}

}  // namespace

TEST_CASE("J classification across the catalog") {
  auto h = heisenberg_family<Rat>(2, Rat(1));
  auto jc = classify_J(h.algebra(), h.J());
  CHECK(jc.almost_complex);
  CHECK(jc.integrable);
  CHECK(jc.abelian);
  CHECK_FALSE(jc.bi_invariant);

  auto a = acfm_solvable<Rat>();
  auto jca = classify_J(a.algebra(), a.J());
  CHECK(jca.almost_complex);
  CHECK(jca.integrable);
  CHECK_FALSE(jca.abelian);
  CHECK_FALSE(jca.bi_invariant);

  auto b = bi_model<Rat>(2);
  auto jcb = classify_J(b.algebra(), b.J());
  CHECK(jcb.integrable);
  CHECK(jcb.bi_invariant);
  CHECK_FALSE(jcb.abelian);

  auto c = complex_heisenberg<Rat>();
  auto jcc = classify_J(c.algebra, c.J);
  CHECK(jcc.integrable);
  CHECK(jcc.bi_invariant);
  CHECK_FALSE(jcc.abelian);

  // J^2 != -I suppresses every other flag
  auto bad = classify_J(h.algebra(), Mat<Rat>::identity(h.dim()));
  CHECK_FALSE(bad.almost_complex);
  CHECK_FALSE(bad.integrable);
  CHECK_FALSE(bad.abelian);
  CHECK_FALSE(bad.bi_invariant);

  // a genuinely non-integrable J on the solvable example:
  // JA = X, JX = -A, JY = Z, JZ = -Y gives N(A,Y) = 2Y
  Mat<Rat> j(4, 4);
  j(1, 0) = Rat(1);
  j(0, 1) = Rat(-1);
  j(3, 2) = Rat(1);
  j(2, 3) = Rat(-1);
  auto jcn = classify_J(a.algebra(), j);
  CHECK(jcn.almost_complex);
  CHECK_FALSE(jcn.integrable);
  Vec<Rat> nij = nijenhuis(a.algebra(), j, basis_vec(4, 0), basis_vec(4, 2));
  CHECK(nij == vec_scale(Rat(2), basis_vec(4, 2)));
}

TEST_CASE("Hermitian construction rejects each invariant violation distinctly") {
  auto h = heisenberg_family<Rat>(1, Rat(1));
  const auto& g = h.algebra();

  CHECK_THROWS_WITH_AS(
      HermitianStructure<Rat>(LieAlgebra<Rat>(3), InnerProduct<Rat>::standard(3),
                              Mat<Rat>::identity(3)),
      "Hermitian structure needs even dimension", ValidationError);

  CHECK_THROWS_WITH_AS(HermitianStructure<Rat>(g, InnerProduct<Rat>::standard(4),
                                               Mat<Rat>::identity(4)),
                       "J squared is not minus the identity", ValidationError);

  Mat<Rat> stretched = Mat<Rat>::identity(4);
  stretched(0, 0) = Rat(2);  // breaks J-compatibility: J pairs e0 with e1
  CHECK_THROWS_WITH_AS(
      HermitianStructure<Rat>(g, InnerProduct<Rat>(stretched), h.J()),
      "metric is not J-compatible", ValidationError);

  Mat<Rat> nonspd = Mat<Rat>::identity(2);
  nonspd(0, 1) = nonspd(1, 0) = Rat(2);
  CHECK_THROWS_WITH_AS((InnerProduct<Rat>(nonspd)),
                       "metric is not symmetric positive definite",
                       ValidationError);

  // non-integrable J on the solvable example (orthonormal, J-compatible)
  auto a = acfm_solvable<Rat>();
  Mat<Rat> j(4, 4);
  j(1, 0) = Rat(1);
  j(0, 1) = Rat(-1);
  j(3, 2) = Rat(1);
  j(2, 3) = Rat(-1);
  CHECK_THROWS_WITH_AS(
      HermitianStructure<Rat>(a.algebra(), InnerProduct<Rat>::standard(4), j),
      "J is not integrable", ValidationError);
}

TEST_CASE("fundamental form is omega(x,y) = <Jx, y> and is J-invariant") {
  oracle::TestRng rng(88);
  for (const auto& h : {heisenberg_family<Rat>(1, make_rat(2, 3)),
                        acfm_solvable<Rat>(), bi_model<Rat>(1)}) {
    auto omega = h.fundamental_form();
    for (int t = 0; t < 15; ++t) {
      Vec<Rat> x = oracle::random_vec(rng, h.dim());
      Vec<Rat> y = oracle::random_vec(rng, h.dim());
      Rat direct = h.metric().inner(h.J().apply(x), y);
      CHECK(omega.eval({x, y}) == direct);
      CHECK(omega.eval({h.J().apply(x), h.J().apply(y)}) == omega.eval({x, y}));
    }
  }
}

TEST_CASE("Levi-Civita connection is torsion-free and metric") {
  oracle::TestRng rng(19);
  for (int rep = 0; rep < 6; ++rep) {
    LieAlgebra<Rat> g = (rep % 2 == 0)
                                   ? heisenberg_family<Rat>(1, Rat(1)).algebra()
                                   : acfm_solvable<Rat>().algebra();
    Mat<Rat> gm = oracle::random_spd(rng, 4);
    InnerProduct<Rat> ip(gm);
    auto conn = levi_civita(g, ip);
    for (int t = 0; t < 8; ++t) {
      Vec<Rat> x = oracle::random_vec(rng, 4);
      Vec<Rat> y = oracle::random_vec(rng, 4);
      Vec<Rat> z = oracle::random_vec(rng, 4);
      // torsion: ∇_x y − ∇_y x = [x,y]
      CHECK(vec_sub(conn.nabla(x, y), conn.nabla(y, x)) == g.bracket(x, y));
      // metric: ⟨∇_z x, y⟩ + ⟨x, ∇_z y⟩ = 0 for left-invariant fields
      CHECK(Rat(ip.inner(conn.nabla(z, x), y) + ip.inner(x, conn.nabla(z, y))) ==
            Rat(0));
    }
  }
}

TEST_CASE("curvature tensor has the Riemann symmetries") {
  oracle::TestRng rng(97);
  for (int rep = 0; rep < 5; ++rep) {
    LieAlgebra<Rat> g = (rep % 2 == 0)
                                   ? acfm_solvable<Rat>().algebra()
                                   : bi_model<Rat>(1).algebra();
    Mat<Rat> gm = oracle::random_spd(rng, 4);
    InnerProduct<Rat> ip(gm);
    auto conn = levi_civita(g, ip);
    for (int t = 0; t < 6; ++t) {
      Vec<Rat> x = oracle::random_vec(rng, 4);
      Vec<Rat> y = oracle::random_vec(rng, 4);
      Vec<Rat> z = oracle::random_vec(rng, 4);
      Vec<Rat> w = oracle::random_vec(rng, 4);
      Mat<Rat> rxy = curvature_operator(g, conn, x, y);
      Mat<Rat> ryx = curvature_operator(g, conn, y, x);
      CHECK((rxy + ryx).is_zero_matrix(0.0));
      auto pair = [&](const Vec<Rat>& a, const Vec<Rat>& b, const Vec<Rat>& c,
                      const Vec<Rat>& d) {
        return ip.inner(curvature_operator(g, conn, a, b).apply(c), d);
      };
      CHECK(pair(x, y, z, w) == Rat(-pair(x, y, w, z)));
      CHECK(pair(x, y, z, w) == pair(z, w, x, y));
      // first Bianchi identity
      Vec<Rat> bianchi = vec_add(
          vec_add(rxy.apply(z), curvature_operator(g, conn, y, z).apply(x)),
          curvature_operator(g, conn, z, x).apply(y));
      CHECK(vec_is_zero(bianchi, 0.0));
    }
  }
}

TEST_CASE("scalar curvature: float frame route vs exact Ricci contraction") {
  // catalog instances with frozen exact values
  CHECK(oracle::exact_scalar_curvature(
            acfm_solvable<Rat>().algebra(),
            acfm_solvable<Rat>().metric().matrix()) == make_rat(-5, 2));
  CHECK(oracle::exact_scalar_curvature(
            bi_model<Rat>(1).algebra(), bi_model<Rat>(1).metric().matrix()) ==
        make_rat(-3, 2));

  for (int n = 1; n <= 3; ++n)
    for (const Rat& lam : {Rat(1), Rat(2), Rat(3), make_rat(1, 2)}) {
      auto h = heisenberg_family<Rat>(n, lam);
      Rat exact =
          oracle::exact_scalar_curvature(h.algebra(), h.metric().matrix());
      CHECK(exact == Rat(make_rat(-n, 2) / lam));
      CHECK(scalar_curvature(h.algebra(), h.metric()) ==
            doctest::Approx(exact.get_d()).epsilon(1e-9));
    }

  // random SPD metrics: the two independent routes agree within 1e-9
  oracle::TestRng rng(41);
  for (int t = 0; t < 8; ++t) {
    LieAlgebra<Rat> g = (t % 2 == 0)
                                   ? heisenberg_family<Rat>(1, Rat(1)).algebra()
                                   : acfm_solvable<Rat>().algebra();
    Mat<Rat> gm = oracle::random_spd(rng, 4);
    Rat exact = oracle::exact_scalar_curvature(g, gm);
    double frame = scalar_curvature(g, InnerProduct<Rat>(gm));
    CHECK(frame == doctest::Approx(exact.get_d()).epsilon(1e-9));
  }
}

TEST_CASE("certificates on the nilpotent family: exact zero residual") {
  for (int n = 1; n <= 3; ++n)
    for (const Rat& lam : {Rat(1), Rat(2), make_rat(1, 2)}) {
      auto h = heisenberg_family<Rat>(n, lam);
      auto cert = check_lck(h);
      int dim = 2 * n + 2;
      CHECK(cert.residual_sq == Rat(0));
      CHECK(cert.is_lck);
      CHECK_FALSE(cert.is_kahler);
      CHECK(cert.theta_closed);

      AlternatingForm<Rat> tx(dim, 1);
      tx.set(1u << (dim - 1), Rat(1) / lam);  // (1/λ) z²
      CHECK(forms_equal(cert.theta, tx, 0.0));

      REQUIRE(cert.A.has_value());
      CHECK(*cert.A == vec_scale(lam, basis_vec(dim, dim - 1)));  // A = λ Z₂
      CHECK(cert.A_norm_sq == lam);
      CHECK(cert.vaisman == VaismanVerdict::vaisman);
      CHECK(cert.vaisman_routes_agree);
      CHECK(cert.theta_routes_agree);
      REQUIRE(cert.theta_contraction.has_value());
      CHECK(forms_equal(*cert.theta_contraction, cert.theta, 0.0));

      // tita-pi: θ(X)·|A|² = ⟨X, A⟩ on every basis vector
      for (int i = 0; i < dim; ++i) {
        Vec<Rat> ei = basis_vec(dim, i);
        CHECK(Rat(cert.theta.one_form_coeffs()[i] * cert.A_norm_sq) ==
              h.metric().inner(ei, *cert.A));
      }

      // Vaisman route 2 explicitly: ∇θ = 0 exactly
      auto conn = levi_civita(h.algebra(), h.metric());
      CHECK(nabla_theta(h.algebra(), conn, cert.theta).is_zero_matrix(0.0));
    }
}

TEST_CASE("certificate on the solvable example: lcK but not Vaisman") {
  auto h = acfm_solvable<Rat>();
  auto cert = check_lck(h);
  CHECK(cert.residual_sq == Rat(0));
  CHECK(cert.is_lck);
  CHECK(cert.theta_closed);
  CHECK_FALSE(cert.is_kahler);

  AlternatingForm<Rat> tx(4, 1);
  tx.set(0b0001, Rat(-1));  // θ = −α
  CHECK(forms_equal(cert.theta, tx, 0.0));
  CHECK(cert.vaisman == VaismanVerdict::not_vaisman);
  CHECK(cert.vaisman_routes_agree);

  // ∇θ ≠ 0 and ad_A not skew: both routes must say "not Vaisman"
  auto vs = vaisman_check(h.algebra(), h.metric(), cert);
  CHECK_FALSE(vs.adA_skew);
  CHECK_FALSE(vs.nabla_theta_zero);
  CHECK(vs.routes_agree);

  REQUIRE(cert.A.has_value());
  CHECK(*cert.A == vec_scale(Rat(-1), basis_vec(4, 0)));  // A = −A-axis
  CHECK(cert.A_norm_sq == Rat(1));
}

TEST_CASE("Kaehler detection takes precedence and theta vanishes iff closed") {
  // flat abelian R^4 with the standard pair: dω = 0
  LieAlgebra<Rat> r4(4);
  Mat<Rat> j(4, 4);
  j(1, 0) = Rat(1);
  j(0, 1) = Rat(-1);
  j(3, 2) = Rat(1);
  j(2, 3) = Rat(-1);
  HermitianStructure<Rat> flat(r4, InnerProduct<Rat>::standard(4), j);
  auto cert = check_lck(flat);
  CHECK(cert.is_kahler);
  CHECK(cert.is_lck);
  CHECK(cert.theta.is_zero_form(0.0));
  CHECK_FALSE(cert.A.has_value());
  CHECK(cert.vaisman == VaismanVerdict::kahler);

  // ...and on zero-residual certificates: θ = 0 ⟺ dω = 0
  for (const auto& h : {heisenberg_family<Rat>(1, Rat(1)), acfm_solvable<Rat>()}) {
    auto c = check_lck(h);
    CHECK(c.residual_sq == Rat(0));
    CHECK(c.d_omega.is_zero_form(0.0) == c.theta.is_zero_form(0.0));
  }
}

TEST_CASE("lemma suite over 100+ scaled certified metrics") {
  auto instances = certified_instances(108);
  int vaisman_disagree = 0, theta_disagree = 0, sym_failures = 0;
  for (const auto& h : instances) {
    auto cert = check_lck(h);
    REQUIRE(cert.residual_sq == Rat(0));
    REQUIRE(cert.is_lck);
    // conformal scaling does not change theta
    CHECK(cert.theta_closed);
    if (!cert.vaisman_routes_agree) ++vaisman_disagree;
    if (!cert.theta_routes_agree) ++theta_disagree;
    auto sym = check_J_adJA_symmetric(h, cert);
    CHECK(sym.applicable);
    if (!sym.symmetric) ++sym_failures;
    // audit applies vacuously everywhere; it must never be inconsistent
    CHECK(kahler_bi_invariant_audit(h).consistent);
  }
  CHECK(vaisman_disagree == 0);
  CHECK(theta_disagree == 0);
  CHECK(sym_failures == 0);
}

TEST_CASE("bi-invariant Kaehler audit applicability") {
  // abelian R^4: J is bi-invariant, structure Kähler, algebra abelian
  LieAlgebra<Rat> r4(4);
  Mat<Rat> j(4, 4);
  j(1, 0) = Rat(1);
  j(0, 1) = Rat(-1);
  j(3, 2) = Rat(1);
  j(2, 3) = Rat(-1);
  HermitianStructure<Rat> flat(r4, InnerProduct<Rat>::standard(4), j);
  auto audit = kahler_bi_invariant_audit(flat);
  CHECK(audit.applicable);
  CHECK(audit.consistent);

  // bi_model: bi-invariant J but dω ≠ 0, so the lemma does not apply
  auto bm = bi_model<Rat>(1);
  auto audit2 = kahler_bi_invariant_audit(bm);
  CHECK_FALSE(audit2.applicable);
  CHECK(audit2.consistent);

  // heisenberg: J abelian (not bi-invariant), not Kähler
  auto audit3 = kahler_bi_invariant_audit(heisenberg_family<Rat>(1, Rat(1)));
  CHECK_FALSE(audit3.applicable);
}

TEST_CASE("symmetry check preconditions") {
  auto h = heisenberg_family<Rat>(1, Rat(1));
  auto cert = check_lck(h);
  cert.is_lck = false;
  CHECK_THROWS_AS(check_J_adJA_symmetric(h, cert), PreconditionError);

  // Kähler certificate: vacuous (no characteristic vector)
  LieAlgebra<Rat> r4(4);
  Mat<Rat> j(4, 4);
  j(1, 0) = Rat(1);
  j(0, 1) = Rat(-1);
  j(3, 2) = Rat(1);
  j(2, 3) = Rat(-1);
  HermitianStructure<Rat> flat(r4, InnerProduct<Rat>::standard(4), j);
  auto kc = check_lck(flat);
  auto sym = check_J_adJA_symmetric(flat, kc);
  CHECK_FALSE(sym.applicable);
}

TEST_CASE("float backend certificates stay within tolerance") {
  auto hr = heisenberg_family<Rat>(2, make_rat(7, 5));
  HermitianStructure<double> hf(to_float_algebra(hr.algebra()),
                                InnerProduct<double>(to_float_matrix(hr.metric().matrix())),
                                to_float_matrix(hr.J()));
  auto cert = check_lck(hf);
  CHECK(cert.is_lck);
  CHECK(cert.residual() < 1e-9);
  CHECK(cert.theta_closed);
  CHECK(cert.vaisman == VaismanVerdict::vaisman);
  CHECK(cert.theta_routes_agree);
  auto exact = check_lck(hr);
  CHECK(form_distance(cert.theta, to_float_form(exact.theta)) < tol::theta_agree);
}
