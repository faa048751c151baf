#include <doctest.h>

#include <complex>

#include "corsolve/corsolve.hpp"
#include "test_helpers.hpp"

using namespace corsolve;
using testutil::cxd;
using testutil::dvec;

namespace {

template <typename Scalar>
LanczosState<Scalar> expect_state(
    std::variant<LanczosState<Scalar>, BreakdownInfo> init) {
  REQUIRE(std::holds_alternative<LanczosState<Scalar>>(init));
  return std::get<LanczosState<Scalar>>(std::move(init));
}

}  // namespace

TEST_CASE("lanczos_init normalizes the seed pair") {
  SUBCASE("identity: w1 equals v1") {
    const auto I2 = testutil::identity_csr(2);
    auto st = expect_state(lanczos_init(I2, dvec({3, 4})));
    CHECK(st.v_cur.isApprox(dvec({0.6, 0.8})));
    CHECK(st.w_cur.isApprox(dvec({0.6, 0.8})));
  }
  SUBCASE("diag(2,2): w1 = 2 v1 / 4") {
    const auto D = gen_diagonal<double>({2, 2});
    auto st = expect_state(lanczos_init(D, dvec({1, 0})));
    CHECK(st.v_cur.isApprox(dvec({1, 0})));
    CHECK(st.w_cur.isApprox(dvec({0.5, 0})));
  }
  SUBCASE("pairing <w1, A v1> = 1") {
    const auto A = testutil::example_3x3();
    auto st = expect_state(lanczos_init(A, dvec({5, 8, 9})));
    const double pairing = dot(st.w_cur, matvec(A, st.v_cur));
    CHECK(std::abs(pairing - 1.0) <= 1e-14);
  }
  SUBCASE("singular direction fails the initial pairing") {
    const auto Z = testutil::csr_from_rows<double>({{0, 0}, {0, 1}});
    auto init = lanczos_init(Z, dvec({1, 0}));
    REQUIRE(std::holds_alternative<BreakdownInfo>(init));
    CHECK(std::get<BreakdownInfo>(init).kind == BreakdownKind::InitialPairingFailed);
  }
  SUBCASE("zero seed is a precondition violation") {
    const auto I2 = testutil::identity_csr(2);
    CHECK_THROWS_AS(lanczos_init(I2, dvec({0, 0})), Error);
  }
}

TEST_CASE("lanczos_step on the identity reaches happy breakdown immediately") {
  const auto I2 = testutil::identity_csr(2);
  auto st = expect_state(lanczos_init(I2, dvec({3, 4})));
  const auto outcome = lanczos_step(st, I2);
  REQUIRE(outcome.has_value());
  CHECK(outcome->kind == BreakdownKind::DeltaVanished);
  CHECK(outcome->step == 1);
  REQUIRE(st.alpha_seq.size() == 1);
  CHECK(st.alpha_seq[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lanczos_step scalar values match the hand oracle") {
  // A = diag(1,2), r0 = (1,1): v1 = (1,1)/sqrt(2), w1 = A v1/||A v1||^2,
  // alpha_1 = <w1, A^2 v1> = (1 + 8)/5 = 9/5.
  const auto D = gen_diagonal<double>({1, 2});
  auto st = expect_state(lanczos_init(D, dvec({1, 1})));
  const auto outcome = lanczos_step(st, D);
  CHECK_FALSE(outcome.has_value());
  CHECK(st.alpha_seq[0] == doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("two steps produce a biorthonormal pair") {
  const auto A = testutil::example_3x3();
  const auto run = lanczos_run(A, dvec({5, 8, 9}), 2, /*record_bases=*/true);
  REQUIRE(run.k == 2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) {
      const double g = dot(Vector<double>(run.W.col(i)),
                           matvec(A, Vector<double>(run.V.col(j))));
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-12);
    }
}

TEST_CASE("scalar identity beta*delta = <what, A vhat>") {
  const auto A = testutil::example_3x3();
  const auto run = lanczos_run(A, dvec({5, 8, 9}), 2, /*record_bases=*/true);
  REQUIRE_FALSE(run.breakdown.has_value());
  // Reconstruct the unnormalized candidates from the returned pair.
  const Vector<double> vhat = run.delta_next * run.v_next;
  const Vector<double> what = run.beta_next * run.w_next;
  const double pairing = dot(what, matvec(A, vhat));
  const double prod = run.beta_next * run.delta_next;
  CHECK(std::abs(prod - pairing) <= 1e-12 * std::abs(pairing));
}

TEST_CASE("lanczos_run stops at the Krylov dimension") {
  SUBCASE("identity") {
    const auto I3 = testutil::identity_csr(3);
    const auto run = lanczos_run(I3, dvec({1, 2, 2}), 5, true);
    CHECK(run.k == 1);
    REQUIRE(run.breakdown.has_value());
    CHECK(run.breakdown->step == 1);
    CHECK(run.T.diag[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("three distinct eigenvalues") {
    const auto D = gen_diagonal<double>({1, 2, 3});
    const auto run = lanczos_run(D, dvec({1, 1, 1}), 5, true);
    CHECK(run.k == 3);
    REQUIRE(run.breakdown.has_value());
    CHECK(run.breakdown->kind == BreakdownKind::DeltaVanished);
    CHECK(run.breakdown->step == 3);
  }
}

TEST_CASE("T equals W' A^2 V elementwise") {
  const auto A = testutil::example_3x3();
  const auto run = lanczos_run(A, dvec({5, 8, 9}), 3, true);
  REQUIRE(run.k == 3);
  DenseMatrix<double> AAV(3, 3);
  for (Index c = 0; c < 3; ++c)
    AAV.col(c) = matvec(A, matvec(A, Vector<double>(run.V.col(c))));
  const DenseMatrix<double> T_oracle = run.W.adjoint() * AAV;
  CHECK((T_oracle - run.T.to_dense()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("delta stays real nonnegative in both fields") {
  const auto A = gen_random_well_conditioned(40, 3);
  const auto runr = lanczos_run(A, gen_random_vector<double>(40, 5), 10, false);
  for (Index i = 0; i + 1 < runr.k; ++i) CHECK(runr.T.sub[i] >= 0.0);

  const auto C = gen_complex_shifted(8, 8, 5, 0.7);
  const auto runc = lanczos_run(C, gen_random_vector<cxd>(64, 6), 10, false);
  for (Index i = 0; i + 1 < runc.k; ++i) {
    CHECK(runc.T.sub[i].imag() == 0.0);
    CHECK(runc.T.sub[i].real() >= 0.0);
  }
}

TEST_CASE("verify_proposition residuals") {
  SUBCASE("k=1 pairing residual is the init normalization") {
    const auto A = testutil::example_3x3();
    const auto run = lanczos_run(A, dvec({5, 8, 9}), 1, true);
    REQUIRE(run.k == 1);
    const auto res = verify_proposition(A, run);
    CHECK(res.res_eq7 <= 1e-14);
  }
  SUBCASE("3x3 at k=3") {
    const auto A = testutil::example_3x3();
    const auto run = lanczos_run(A, dvec({5, 8, 9}), 3, true);
    const auto res = verify_proposition(A, run);
    CHECK(res.max() <= 1e-10);
  }
  SUBCASE("random 100x100 at k=10") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto A = gen_random_well_conditioned(100, seed);
      const auto run =
          lanczos_run(A, gen_random_vector<double>(100, seed + 40), 10, true);
      REQUIRE_FALSE(run.breakdown.has_value());
      const auto res = verify_proposition(A, run);
      CHECK(res.max() <= 1e-8 * frobenius_norm(A));
    }
  }
  SUBCASE("complex field at k=10") {
    const auto A = gen_complex_shifted(10, 10, 8, 1.0);
    const auto run = lanczos_run(A, gen_random_vector<cxd>(100, 9), 10, true);
    REQUIRE_FALSE(run.breakdown.has_value());
    const auto res = verify_proposition(A, run);
    CHECK(res.max() <= 1e-8 * frobenius_norm(A));
  }
}

TEST_CASE("biorthonormality drift stays small over 15 steps") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto A = gen_random_well_conditioned(100, seed);
    const auto run =
        lanczos_run(A, gen_random_vector<double>(100, seed + 60), 15, true);
    REQUIRE_FALSE(run.breakdown.has_value());
    CHECK(biorthonormality_drift(A, run.V, run.W) <= 1e-6);
  }
}

TEST_CASE("V_k spans the monomial Krylov space") {
  const auto A = gen_random_well_conditioned(30, 8);
  const auto r0 = gen_random_vector<double>(30, 21);
  for (Index k : {2, 3, 5}) {
    const auto run = lanczos_run(A, r0, k, true);
    REQUIRE(run.k == k);
    const auto brute = brute_force_krylov(A, Vector<double>(r0 / norm2(r0)), k);
    REQUIRE(brute.rank == k);
    const auto Q = orthonormalize(run.V);
    CHECK(max_principal_angle<double>(Q, brute.Q) <= 1e-7);
  }
}

TEST_CASE("lanczos_run performs exactly 2k products by A and k by the adjoint") {
  const auto A = gen_random_well_conditioned(60, 3);
  InstrumentedOperator<CsrMatrix<double>> op(A);
  for (Index k : {1, 4, 12}) {
    op.reset_counts();
    const auto run = lanczos_run(op, gen_random_vector<double>(60, 17), k, false);
    REQUIRE(run.k == k);
    CHECK(op.count_matvec() == 2 * k);
    CHECK(op.count_adjoint() == k);
  }
}
