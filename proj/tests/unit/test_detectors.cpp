#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subspace_glr/detectors.hpp"
#include "subspace_glr/errors.hpp"

using namespace subspace_glr;
using namespace subspace_glr::testing;

namespace {

SnapshotData scaled_data(const SnapshotData& d, cplx c_s, cplx c_r) {
  return {c_s * d.y_s, c_r * d.y_r, d.hypothesis};
}

/// Y_s and Y_r supported on disjoint columns, so S_sr is exactly zero.
SnapshotData disjoint_data(std::uint64_t seed, int l, int n) {
  Rng rng(seed);
  SnapshotData d;
  d.y_s = CMatrix::Zero(l, n);
  d.y_r = CMatrix::Zero(l, n);
  d.y_s.leftCols(n / 2) = rng.complex_normal_matrix(l, n / 2);
  d.y_r.rightCols(n - n / 2) = rng.complex_normal_matrix(l, n - n / 2);
  return d;
}

}  // namespace

TEST_CASE("detector names round-trip") {
  for (Detector d : kAllDetectors) CHECK(detector_from_string(to_string(d)) == d);
  CHECK_THROWS_AS(detector_from_string("glrt"), Error);
  DetectorSet set;
  CHECK(set.empty());
  set.insert(Detector::t_cc);
  CHECK(set.contains(Detector::t_cc));
  CHECK_FALSE(set.contains(Detector::glr));
}

TEST_CASE("statistics vanish without cross-correlation") {
  for (int l = 1; l <= 4; ++l) {
    const SnapshotData d = disjoint_data(static_cast<std::uint64_t>(l), l, 4 * l);
    Rng rng(static_cast<std::uint64_t>(100 + l));
    const SteeringPair sp{random_unit_vector(rng, l), random_unit_vector(rng, l)};
    const DetectorReport rep = evaluate(d, sp);
    CHECK(std::abs(*rep.glr_1n - 1.0) < 1e-8);
    CHECK(*rep.lambda_app == 0.0);
    CHECK(*rep.lambda_low == 0.0);
    CHECK(*rep.sigma_max == 0.0);
    CHECK(*rep.t_cc == 0.0);
    CHECK(*rep.t_svd < 1e-24);
  }
}

TEST_CASE("low-SNR statistic: three equivalent forms") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = random_instance(seed, 2 + static_cast<int>(seed % 5), 24);
    const CVector& u_s = inst.steering.u_s;
    const CVector& u_r = inst.steering.u_r;
    const double low = glr_low(inst.s, u_s, u_r);
    const BeamformerPair bf = capon_pair(inst.s, u_s, u_r);
    const double capon = std::norm(bf.b_s.dot(inst.s.s_sr() * bf.b_r)) /
                         (bf.b_s.dot(inst.s.s_ss() * bf.b_s).real() * bf.b_r.dot(inst.s.s_rr() * bf.b_r).real());
    const CMatrix c = coherence_matrix(inst.s);
    const double whitened = std::norm(bf.w_s.dot(c * bf.w_r));
    CHECK(rel_diff(low, capon) < 1e-10);
    CHECK(rel_diff(low, whitened) < 1e-10);
    const double inflation = 1.0 - (c * bf.w_r).squaredNorm();
    CHECK(rel_diff(glr_sample(inst.s, u_s, u_r), low / inflation) < 1e-10);
  }
}

TEST_CASE("scalar channels") {
  CMatrix ss(1, 1), sr(1, 1), rr(1, 1);
  ss << 2.0;
  sr << cplx(0.6, -0.8);
  rr << 1.5;
  const BlockSampleCov s = BlockSampleCov::from_blocks(ss, sr, rr, 4);
  const CVector one = CVector::Ones(1);
  const double coh = std::norm(sr(0, 0)) / (2.0 * 1.5);
  CHECK(std::abs(glr_low(s, one, one) - coh) < 1e-15);
  CHECK(std::abs(sigma_max_coherence(s) - std::sqrt(coh)) < 1e-15);
  const GlrResult g = glr_exact(s, one, one);
  CHECK(std::abs(g.glr_1n - (1.0 + glr_sample(s, one, one))) < 1e-12);
  CHECK(g.optim.converged);
}

TEST_CASE("ordering and ranges on random instances") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Hypothesis h = seed % 2 ? Hypothesis::h1 : Hypothesis::h0;
    const Instance inst = random_instance(seed, 2 + static_cast<int>(seed % 5), 15 + static_cast<int>(seed % 4), h);
    const DetectorReport rep = evaluate(inst.data, inst.steering);
    CHECK(*rep.glr_1n >= 1.0 + *rep.lambda_app - 1e-8);
    CHECK(*rep.lambda_app >= 0.0);
    CHECK(*rep.lambda_low <= 1.0 + 1e-12);
    CHECK(*rep.lambda_low <= *rep.sigma_max * *rep.sigma_max + 1e-12);
    CHECK(*rep.sigma_max <= 1.0 + 1e-12);
    CHECK(*rep.t_svd <= 1.0 + 1e-12);
    CHECK(*rep.t_cc >= 0.0);
    CHECK(std::abs(*rep.two_log_glr - 2.0 * inst.data.snapshots() * std::log(*rep.glr_1n)) < 1e-9);
    CHECK(rep.optim.has_value());
  }
}

TEST_CASE("scale invariance") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_instance(seed, 4, 16);
    const DetectorReport base = evaluate(inst.data, inst.steering);
    for (auto [c_s, c_r] : {std::pair<cplx, cplx>{1e-3, 1e3}, {1e3, 1.0}, {cplx(0.0, 2.0), cplx(-3.0, 1.0)}}) {
      const DetectorReport r = evaluate(scaled_data(inst.data, c_s, c_r), inst.steering);
      CHECK(rel_diff(*r.glr_1n, *base.glr_1n) < 1e-9);
      CHECK(rel_diff(*r.lambda_app, *base.lambda_app) < 1e-9);
      CHECK(rel_diff(*r.lambda_low, *base.lambda_low) < 1e-9);
      CHECK(rel_diff(*r.sigma_max, *base.sigma_max) < 1e-9);
      CHECK(rel_diff(*r.t_svd, *base.t_svd) < 1e-9);
      // The cross-correlation statistic carries the channel gains.
      CHECK(rel_diff(*r.t_cc, std::norm(c_s) * std::norm(c_r) * *base.t_cc) < 1e-9);
    }
  }
}

TEST_CASE("completion choice does not change the statistic") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_instance(seed, 4, 16);
    const CVector& u_r = inst.steering.u_r;
    Rng rng(seed + 50);
    const CMatrix q = random_unitary(rng, 3);
    CMatrix u(4, 4);
    u << u_r, unitary_completion(u_r) * q;
    const double a = glr_exact(inst.s, inst.steering.u_s, u_r).glr_1n;
    const double b = glr_exact(inst.s, inst.steering.u_s, u).glr_1n;
    CHECK(rel_diff(a, b) < 1e-8);
  }
}

TEST_CASE("singular-vector statistic") {
  Rng rng(4);
  const CMatrix y = rng.complex_normal_matrix(3, 10);
  CHECK(std::abs(svd_corr_stat({y, y, Hypothesis::h1}) - 1.0) < 1e-12);

  const CVector x = rng.complex_normal_vector(10);
  const CVector h_s = rng.complex_normal_vector(3);
  const CVector h_r = rng.complex_normal_vector(3);
  CHECK(std::abs(svd_corr_stat({h_s * x.transpose(), h_r * x.transpose(), Hypothesis::h1}) - 1.0) < 1e-12);

  CHECK_THROWS_AS(svd_corr_stat({CMatrix::Zero(3, 10), y, Hypothesis::h0}), Error);
}

TEST_CASE("exact statistic agrees with the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Instance inst = random_instance(seed, 2, 50, Hypothesis::h1, -5.0, 5.0);
    const double exact = glr_exact(inst.s, inst.steering.u_s, inst.steering.u_r).glr_1n;
    const double oracle = oracle_glr(inst.s, inst.steering.u_s, inst.steering.u_r, 4);
    CHECK(rel_diff(exact, oracle) < 1e-4);
    CHECK(oracle >= 1.0 + glr_sample(inst.s, inst.steering.u_s, inst.steering.u_r) - 1e-6);
  }
  const Instance inst = random_instance(9, 2, 50);
  const BlockSampleCov z = without_cross(inst.s);
  CHECK(std::abs(oracle_glr(z, inst.steering.u_s, inst.steering.u_r, 2) - 1.0) < 1e-6);
}

TEST_CASE("compressed likelihood at S_rr is the sample-based statistic") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = random_instance(seed, 3, 20);
    const double at_srr =
        std::exp(compressed_log_glr(inst.s, inst.steering.u_s, inst.steering.u_r, inst.s.s_rr().inverse()));
    CHECK(rel_diff(at_srr, 1.0 + glr_sample(inst.s, inst.steering.u_s, inst.steering.u_r)) < 1e-10);
  }
}

TEST_CASE("ML estimate of the cross term") {
  const Instance inst = random_instance(21, 2, 20);
  const CVector& u_s = inst.steering.u_s;
  const CVector& u_r = inst.steering.u_r;

  SUBCASE("zero without cross-correlation") {
    const BlockSampleCov z = without_cross(inst.s);
    CHECK(ml_qsr(z, u_s, u_r, z.s_rr()) == cplx(0.0, 0.0));
  }
  SUBCASE("minimizes det M on a local grid") {
    const CMatrix r = inst.s.s_rr();
    const cplx q_hat = ml_qsr(inst.s, u_s, u_r, r);
    const double best = std::abs(m_matrix(inst.s, u_s, u_r, r, q_hat).determinant());
    const double radius = 3.0 * std::abs(q_hat);
    for (int i = 0; i <= 40; ++i)
      for (int k = 0; k <= 40; ++k) {
        const cplx q = q_hat + cplx(-radius + 2 * radius * i / 40.0, -radius + 2 * radius * k / 40.0);
        CHECK(best <= m_matrix(inst.s, u_s, u_r, r, q).determinant().real() * (1.0 + 1e-12));
      }
  }
  SUBCASE("low-SNR estimate meets the trace constraint") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Instance r = random_instance(seed, 2 + static_cast<int>(seed % 4), 24);
      const cplx q = low_snr_qsr(r.s, r.steering.u_s, r.steering.u_r);
      const Eigen::Index l = r.s.antennas();
      CMatrix r1(2 * l, 2 * l);
      r1 << r.s.s_ss(), q * r.steering.u_s * r.steering.u_r.adjoint(),
          std::conj(q) * r.steering.u_r * r.steering.u_s.adjoint(), r.s.s_rr();
      const double tr = (r1.inverse() * r.s.full()).trace().real();
      CHECK(std::abs(tr - 2.0 * l) < 1e-8);
    }
  }
}

TEST_CASE("evaluate rejects bad input") {
  const Instance inst = random_instance(3, 4, 16);
  SnapshotData thin{inst.data.y_s.leftCols(7), inst.data.y_r.leftCols(7), Hypothesis::h0};
  try {
    evaluate(thin, inst.steering);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_sample);
  }
  Rng rng(1);
  const SteeringPair short_pair{random_unit_vector(rng, 3), random_unit_vector(rng, 3)};
  CHECK_THROWS_AS(evaluate(inst.data, short_pair), Error);

  DetectorSet only;
  only.insert(Detector::lambda_low);
  const DetectorReport rep = evaluate(inst.data, inst.steering, only);
  CHECK(rep.lambda_low.has_value());
  CHECK_FALSE(rep.glr_1n.has_value());
  CHECK_FALSE(rep.t_cc.has_value());
}
