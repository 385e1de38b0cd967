#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mixsat/qalgebra.hpp"

using namespace mixsat;

namespace {

Vec2 random_vec2(RandomStream& r) { return {cplx(r.normal(), r.normal()), cplx(r.normal(), r.normal())}; }

double vnorm(const Vec2& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

Eigen::MatrixXcd projector(const Ray4& phi) {
  Eigen::VectorXcd v(4);
  for (int k = 0; k < 4; ++k) v(k) = phi[k];
  return v * v.adjoint();
}

}  // namespace

TEST(Ray, CanonicalPhase) {
  const auto r = Ray2::from_vector({cplx(0, 0), cplx(0, -3)});
  EXPECT_NEAR(r[0].real(), 0.0, 1e-15);
  EXPECT_NEAR(r[1].real(), 1.0, 1e-15);
  EXPECT_NEAR(r[1].imag(), 0.0, 1e-15);
  EXPECT_TRUE(r.is_basis_state());
}

TEST(Ray, ZeroVectorRejected) {
  EXPECT_THROW(Ray4::from_vector({}), RayError);
  EXPECT_THROW(Ray2::from_canonical({cplx(0.9), cplx(0)}), RayError);
}

TEST(Ray, Overlap) {
  const auto a = Ray2::basis(0);
  const auto b = Ray2::from_vector({cplx(1), cplx(0, 1)});
  EXPECT_NEAR(a.overlap(b), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(b.overlap(b), 1.0, 1e-15);
}

TEST(Haar, NormAndPhase) {
  RandomStream r(10);
  for (int k = 0; k < 1000; ++k) {
    const auto phi = haar_ray<4>(r);
    EXPECT_NEAR(norm(phi.amplitudes()), 1.0, 1e-12);
    EXPECT_GE(phi[0].real(), 0.0);
    EXPECT_EQ(phi[0].imag(), 0.0);
  }
}

TEST(Haar, QubitMarginalIsUniform) {
  // |a_0|^2 of a Haar qubit is U(0,1); Kolmogorov-Smirnov at level 0.001.
  RandomStream r(11);
  const int n = 100000;
  std::vector<double> x(n);
  for (auto& v : x) v = std::norm(haar_ray<2>(r)[0]);
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (int k = 0; k < n; ++k) d = std::max({d, (k + 1.0) / n - x[k], x[k] - static_cast<double>(k) / n});
  EXPECT_LT(d, 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST(Haar, FourDimMoments) {
  // |a_k|^2 ~ Beta(1, 3): mean 1/4, variance 3/80.
  RandomStream r(12);
  const int n = 100000;
  std::array<double, 4> s{};
  for (int t = 0; t < n; ++t) {
    const auto phi = haar_ray<4>(r);
    for (int k = 0; k < 4; ++k) s[k] += std::norm(phi[k]);
  }
  const double sigma = std::sqrt(3.0 / 80.0 / n);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(s[k] / n, 0.25, 3 * sigma) << k;
}

TEST(Transfer, OrthogonalityIdentity) {
  RandomStream r(13);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const auto phi = haar_ray<4>(r);
    const auto psi = random_vec2(r);
    const auto to_i = transfer_matrix(phi).apply(psi);
    const auto to_j = transfer_matrix_to_j(phi).apply(psi);
    const double s = vnorm(psi);
    worst = std::max(worst, std::abs(clause_overlap(phi, to_i, psi)) / (s * s));
    worst = std::max(worst, std::abs(clause_overlap(phi, psi, to_j)) / (s * s));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Transfer, ClassicalZeroZero) {
  const auto phi = Ray4::basis(0);
  const auto t = transfer_matrix(phi);
  EXPECT_NEAR(std::abs(t.det()), 0.0, 1e-15);
  EXPECT_GT(t.frobenius(), 0.5);
  const auto out = t.apply({cplx(0.6), cplx(0.8)});
  EXPECT_NEAR(std::abs(out[0]), 0.0, 1e-15);
  EXPECT_GT(std::abs(out[1]), 0.1);
  const auto zero = t.apply({cplx(0), cplx(1)});
  EXPECT_EQ(vnorm(zero), 0.0);
}

TEST(Transfer, ClauseFormConvention) {
  RandomStream r(14);
  const auto phi = haar_ray<4>(r);
  const auto c = clause_form(phi);
  const auto x = random_vec2(r), y = random_vec2(r);
  cplx direct = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) direct += std::conj(phi[2 * a + b]) * x[a] * y[b];
  cplx form = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) form += x[a] * c(a, b) * y[b];
  EXPECT_NEAR(std::abs(direct - form), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(direct - clause_overlap(phi, x, y)), 0.0, 1e-14);
}

TEST(Nullspace, SpecExamples) {
  EXPECT_EQ(nullspace(Eigen::MatrixXcd::Identity(2, 2)).dimension, 0u);
  Eigen::MatrixXcd eps(2, 2);
  eps << 0, 1, -1, 0;
  EXPECT_EQ(nullspace(eps).dimension, 0u);
  RandomStream r(15);
  const auto p = projector(haar_ray<4>(r));
  const auto ns = nullspace(p);
  EXPECT_EQ(ns.dimension, 3u);
  EXPECT_EQ(ns.rank, 1u);
  EXPECT_LT((p * ns.basis).norm(), 1e-12);
  EXPECT_LT((ns.basis.adjoint() * ns.basis - Eigen::MatrixXcd::Identity(3, 3)).norm(), 1e-12);
}

TEST(Nullspace, KnownRankTallAndWide) {
  RandomStream r(16);
  for (int rank = 0; rank <= 5; ++rank) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(12, 8);
    for (int k = 0; k < rank; ++k) {
      Eigen::VectorXcd u(12), v(8);
      for (auto& x : u) x = cplx(r.normal(), r.normal());
      for (auto& x : v) x = cplx(r.normal(), r.normal());
      a += u * v.adjoint();
    }
    const auto tall = nullspace(a);
    EXPECT_EQ(tall.dimension, 8u - rank);
    if (tall.dimension) { EXPECT_LT((a * tall.basis).norm(), 1e-9); }
    const Eigen::MatrixXcd wide = a.adjoint();
    EXPECT_EQ(nullspace(wide).dimension, 12u - rank);
  }
}

TEST(Nullspace, AbsoluteFloor) {
  Eigen::MatrixXcd noise = Eigen::MatrixXcd::Zero(3, 3);
  noise(0, 1) = 1e-16;
  EXPECT_EQ(nullspace(noise).dimension, 2u);
  EXPECT_EQ(nullspace(noise, kDefaultRankTolerance, 1e-9).dimension, 3u);
  EXPECT_EQ(nullspace(Eigen::MatrixXcd::Zero(2, 2)).dimension, 2u);
}

TEST(Nullspace, Errors) {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(nullspace(bad), std::invalid_argument);
  EXPECT_THROW(nullspace(Eigen::MatrixXcd::Identity(2, 2), 0.0), std::invalid_argument);
}

TEST(CommonEigenvector, Diagonal) {
  const std::vector<Mat2> mats{Mat2::diag(1, 2), Mat2::diag(3, 4)};
  const auto v = common_eigenvector(mats);
  ASSERT_TRUE(v.has_value());
  EXPECT_TRUE(v->is_basis_state());
}

TEST(CommonEigenvector, EpsilonSwaps) {
  const std::vector<Mat2> mats{Mat2::diag(1, 2), Mat2::epsilon()};
  EXPECT_FALSE(common_eigenvector(mats).has_value());
}

TEST(CommonEigenvector, SingleRandom) {
  RandomStream r(17);
  for (int t = 0; t < 200; ++t) {
    Mat2 m;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(a, b) = cplx(r.normal(), r.normal());
    const std::vector<Mat2> mats{m};
    const auto v = common_eigenvector(mats);
    ASSERT_TRUE(v.has_value());
    const Vec2 x{(*v)[0], (*v)[1]};
    const auto mx = m.apply(x);
    const cplx lambda = std::conj(x[0]) * mx[0] + std::conj(x[1]) * mx[1];
    const Vec2 res{mx[0] - lambda * x[0], mx[1] - lambda * x[1]};
    EXPECT_LT(vnorm(res), 1e-9 * m.frobenius());
  }
}

TEST(CommonEigenvector, ScalarAndDefective) {
  const std::vector<Mat2> scalar{Mat2::identity()};
  EXPECT_TRUE(common_eigenvector(scalar).has_value());
  Mat2 jordan = Mat2::identity();
  jordan(0, 1) = 1;
  const auto ev = eigenvectors(jordan);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_TRUE(ev[0] == Ray2::basis(0));
}
