#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cgcv/datagen.hpp"
#include "cgcv/errors.hpp"
#include "test_util.hpp"

using namespace cgcv;

namespace {

MatrixXd sample_cov(const MatrixXd& X) { return X.transpose() * X / static_cast<double>(X.rows()); }

double op_norm(const MatrixXd& A) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(A).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("evenly spaced spectrum") {
  SpectrumSpec s;
  const VectorXd d = s.diagonal(500);
  CHECK(d(0) == 0.1);
  CHECK(d(499) == doctest::Approx(10.0).epsilon(1e-15));
  for (int j = 0; j < 500; ++j) CHECK(d(j) == doctest::Approx(0.1 + j * (9.9 / 499)).epsilon(1e-14));
}

TEST_CASE("gaussian linear design: beta0 scaling and sparsity") {
  for (double snr : {0.5, 1.0, 4.0}) {
    GaussianLinearSpec spec;
    spec.n = 100;
    spec.p = 125;
    spec.snr = snr;
    spec.sigma2 = 2.0;
    spec.sparsity_tail = 25;
    const auto d = gen_gaussian_linear(spec, 7);
    const double energy = d.oracle.beta0.dot(d.oracle.Sigma * d.oracle.beta0);
    CHECK(std::abs(energy - snr * spec.sigma2) <= 1e-10);
    CHECK(d.oracle.beta0.tail(25).isZero(0.0));
    CHECK((d.oracle.beta0.head(100).array() != 0.0).all());
    CHECK(d.oracle.sigma2 == 2.0);
    CHECK(d.train.X.rows() == 100);
    CHECK(d.test.X.rows() == 0);
  }
}

TEST_CASE("gaussian linear design: sample moments converge") {
  GaussianLinearSpec spec;
  spec.p = 20;
  spec.n = 50 * spec.p;
  spec.sparsity_tail = 4;
  const auto d = gen_gaussian_linear(spec, 11, 20000);
  // At n = 50p the relative error sits near 2 sqrt(p / n) ~ 0.28 times the
  // effective-rank factor; 0.1 needs roughly n = 400p.
  const double err50 = op_norm(sample_cov(d.train.X) - d.oracle.Sigma) / op_norm(d.oracle.Sigma);
  CHECK(err50 < 0.25);
  GaussianLinearSpec big = spec;
  big.n = 400 * spec.p;
  const auto db = gen_gaussian_linear(big, 12);
  const double err400 = op_norm(sample_cov(db.train.X) - db.oracle.Sigma) / op_norm(db.oracle.Sigma);
  CHECK(err400 < 0.1);
  CHECK(err400 < err50);
  // Response variance = signal + noise = (snr + 1) sigma^2.
  const VectorXd& yt = d.test.y;
  CHECK(yt.squaredNorm() / yt.size() == doctest::Approx(2.0).epsilon(0.05));
  const VectorXd noise = yt - d.test.X * d.oracle.beta0;
  CHECK(noise.squaredNorm() / noise.size() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("datasets are bitwise reproducible under the seed") {
  GaussianLinearSpec spec;
  spec.n = 30;
  spec.p = 10;
  spec.sparsity_tail = 2;
  const auto a = gen_gaussian_linear(spec, 5, 10);
  const auto b = gen_gaussian_linear(spec, 5, 10);
  const auto c = gen_gaussian_linear(spec, 6, 10);
  CHECK(a.train.X == b.train.X);
  CHECK(a.train.y == b.train.y);
  CHECK(a.test.y == b.test.y);
  CHECK(a.oracle.beta0 == b.oracle.beta0);
  CHECK(a.train.X != c.train.X);
  // The held-out set does not perturb the training draw.
  CHECK(gen_gaussian_linear(spec, 5, 0).train.X == a.train.X);

  NonlinearAR1Spec nl;
  nl.n = 25;
  nl.p = 8;
  CHECK(gen_nonlinear_ar1(nl, 3).train.y == gen_nonlinear_ar1(nl, 3).train.y);
}

TEST_CASE("invalid designs are rejected") {
  GaussianLinearSpec spec;
  spec.n = 10;
  spec.p = 5;
  spec.sparsity_tail = 5;
  CHECK_THROWS_AS(gen_gaussian_linear(spec, 1), Error);
  spec.sparsity_tail = 0;
  spec.snr = -1;
  CHECK_THROWS_AS(gen_gaussian_linear(spec, 1), Error);
  NonlinearAR1Spec nl;
  nl.n = 10;
  nl.p = 5;
  nl.rho = 1.0;
  CHECK_THROWS_AS(gen_nonlinear_ar1(nl, 1), Error);
  nl.rho = 0.2;
  nl.feature_law = {FeatureLaw::Kind::ScaledHeavyTail, 4.0};
  CHECK_THROWS_AS(gen_nonlinear_ar1(nl, 1), Error);
}

TEST_CASE("AR(1) covariance and its best linear projection") {
  const MatrixXd S = ar1_covariance(6, 0.25);
  CHECK(S(0, 0) == 1.0);
  CHECK(S(2, 4) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(S(5, 0) == doctest::Approx(std::pow(0.25, 5)).epsilon(1e-15));
  CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(S).eigenvalues().minCoeff() > 0.0);

  const MatrixXd big = ar1_covariance(200, 0.25);
  const VectorXd b = ar1_top_eigen_direction(big, 0.25);
  CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b(0) > 0.0);
  // Energy close to the top eigenvalue (1 + rho) / (1 - rho).
  CHECK(b.dot(big * b) == doctest::Approx(5.0 / 3.0).epsilon(0.01));

  SUBCASE("rho = 0 breaks ties by coordinate order") {
    const VectorXd e = ar1_top_eigen_direction(MatrixXd::Identity(10, 10), 0.0);
    for (int i = 0; i < 5; ++i) CHECK(e(i) == doctest::Approx(1 / std::sqrt(5.0)));
    CHECK(e.tail(5).isZero(0.0));
  }
}

TEST_CASE("nonlinear design: residual energy and linearized SNR") {
  NonlinearAR1Spec spec;
  spec.p = 60;
  spec.n = 10;
  const auto d = gen_nonlinear_ar1(spec, 21, 200000);
  // Unit diagonal: E ||x||^2 / p = 1, so the nonlinear term is centred.
  const VectorXd q = d.test.X.rowwise().squaredNorm() / spec.p;
  CHECK(q.mean() == doctest::Approx(1.0).epsilon(0.005));
  const VectorXd resid = d.test.y - d.test.X * d.beta0;
  CHECK(resid.squaredNorm() / resid.size() == doctest::Approx(d.fnl_energy).epsilon(0.02));
  CHECK(std::abs(resid.mean()) < 0.01);

  SUBCASE("heavy-tailed features") {
    NonlinearAR1Spec h = spec;
    h.feature_law = {FeatureLaw::Kind::ScaledHeavyTail, 6.0};
    const auto dh = gen_nonlinear_ar1(h, 22, 200000);
    CHECK(dh.fnl_energy > d.fnl_energy);
    const VectorXd r = dh.test.y - dh.test.X * dh.beta0;
    CHECK(r.squaredNorm() / r.size() == doctest::Approx(dh.fnl_energy).epsilon(0.03));
    CHECK(sample_cov(dh.test.X).diagonal().mean() == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("linearized SNR at n = 6000, p = 1200 by Monte Carlo") {
    NonlinearAR1Spec big;
    big.n = 6000;
    big.p = 1200;
    big.rho = 0.25;
    const auto db = gen_nonlinear_ar1(big, 23);
    const VectorXd r = db.train.y - db.train.X * db.beta0;
    const double snr = db.beta0.dot(db.Sigma * db.beta0) / (r.squaredNorm() / r.size());
    CHECK(std::abs(snr - 1.67) <= 0.05);
  }
}

TEST_CASE("dataset CSV round trip is exact") {
  GaussianLinearSpec spec;
  spec.n = 17;
  spec.p = 5;
  spec.sparsity_tail = 1;
  const auto d = gen_gaussian_linear(spec, 3);
  const auto path = (std::filesystem::temp_directory_path() / "cgcv_dataset_roundtrip.csv").string();
  write_dataset_csv(path, d.train);
  const Dataset back = read_dataset_csv(path);
  CHECK(back.X == d.train.X);
  CHECK(back.y == d.train.y);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_dataset_csv(path), Error);
}
