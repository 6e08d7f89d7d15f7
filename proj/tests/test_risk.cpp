#include <doctest.h>

#include <cmath>
#include <limits>

#include "cgcv/ensemble.hpp"
#include "cgcv/errors.hpp"
#include "cgcv/risk.hpp"
#include "test_util.hpp"

using namespace cgcv;
using cgcv::testing::gaussian_matrix;
using cgcv::testing::gaussian_vector;
using cgcv::testing::rel_diff;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 0/1 diagonal mask of a subset, as an n-vector.
VectorXd mask(const IndexSet& s) {
  VectorXd d = VectorXd::Zero(s.universe());
  for (int i : s) d(i) = 1.0;
  return d;
}

struct Instance {
  MatrixXd X;
  VectorXd y;
  EnsembleFit fit;
};

Instance make_instance(int n, int p, int k, int M, const PenaltyConfig& pen, std::uint64_t seed) {
  Instance in;
  in.X = gaussian_matrix(n, p, seed);
  in.y = in.X * VectorXd::LinSpaced(p, 1.0, -0.5) + gaussian_vector(n, seed + 1);
  in.fit = fit_ensemble(in.X, in.y, pen, draw_subsamples(n, k, M, seed + 2));
  return in;
}

// Brute-force masked versions, built from the raw fits and the data.
double masked_sub(const Instance& in, int m, int l) {
  const auto& a = in.fit[m];
  const auto& b = in.fit[l];
  const VectorXd both = mask(a.subset).cwiseProduct(mask(b.subset));
  const VectorXd ra = in.y - in.X * a.fit.beta;
  const VectorXd rb = in.y - in.X * b.fit.beta;
  const double num = ra.cwiseProduct(both).dot(rb) / both.sum();
  return num / ((1 - a.fit.df / mask(a.subset).sum()) * (1 - b.fit.df / mask(b.subset).sum()));
}

double masked_full(const Instance& in, int m, int l) {
  const auto& a = in.fit[m];
  const auto& b = in.fit[l];
  const double n = in.X.rows();
  const double ka = mask(a.subset).sum();
  const double kb = mask(b.subset).sum();
  const double both = mask(a.subset).dot(mask(b.subset));
  const VectorXd ra = in.y - in.X * a.fit.beta;
  const VectorXd rb = in.y - in.X * b.fit.beta;
  const double den = 1 - a.fit.df / n - b.fit.df / n + a.fit.df * b.fit.df / (ka * kb) * both / n;
  return ra.dot(rb) / n / den;
}

double masked_gcv(const Instance& in) {
  const double n = in.X.rows();
  VectorXd beta = VectorXd::Zero(in.X.cols());
  double tdf = 0.0;
  for (int m = 0; m < in.fit.M(); ++m) {
    beta += in.fit[m].fit.beta;
    tdf += in.fit[m].fit.df;
  }
  beta /= in.fit.M();
  tdf /= in.fit.M();
  const double d = 1 - tdf / n;
  return (in.y - in.X * beta).squaredNorm() / n / (d * d);
}

}  // namespace

TEST_CASE("gcv of the null predictor is the mean square of y") {
  const MatrixXd X = gaussian_matrix(20, 3, 1);
  const VectorXd y = gaussian_vector(20, 2);
  const EnsembleFit e = fit_ensemble(X, y, PenaltyConfig::ridge(kInf), draw_subsamples(20, 10, 3, 3));
  CHECK(e.tdf() == 0.0);
  CHECK(gcv_full_data(e) == doctest::Approx(y.squaredNorm() / 20).epsilon(1e-15));
  CHECK(cgcv_correction(e, Variant::Full) == 0.0);
  CHECK(component_full(e, 0, 1) == doctest::Approx(y.squaredNorm() / 20).epsilon(1e-14));
  // Null predictors on both sides: mean of y^2 over the overlap.
  const IndexSet& a = e[0].subset;
  const IndexSet& b = e[1].subset;
  const VectorXd both = mask(a).cwiseProduct(mask(b));
  CHECK(component_sub(e, 0, 1) ==
        doctest::Approx(y.cwiseProduct(both).dot(y) / both.sum()).epsilon(1e-14));
}

TEST_CASE("M = 1, k = n reduces to ordinary GCV") {
  const Instance in = make_instance(30, 6, 30, 1, PenaltyConfig::ridge(0.3), 5);
  const FitResult f = fit_ridge(in.X, in.y, 0.3);
  const double ogcv = (in.y - in.X * f.beta).squaredNorm() / 30 / std::pow(1 - f.df / 30, 2);
  CHECK(gcv_full_data(in.fit) == doctest::Approx(ogcv).epsilon(1e-12));
  CHECK(component_sub(in.fit, 0, 0) == doctest::Approx(ogcv).epsilon(1e-12));
  CHECK(component_full(in.fit, 0, 0) == doctest::Approx(ogcv).epsilon(1e-12));
}

TEST_CASE("estimators match brute-force masked evaluation") {
  for (const PenaltyConfig& pen :
       {PenaltyConfig::ridge(0.5), PenaltyConfig::lasso(0.05), PenaltyConfig::elastic_net(0.05, 0.1)}) {
    const Instance in = make_instance(80, 10, 45, 3, pen, 17);
    const int M = in.fit.M();
    CHECK(gcv_full_data(in.fit) == doctest::Approx(masked_gcv(in)).epsilon(1e-12));
    double sub = 0.0;
    double full = 0.0;
    for (int m = 0; m < M; ++m) {
      for (int l = 0; l < M; ++l) {
        CHECK(rel_diff(component_sub(in.fit, m, l), masked_sub(in, m, l)) <= 1e-12);
        CHECK(rel_diff(component_full(in.fit, m, l), masked_full(in, m, l)) <= 1e-12);
        sub += masked_sub(in, m, l);
        full += masked_full(in, m, l);
      }
    }
    CHECK(rel_diff(intermediate_estimator(in.fit, Variant::Sub), sub / (M * M)) <= 1e-12);
    CHECK(rel_diff(intermediate_estimator(in.fit, Variant::Full), full / (M * M)) <= 1e-12);

    // Correction written out from its definition with the masked diagonal.
    const double n = 80;
    const double t = in.fit.tdf() / n;
    for (Variant v : {Variant::Sub, Variant::Full}) {
      double s = 0.0;
      for (int m = 0; m < M; ++m) {
        s += (n / 45 - 1) * (v == Variant::Sub ? masked_sub(in, m, m) : masked_full(in, m, m));
      }
      const double corr = (1.0 / M) * (t * t) / ((1 - t) * (1 - t)) * (s / M);
      CHECK(rel_diff(cgcv_correction(in.fit, v), corr) <= 1e-12);
      CHECK(rel_diff(cgcv::cgcv(in.fit, v), masked_gcv(in) - corr) <= 1e-12);
      CHECK(cgcv_correction(in.fit, v) >= 0.0);
    }
  }
}

TEST_CASE("gcv on the union matches a masked computation") {
  const Instance in = make_instance(60, 8, 30, 2, PenaltyConfig::ridge(1.0), 23);
  const VectorXd u = mask(in.fit[0].subset).cwiseMax(mask(in.fit[1].subset));
  const VectorXd r = in.y - in.X * in.fit.ensemble_beta();
  const double size = u.sum();
  const double expected =
      r.cwiseProduct(u).dot(r) / size / std::pow(1 - in.fit.tdf() / size, 2);
  CHECK(rel_diff(gcv_union(in.fit), expected) <= 1e-12);

  SUBCASE("k = n: the union is everything") {
    const Instance all = make_instance(40, 5, 40, 3, PenaltyConfig::ridge(1.0), 29);
    CHECK(gcv_union(all.fit) == doctest::Approx(gcv_full_data(all.fit)).epsilon(1e-14));
  }
  SUBCASE("M = 1: ordinary GCV on the subsample") {
    const Instance one = make_instance(40, 5, 25, 1, PenaltyConfig::ridge(1.0), 31);
    const IndexSet& s = one.fit[0].subset;
    const FitResult f = fit_ridge(take_rows(one.X, s), take_rows(one.y, s), 1.0);
    const double g =
        (take_rows(one.y, s) - take_rows(one.X, s) * f.beta).squaredNorm() / 25 / std::pow(1 - f.df / 25, 2);
    CHECK(gcv_union(one.fit) == doctest::Approx(g).epsilon(1e-12));
  }
}

TEST_CASE("at k = n every estimator coincides with gcv") {
  for (int M : {1, 3}) {
    for (double lambda : {0.01, 1.0}) {
      const Instance in = make_instance(60, 15, 60, M, PenaltyConfig::ridge(lambda), 37 + M);
      const double g = gcv_full_data(in.fit);
      CHECK(std::abs(cgcv::cgcv(in.fit, Variant::Sub) - g) <= 1e-10 * g);
      CHECK(std::abs(cgcv::cgcv(in.fit, Variant::Full) - g) <= 1e-10 * g);
      CHECK(std::abs(intermediate_estimator(in.fit, Variant::Sub) - g) <= 1e-10 * g);
      CHECK(std::abs(intermediate_estimator(in.fit, Variant::Full) - g) <= 1e-10 * g);
      CHECK(cgcv_correction(in.fit, Variant::Full) == 0.0);
      CHECK(component_full(in.fit, 0, 0) == doctest::Approx(component_sub(in.fit, 0, 0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("single-component identity behind the full correction") {
  // (k/n)(1 - d/k)^2 + (n - k)/n - ((n - k)/k)(d/n)^2 = (1 - d/n)^2
  Engine rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double n = 10 + std::floor(unit(rng) * 5000);
    const double k = 1 + std::floor(unit(rng) * n);
    const double d = unit(rng) * k;
    const double lhs = (k / n) * std::pow(1 - d / k, 2) + (n - k) / n - ((n - k) / k) * std::pow(d / n, 2);
    CHECK(std::abs(lhs - std::pow(1 - d / n, 2)) <= 1e-14);
  }
  SUBCASE("so cgcv_full equals the full intermediate estimator at M = 1") {
    for (int k : {20, 35, 59}) {
      const Instance in = make_instance(60, 12, k, 1, PenaltyConfig::ridge(0.2), 41 + k);
      CHECK(rel_diff(cgcv::cgcv(in.fit, Variant::Full), intermediate_estimator(in.fit, Variant::Full)) <= 1e-12);
    }
  }
}

TEST_CASE("identical subsets collapse the intermediate estimators") {
  const MatrixXd X = gaussian_matrix(50, 6, 43);
  const VectorXd y = gaussian_vector(50, 44);
  const IndexSet s = draw_subsamples(50, 30, 1, 45)[0];
  const EnsembleFit e = fit_ensemble(X, y, PenaltyConfig::ridge(0.5), {s, s});
  for (Variant v : {Variant::Sub, Variant::Full}) {
    CHECK(rel_diff(intermediate_estimator(e, v), component(e, v, 0, 0)) <= 1e-13);
  }
}

TEST_CASE("component estimators are symmetric in the pair") {
  const Instance in = make_instance(70, 9, 40, 4, PenaltyConfig::lasso(0.03), 47);
  for (int m = 0; m < 4; ++m) {
    for (int l = 0; l < 4; ++l) {
      CHECK(rel_diff(component_sub(in.fit, m, l), component_sub(in.fit, l, m)) <= 1e-14);
      CHECK(rel_diff(component_full(in.fit, m, l), component_full(in.fit, l, m)) <= 1e-14);
    }
  }
}

TEST_CASE("permuting components leaves every estimator unchanged") {
  const MatrixXd X = gaussian_matrix(60, 7, 53);
  const VectorXd y = gaussian_vector(60, 54);
  auto subsets = draw_subsamples(60, 35, 4, 55);
  const EnsembleFit a = fit_ensemble(X, y, PenaltyConfig::ridge(0.7), subsets);
  std::swap(subsets[0], subsets[3]);
  std::swap(subsets[1], subsets[2]);
  const EnsembleFit b = fit_ensemble(X, y, PenaltyConfig::ridge(0.7), subsets);
  CHECK(rel_diff(gcv_full_data(a), gcv_full_data(b)) <= 1e-13);
  CHECK(rel_diff(gcv_union(a), gcv_union(b)) <= 1e-13);
  for (Variant v : {Variant::Sub, Variant::Full}) {
    CHECK(rel_diff(cgcv::cgcv(a, v), cgcv::cgcv(b, v)) <= 1e-13);
    CHECK(rel_diff(intermediate_estimator(a, v), intermediate_estimator(b, v)) <= 1e-13);
  }
}

TEST_CASE("empty overlaps fail only the sub variant") {
  const MatrixXd X = gaussian_matrix(20, 3, 61);
  const VectorXd y = gaussian_vector(20, 62);
  std::vector<int> lo;
  std::vector<int> hi;
  for (int i = 0; i < 10; ++i) {
    lo.push_back(i);
    hi.push_back(i + 10);
  }
  const EnsembleFit e =
      fit_ensemble(X, y, PenaltyConfig::ridge(0.5), {IndexSet(lo, 20), IndexSet(hi, 20)});
  try {
    component_sub(e, 0, 1);
    FAIL("expected EmptyOverlap");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::EmptyOverlap);
  }
  CHECK(std::isfinite(component_full(e, 0, 1)));

  const RiskReport r = risk_report(e);
  REQUIRE(r.r_sub.has_value());
  CHECK(r.r_sub->status == Status::EmptyOverlap);
  CHECK(std::isnan(r.r_sub->value));
  CHECK(std::isnan(r.component_matrix_sub(0, 1)));
  CHECK(r.r_full->ok());
  CHECK(r.cgcv_sub.ok());  // only needs the diagonal
  CHECK(r.cgcv_full.ok());
}

TEST_CASE("ridgeless with df = k gives a degenerate sub denominator") {
  const MatrixXd X = gaussian_matrix(40, 10, 71);
  const VectorXd y = gaussian_vector(40, 72);
  const EnsembleFit e = fit_ensemble(X, y, PenaltyConfig::ridgeless(), draw_subsamples(40, 10, 2, 73));
  CHECK(e[0].fit.df == 10.0);
  CHECK_THROWS_AS(component_sub(e, 0, 0), Error);
  const RiskReport r = risk_report(e);
  CHECK(r.cgcv_sub.status == Status::Degenerate);
  CHECK(std::isnan(r.cgcv_sub.value));
  CHECK(r.cgcv_full.ok());
  CHECK(std::isfinite(r.cgcv_full.value));
}

TEST_CASE("risk report agrees with the individual estimators") {
  const Instance in = make_instance(90, 12, 50, 5, PenaltyConfig::ridge(0.4), 81);
  const RiskReport r = risk_report(in.fit);
  CHECK(r.M == 5);
  CHECK(r.n == 90);
  CHECK(r.tdf == in.fit.tdf());
  CHECK(r.gcv_full_data.value == gcv_full_data(in.fit));
  CHECK(r.gcv_union.value == gcv_union(in.fit));
  CHECK(rel_diff(r.r_sub->value, intermediate_estimator(in.fit, Variant::Sub)) <= 1e-14);
  CHECK(rel_diff(r.r_full->value, intermediate_estimator(in.fit, Variant::Full)) <= 1e-14);
  CHECK(rel_diff(r.cgcv_sub.value, cgcv::cgcv(in.fit, Variant::Sub)) <= 1e-14);
  CHECK(rel_diff(r.cgcv_full.value, cgcv::cgcv(in.fit, Variant::Full)) <= 1e-14);
  CHECK(rel_diff(r.correction_full.value, cgcv_correction(in.fit, Variant::Full)) <= 1e-14);
  CHECK(r.component_matrix_full.rows() == 5);
  CHECK((r.component_matrix_full - r.component_matrix_full.transpose()).norm() == 0.0);

  ReportOptions lean;
  lean.intermediates = false;
  const RiskReport q = risk_report(in.fit, lean);
  CHECK_FALSE(q.r_sub.has_value());
  CHECK_FALSE(q.r_full.has_value());
  CHECK(q.cgcv_full.value == r.cgcv_full.value);
  CHECK(std::isnan(q.component_matrix_full(0, 1)));
  CHECK(std::isfinite(q.component_matrix_full(1, 1)));
}
