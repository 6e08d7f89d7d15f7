#pragma once

#include <Eigen/Dense>

#include "cgcv/ensemble.hpp"

namespace cgcv {

/// Population law of a linear model y = x^T beta0 + noise, x ~ (0, Sigma).
struct LinearModelOracle {
  MatrixXd Sigma;
  VectorXd beta0;
  double sigma2 = 1.0;
};

struct TestSet {
  MatrixXd X;
  VectorXd y;
};

/// (beta_m - beta0)^T Sigma (beta_l - beta0) + sigma^2.
double risk_component(const LinearModelOracle& oracle, const VectorXd& beta_m,
                      const VectorXd& beta_l);

/// Conditional prediction risk of the ensemble average.
double true_risk(const LinearModelOracle& oracle, const EnsembleFit& fit);
double true_risk(const LinearModelOracle& oracle, const VectorXd& beta);

/// Mean squared prediction error of the ensemble on a held-out set.
double empirical_risk(const TestSet& test, const EnsembleFit& fit);
double empirical_risk(const TestSet& test, const VectorXd& beta);

}  // namespace cgcv
