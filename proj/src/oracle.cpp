#include "cgcv/oracle.hpp"

#include "cgcv/errors.hpp"

namespace cgcv {

double risk_component(const LinearModelOracle& oracle, const VectorXd& beta_m,
                      const VectorXd& beta_l) {
  const auto p = oracle.beta0.size();
  if (beta_m.size() != p || beta_l.size() != p || oracle.Sigma.rows() != p ||
      oracle.Sigma.cols() != p) {
    throw Error(ErrorKind::InvalidInput, "risk_component: dimension mismatch");
  }
  const VectorXd dm = beta_m - oracle.beta0;
  const VectorXd dl = beta_l - oracle.beta0;
  return dm.dot(oracle.Sigma * dl) + oracle.sigma2;
}

double true_risk(const LinearModelOracle& oracle, const VectorXd& beta) {
  return risk_component(oracle, beta, beta);
}

double true_risk(const LinearModelOracle& oracle, const EnsembleFit& fit) {
  return true_risk(oracle, fit.ensemble_beta());
}

double empirical_risk(const TestSet& test, const VectorXd& beta) {
  if (test.X.rows() < 1 || test.X.rows() != test.y.size() || test.X.cols() != beta.size()) {
    throw Error(ErrorKind::InvalidInput, "empirical_risk: bad test set shape");
  }
  return (test.y - test.X * beta).squaredNorm() / static_cast<double>(test.y.size());
}

double empirical_risk(const TestSet& test, const EnsembleFit& fit) {
  return empirical_risk(test, fit.ensemble_beta());
}

}  // namespace cgcv
