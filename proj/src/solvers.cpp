#include "cgcv/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cgcv/errors.hpp"

namespace cgcv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const MatrixXd& X, const VectorXd& y) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw Error(ErrorKind::InvalidInput, "design must have at least one row and one column");
  }
  if (X.rows() != y.size()) {
    throw Error(ErrorKind::InvalidInput, "design rows and response length differ");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "non-finite entries in design or response");
  }
}

void check_lambda(double lambda, const char* name) {
  if (std::isnan(lambda) || lambda < 0.0 || lambda == -kInf) {
    throw Error(ErrorKind::InvalidInput, std::string(name) + " must be nonnegative");
  }
}

FitResult null_fit(Eigen::Index p) {
  FitResult r;
  r.beta = VectorXd::Zero(p);
  return r;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Ridge: return "ridge";
    case PenaltyKind::Ridgeless: return "ridgeless";
    case PenaltyKind::Lasso: return "lasso";
    case PenaltyKind::ElasticNet: return "elastic_net";
  }
  return "unknown";
}

void PenaltyConfig::validate() const {
  switch (kind) {
    case PenaltyKind::Ridge:
    case PenaltyKind::Lasso:
      check_lambda(lambda, "lambda");
      break;
    case PenaltyKind::Ridgeless:
      if (lambda != 0.0) throw Error(ErrorKind::InvalidInput, "ridgeless requires lambda = 0");
      break;
    case PenaltyKind::ElasticNet:
      check_lambda(lambda1, "lambda1");
      check_lambda(lambda2, "lambda2");
      if (!(lambda2 > 0.0)) throw Error(ErrorKind::InvalidInput, "elastic net requires lambda2 > 0");
      break;
  }
}

double PenaltyConfig::primary_lambda() const {
  return kind == PenaltyKind::ElasticNet ? lambda1 : lambda;
}

double ridge_trace(const MatrixXd& gram_over_k, double lambda) {
  if (gram_over_k.rows() == 0 || lambda == kInf) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram_over_k, Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (double d : es.eigenvalues()) {
    d = std::max(d, 0.0);
    if (d > 0.0) tr += d / (d + lambda);
  }
  return tr;
}

// ---------------------------------------------------------------- ridge

RidgeSolver::RidgeSolver(MatrixXd X_sub, VectorXd y_sub)
    : X_(std::move(X_sub)), y_(std::move(y_sub)) {
  check_inputs(X_, y_);
}

void RidgeSolver::ensure_spectrum() const {
  if (have_spectrum_) return;
  const auto k = X_.rows();
  const auto p = X_.cols();
  const double kd = static_cast<double>(k);
  kernel_route_ = k < p;
  const Eigen::Index dim = kernel_route_ ? k : p;
  MatrixXd gram = MatrixXd::Zero(dim, dim);
  if (kernel_route_) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(X_, 1.0 / kd);
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(X_.transpose(), 1.0 / kd);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "eigendecomposition of subsample gram failed");
  }
  evals_ = es.eigenvalues().cwiseMax(0.0);
  evecs_ = es.eigenvectors();
  if (kernel_route_) {
    proj_ = evecs_.transpose() * y_ / kd;
  } else {
    proj_ = evecs_.transpose() * (X_.transpose() * y_) / kd;
  }
  have_spectrum_ = true;
}

FitResult RidgeSolver::finish(VectorXd beta, double df, double lambda) const {
  const double kd = static_cast<double>(X_.rows());
  FitResult r;
  const VectorXd resid = y_ - X_ * beta;
  const VectorXd xtr = X_.transpose() * resid / kd;
  // Normal equations: (X^T X / k + lambda I) b - X^T y / k = lambda b - X^T r / k.
  r.kkt_residual = (lambda * beta - xtr).cwiseAbs().maxCoeff();
  r.objective_value = 0.5 * resid.squaredNorm() / kd + 0.5 * lambda * beta.squaredNorm();
  r.beta = std::move(beta);
  r.df = df;
  return r;
}

FitResult RidgeSolver::fit_ridgeless() const {
  Eigen::BDCSVD<MatrixXd> svd(X_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  const double cutoff = (s.size() > 0 ? s(0) : 0.0) *
                        static_cast<double>(std::max(X_.rows(), X_.cols())) *
                        std::numeric_limits<double>::epsilon();
  const VectorXd uty = svd.matrixU().transpose() * y_;
  VectorXd coef = VectorXd::Zero(s.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) {
      coef(i) = uty(i) / s(i);
      ++rank;
    }
  }
  return finish(svd.matrixV() * coef, static_cast<double>(rank), 0.0);
}

FitResult RidgeSolver::fit(double lambda) const {
  check_lambda(lambda, "lambda");
  if (lambda == kInf) return null_fit(X_.cols());
  if (lambda == 0.0) return fit_ridgeless();
  ensure_spectrum();
  VectorXd scaled(evals_.size());
  double df = 0.0;
  for (Eigen::Index i = 0; i < evals_.size(); ++i) {
    scaled(i) = proj_(i) / (evals_(i) + lambda);
    if (evals_(i) > 0.0) df += evals_(i) / (evals_(i) + lambda);
  }
  VectorXd beta = kernel_route_ ? VectorXd(X_.transpose() * (evecs_ * scaled))
                                : VectorXd(evecs_ * scaled);
  return finish(std::move(beta), df, lambda);
}

FitResult fit_ridge(const MatrixXd& X_sub, const VectorXd& y_sub, double lambda) {
  check_inputs(X_sub, y_sub);
  check_lambda(lambda, "lambda");
  if (lambda == kInf) return null_fit(X_sub.cols());
  return RidgeSolver(X_sub, y_sub).fit(lambda);
}

// ------------------------------------------------ lasso / elastic net

namespace {

FitResult coordinate_descent(const MatrixXd& X, const VectorXd& y, double l1, double l2,
                             const SolverOptions& opts, const VectorXd* warm_start) {
  const auto p = X.cols();
  const double kd = static_cast<double>(X.rows());
  if (l1 == kInf || l2 == kInf) return null_fit(p);

  MatrixXd gram = MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / kd);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const VectorXd corr = X.transpose() * y / kd;

  VectorXd beta = VectorXd::Zero(p);
  if (warm_start != nullptr && warm_start->size() == p && warm_start->allFinite()) {
    beta = *warm_start;
  }
  // grad = X^T (y - X beta) / k
  VectorXd grad = corr - gram * beta;

  int sweep = 0;
  bool converged = false;
  while (sweep < opts.max_iter) {
    ++sweep;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double gjj = gram(j, j);
      const double old = beta(j);
      double updated = 0.0;
      if (gjj + l2 > 0.0) {
        updated = soft_threshold(grad(j) + gjj * old, l1) / (gjj + l2);
      }
      const double delta = updated - old;
      if (delta != 0.0) {
        beta(j) = updated;
        grad.noalias() -= gram.col(j) * delta;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "coordinate descent did not converge in " << opts.max_iter << " sweeps";
    throw ConvergenceError(msg.str(), beta);
  }

  FitResult r;
  grad = corr - gram * beta;
  double kkt = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::abs(beta(j)) > opts.active_threshold) {
      r.active_set.push_back(static_cast<int>(j));
      const double sign = beta(j) > 0.0 ? 1.0 : -1.0;
      kkt = std::max(kkt, std::abs(grad(j) - l2 * beta(j) - l1 * sign));
    } else {
      kkt = std::max(kkt, std::max(0.0, std::abs(grad(j)) - l1));
    }
  }
  r.kkt_residual = kkt;
  r.iterations = sweep;
  r.objective_value = 0.5 * (y - X * beta).squaredNorm() / kd + l1 * beta.lpNorm<1>() +
                      0.5 * l2 * beta.squaredNorm();
  if (l2 == 0.0) {
    r.df = static_cast<double>(r.active_set.size());
  } else if (!r.active_set.empty()) {
    const Eigen::Index s = static_cast<Eigen::Index>(r.active_set.size());
    MatrixXd sub(s, s);
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = 0; b < s; ++b) {
        sub(a, b) = gram(r.active_set[a], r.active_set[b]);
      }
    }
    r.df = ridge_trace(sub, l2);
  }
  r.beta = std::move(beta);
  return r;
}

}  // namespace

FitResult fit_lasso(const MatrixXd& X_sub, const VectorXd& y_sub, double lambda,
                    const SolverOptions& opts, const VectorXd* warm_start) {
  check_inputs(X_sub, y_sub);
  check_lambda(lambda, "lambda");
  return coordinate_descent(X_sub, y_sub, lambda, 0.0, opts, warm_start);
}

FitResult fit_elastic_net(const MatrixXd& X_sub, const VectorXd& y_sub, double lambda1,
                          double lambda2, const SolverOptions& opts,
                          const VectorXd* warm_start) {
  check_inputs(X_sub, y_sub);
  PenaltyConfig::elastic_net(lambda1, lambda2).validate();
  return coordinate_descent(X_sub, y_sub, lambda1, lambda2, opts, warm_start);
}

FitResult fit_penalized(const MatrixXd& X_sub, const VectorXd& y_sub,
                        const PenaltyConfig& penalty, const SolverOptions& opts,
                        const VectorXd* warm_start) {
  penalty.validate();
  switch (penalty.kind) {
    case PenaltyKind::Ridge: return fit_ridge(X_sub, y_sub, penalty.lambda);
    case PenaltyKind::Ridgeless: return fit_ridge(X_sub, y_sub, 0.0);
    case PenaltyKind::Lasso: return fit_lasso(X_sub, y_sub, penalty.lambda, opts, warm_start);
    case PenaltyKind::ElasticNet:
      return fit_elastic_net(X_sub, y_sub, penalty.lambda1, penalty.lambda2, opts, warm_start);
  }
  throw Error(ErrorKind::InvalidInput, "unknown penalty kind");
}

// ------------------------------------------------------------ df oracle

double df_finite_difference_oracle(const Fitter& fitter, const MatrixXd& X_sub,
                                   const VectorXd& y_sub, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  const FitResult base = fitter(X_sub, y_sub);
  const VectorXd pred = X_sub * base.beta;
  double trace = 0.0;
  VectorXd y = y_sub;
  for (Eigen::Index i = 0; i < X_sub.rows(); ++i) {
    y(i) += eps;
    const FitResult bumped = fitter(X_sub, y);
    y(i) = y_sub(i);
    if (bumped.active_set != base.active_set) {
      throw Error(ErrorKind::NonGenericPoint,
                  "active set changed when perturbing response " + std::to_string(i));
    }
    trace += (X_sub.row(i).dot(bumped.beta) - pred(i)) / eps;
  }
  return trace;
}

}  // namespace cgcv
