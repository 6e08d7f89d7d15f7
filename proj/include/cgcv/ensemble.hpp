#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cgcv/sampling.hpp"
#include "cgcv/solvers.hpp"

namespace cgcv {

struct EnsembleComponent {
  IndexSet subset;
  FitResult fit;
  VectorXd full_residual;  // y - X beta_m over all n rows
};

/// M component fits and their average. Built through assemble(), which keeps
/// tdf and ensemble_beta consistent with the components.
class EnsembleFit {
 public:
  static EnsembleFit assemble(std::vector<EnsembleComponent> components);

  int M() const noexcept { return static_cast<int>(components_.size()); }
  int n() const noexcept { return n_; }
  const std::vector<EnsembleComponent>& components() const noexcept { return components_; }
  const EnsembleComponent& operator[](int m) const {
    return components_[static_cast<std::size_t>(m)];
  }
  double tdf() const noexcept { return tdf_; }
  const VectorXd& ensemble_beta() const noexcept { return ensemble_beta_; }
  // y - X * ensemble_beta, as the mean of component residuals.
  const VectorXd& ensemble_residual() const noexcept { return ensemble_residual_; }

  // The ensemble made of the first M components.
  EnsembleFit prefix(int M) const;

 private:
  std::vector<EnsembleComponent> components_;
  int n_ = 0;
  double tdf_ = 0.0;
  VectorXd ensemble_beta_;
  VectorXd ensemble_residual_;
};

MatrixXd take_rows(const MatrixXd& X, const IndexSet& rows);
VectorXd take_rows(const VectorXd& y, const IndexSet& rows);

EnsembleComponent make_component(const MatrixXd& X, const VectorXd& y, IndexSet subset,
                                 FitResult fit);

/// Fits one estimator per subset (same penalty for all) and assembles the
/// ensemble. Solver failures are rethrown tagged with the component index.
EnsembleFit fit_ensemble(const MatrixXd& X, const VectorXd& y, const PenaltyConfig& penalty,
                         const std::vector<IndexSet>& subsets, const SolverOptions& opts = {});

}  // namespace cgcv
