#include "cgcv/ensemble.hpp"

#include <string>

#include "cgcv/errors.hpp"

namespace cgcv {

EnsembleFit EnsembleFit::assemble(std::vector<EnsembleComponent> components) {
  if (components.empty()) throw Error(ErrorKind::InvalidInput, "ensemble needs M >= 1");
  EnsembleFit e;
  e.n_ = static_cast<int>(components.front().full_residual.size());
  const auto p = components.front().fit.beta.size();
  e.ensemble_beta_ = VectorXd::Zero(p);
  e.ensemble_residual_ = VectorXd::Zero(e.n_);
  double df_sum = 0.0;
  for (const auto& c : components) {
    if (c.fit.beta.size() != p || c.full_residual.size() != e.n_ || c.subset.universe() != e.n_) {
      throw Error(ErrorKind::InvalidInput, "ensemble components have inconsistent shapes");
    }
    e.ensemble_beta_ += c.fit.beta;
    e.ensemble_residual_ += c.full_residual;
    df_sum += c.fit.df;
  }
  const double M = static_cast<double>(components.size());
  e.ensemble_beta_ /= M;
  e.ensemble_residual_ /= M;
  e.tdf_ = df_sum / M;
  e.components_ = std::move(components);
  return e;
}

EnsembleFit EnsembleFit::prefix(int M) const {
  if (M < 1 || M > this->M()) throw Error(ErrorKind::InvalidInput, "prefix size out of range");
  return assemble({components_.begin(), components_.begin() + M});
}

MatrixXd take_rows(const MatrixXd& X, const IndexSet& rows) {
  MatrixXd out(rows.size(), X.cols());
  for (int i = 0; i < rows.size(); ++i) out.row(i) = X.row(rows[i]);
  return out;
}

VectorXd take_rows(const VectorXd& y, const IndexSet& rows) {
  VectorXd out(rows.size());
  for (int i = 0; i < rows.size(); ++i) out(i) = y(rows[i]);
  return out;
}

EnsembleComponent make_component(const MatrixXd& X, const VectorXd& y, IndexSet subset,
                                 FitResult fit) {
  VectorXd resid = y - X * fit.beta;
  return {std::move(subset), std::move(fit), std::move(resid)};
}

EnsembleFit fit_ensemble(const MatrixXd& X, const VectorXd& y, const PenaltyConfig& penalty,
                         const std::vector<IndexSet>& subsets, const SolverOptions& opts) {
  penalty.validate();
  if (X.rows() != y.size()) throw Error(ErrorKind::InvalidInput, "X rows and y length differ");
  std::vector<EnsembleComponent> comps;
  comps.reserve(subsets.size());
  for (std::size_t m = 0; m < subsets.size(); ++m) {
    const IndexSet& s = subsets[m];
    if (s.universe() != X.rows()) {
      throw Error(ErrorKind::InvalidInput,
                  "subset " + std::to_string(m) + " was drawn for a different n");
    }
    try {
      FitResult f = fit_penalized(take_rows(X, s), take_rows(y, s), penalty, opts);
      comps.push_back(make_component(X, y, s, std::move(f)));
    } catch (const Error& e) {
      rethrow_with_context(e, "component " + std::to_string(m));
    }
  }
  return EnsembleFit::assemble(std::move(comps));
}

}  // namespace cgcv
