#include "cgcv/risk.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace cgcv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pair(const EnsembleFit& fit, int m, int l) {
  if (m < 0 || l < 0 || m >= fit.M() || l >= fit.M()) {
    throw Error(ErrorKind::InvalidInput, "component index out of range");
  }
}

std::string pair_tag(int m, int l) {
  return "(" + std::to_string(m) + "," + std::to_string(l) + ")";
}

// Sum over i in I_m ∩ I_l of a_i * b_i, plus the overlap size.
std::pair<double, int> overlap_inner(const IndexSet& a, const IndexSet& b, const VectorXd& ra,
                                     const VectorXd& rb) {
  double sum = 0.0;
  int count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      sum += ra(*ia) * rb(*ia);
      ++count;
      ++ia;
      ++ib;
    }
  }
  return {sum, count};
}

double correction_from_diagonal(const EnsembleFit& fit, const std::function<double(int)>& diag) {
  const double n = fit.n();
  const double ratio = fit.tdf() / n;
  const double gcv_den = 1.0 - ratio;
  if (!(gcv_den > 0.0) || gcv_den * gcv_den <= kDenominatorFloor) {
    throw Error(ErrorKind::DegenerateDenominator, "tdf >= n in correction");
  }
  if (fit.tdf() == 0.0) return 0.0;
  double sum = 0.0;
  for (int m = 0; m < fit.M(); ++m) {
    const double weight = n / fit[m].subset.size() - 1.0;
    if (weight == 0.0) continue;  // k = n: the cell does not contribute
    sum += weight * diag(m);
  }
  const double M = fit.M();
  return (1.0 / M) * (ratio * ratio) / (gcv_den * gcv_den) * (sum / M);
}

Estimate evaluate(const std::function<double()>& f) {
  Estimate e;
  try {
    e.value = f();
  } catch (const Error& err) {
    e.value = kNaN;
    e.status = status_from(err.kind());
    e.message = err.what();
  }
  return e;
}

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::Sub ? "sub" : "full"; }

double gcv_full_data(const EnsembleFit& fit) {
  const double n = fit.n();
  const double den = 1.0 - fit.tdf() / n;
  if (!(den > 0.0) || den * den <= kDenominatorFloor) {
    throw Error(ErrorKind::DegenerateDenominator, "gcv: tdf >= n");
  }
  return fit.ensemble_residual().squaredNorm() / n / (den * den);
}

double gcv_union(const EnsembleFit& fit) {
  std::vector<const IndexSet*> sets;
  for (const auto& c : fit.components()) sets.push_back(&c.subset);
  const std::vector<int> rows = union_indices(sets);
  if (rows.empty()) throw Error(ErrorKind::EmptyOverlap, "gcv_union: empty union");
  const double u = static_cast<double>(rows.size());
  const double den = 1.0 - fit.tdf() / u;
  if (!(den > 0.0) || den * den <= kDenominatorFloor) {
    throw Error(ErrorKind::DegenerateDenominator, "gcv_union: tdf >= |union|");
  }
  double rss = 0.0;
  const VectorXd& r = fit.ensemble_residual();
  for (int i : rows) rss += r(i) * r(i);
  return rss / u / (den * den);
}

double component_sub(const EnsembleFit& fit, int m, int l) {
  check_pair(fit, m, l);
  const auto& a = fit[m];
  const auto& b = fit[l];
  const auto [inner, overlap] = overlap_inner(a.subset, b.subset, a.full_residual, b.full_residual);
  if (overlap == 0) {
    throw Error(ErrorKind::EmptyOverlap, "component_sub" + pair_tag(m, l) + ": empty overlap");
  }
  const double den = (1.0 - a.fit.df / a.subset.size()) * (1.0 - b.fit.df / b.subset.size());
  if (den <= kDenominatorFloor) {
    throw Error(ErrorKind::DegenerateDenominator,
                "component_sub" + pair_tag(m, l) + ": df equals subsample size");
  }
  return inner / overlap / den;
}

double component_full(const EnsembleFit& fit, int m, int l) {
  check_pair(fit, m, l);
  const auto& a = fit[m];
  const auto& b = fit[l];
  const double n = fit.n();
  const double ka = a.subset.size();
  const double kb = b.subset.size();
  const double overlap = intersection_size(a.subset, b.subset);
  const double den =
      1.0 - a.fit.df / n - b.fit.df / n + (a.fit.df * b.fit.df / (ka * kb)) * overlap / n;
  if (den <= kDenominatorFloor) {
    throw Error(ErrorKind::DegenerateDenominator,
                "component_full" + pair_tag(m, l) + ": nonpositive denominator");
  }
  return a.full_residual.dot(b.full_residual) / n / den;
}

double component(const EnsembleFit& fit, Variant v, int m, int l) {
  return v == Variant::Sub ? component_sub(fit, m, l) : component_full(fit, m, l);
}

double intermediate_estimator(const EnsembleFit& fit, Variant v) {
  const int M = fit.M();
  double sum = 0.0;
  for (int m = 0; m < M; ++m) {
    sum += component(fit, v, m, m);
    for (int l = m + 1; l < M; ++l) sum += 2.0 * component(fit, v, m, l);
  }
  return sum / (static_cast<double>(M) * M);
}

double cgcv_correction(const EnsembleFit& fit, Variant v) {
  return correction_from_diagonal(fit, [&](int m) { return component(fit, v, m, m); });
}

double cgcv(const EnsembleFit& fit, Variant v) {
  return gcv_full_data(fit) - cgcv_correction(fit, v);
}

RiskReport risk_report(const EnsembleFit& fit, const ReportOptions& opts) {
  const int M = fit.M();
  RiskReport rep;
  rep.n = fit.n();
  rep.M = M;
  rep.tdf = fit.tdf();
  rep.gcv_full_data = evaluate([&] { return gcv_full_data(fit); });
  rep.gcv_union = evaluate([&] { return gcv_union(fit); });

  for (Variant v : {Variant::Sub, Variant::Full}) {
    Eigen::MatrixXd cells = Eigen::MatrixXd::Constant(M, M, kNaN);
    std::vector<Estimate> diag(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
      diag[m] = evaluate([&] { return component(fit, v, m, m); });
      cells(m, m) = diag[m].value;
    }
    Estimate& corr = v == Variant::Sub ? rep.correction_sub : rep.correction_full;
    corr = evaluate([&] {
      return correction_from_diagonal(fit, [&](int m) {
        const Estimate& d = diag[static_cast<std::size_t>(m)];
        if (!d.ok()) {
          throw Error(d.status == Status::EmptyOverlap ? ErrorKind::EmptyOverlap
                                                       : ErrorKind::DegenerateDenominator,
                      d.message);
        }
        return d.value;
      });
    });
    Estimate& cg = v == Variant::Sub ? rep.cgcv_sub : rep.cgcv_full;
    if (!rep.gcv_full_data.ok()) {
      cg = rep.gcv_full_data;
    } else if (!corr.ok()) {
      cg = corr;
    } else {
      cg.value = rep.gcv_full_data.value - corr.value;
    }

    if (opts.intermediates) {
      Estimate inter;
      Estimate first_failure;
      double sum = 0.0;
      for (int m = 0; m < M; ++m) {
        const Estimate& d = diag[m];
        if (!d.ok() && first_failure.ok()) first_failure = d;
        sum += d.value;
        for (int l = m + 1; l < M; ++l) {
          const Estimate cell = evaluate([&] { return component(fit, v, m, l); });
          if (!cell.ok() && first_failure.ok()) first_failure = cell;
          cells(m, l) = cell.value;
          cells(l, m) = cell.value;
          sum += 2.0 * cell.value;
        }
      }
      if (first_failure.ok()) {
        inter.value = sum / (static_cast<double>(M) * M);
      } else {
        inter = first_failure;
      }
      (v == Variant::Sub ? rep.r_sub : rep.r_full) = inter;
    }
    (v == Variant::Sub ? rep.component_matrix_sub : rep.component_matrix_full) = std::move(cells);
  }
  return rep;
}

}  // namespace cgcv
