#pragma once

#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cgcv/ensemble.hpp"
#include "cgcv/errors.hpp"

namespace cgcv {

/// Which per-pair estimator of R_{m,l} to use: overlap rows only (Sub) or
/// all n rows with an adjusted denominator (Full).
enum class Variant { Sub, Full };

std::string_view to_string(Variant v);

// Denominators at or below this are treated as zero.
inline constexpr double kDenominatorFloor = 1e-12;

/// ||y - X beta~||^2 / n over (1 - tdf/n)^2.
double gcv_full_data(const EnsembleFit& fit);

/// GCV restricted to the rows in the union of the subsamples.
double gcv_union(const EnsembleFit& fit);

/// Per-pair estimate of R_{m,l} from the rows in I_m and I_l.
double component_sub(const EnsembleFit& fit, int m, int l);

/// Per-pair estimate of R_{m,l} from all n rows.
double component_full(const EnsembleFit& fit, int m, int l);

double component(const EnsembleFit& fit, Variant v, int m, int l);

/// (1/M^2) sum over all (m, l) pairs of component(v, m, l).
double intermediate_estimator(const EnsembleFit& fit, Variant v);

/// The additive correction subtracted from gcv_full_data; O(M).
double cgcv_correction(const EnsembleFit& fit, Variant v);

/// Corrected GCV: gcv_full_data(fit) - cgcv_correction(fit, v).
double cgcv(const EnsembleFit& fit, Variant v);

/// A value that may have failed; value is NaN unless status is Ok.
struct Estimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  Status status = Status::Ok;
  std::string message;

  bool ok() const noexcept { return status == Status::Ok; }
};

struct ReportOptions {
  // Off: only diagonal cells are computed, which keeps the report O(M).
  bool intermediates = true;
};

struct RiskReport {
  int n = 0;
  int M = 0;
  double tdf = 0.0;
  Estimate gcv_full_data;
  Estimate gcv_union;
  std::optional<Estimate> r_sub;  // empty without intermediates
  std::optional<Estimate> r_full;
  Estimate cgcv_sub;
  Estimate cgcv_full;
  Estimate correction_sub;
  Estimate correction_full;
  // M x M; NaN marks a failed (or, without intermediates, skipped) cell.
  Eigen::MatrixXd component_matrix_sub;
  Eigen::MatrixXd component_matrix_full;
};

RiskReport risk_report(const EnsembleFit& fit, const ReportOptions& opts = {});

}  // namespace cgcv
