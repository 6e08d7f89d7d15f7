#include "cgcv/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "cgcv/errors.hpp"

namespace cgcv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualTol = 1e-12;
constexpr int kMaxExpansions = 1000;

}  // namespace

SpectralDistribution::SpectralDistribution(std::vector<double> eigenvalues,
                                           std::vector<double> weights)
    : r_(std::move(eigenvalues)), w_(std::move(weights)) {
  if (r_.empty() || r_.size() != w_.size()) {
    throw Error(ErrorKind::InvalidInput, "spectrum needs matching nonempty atoms and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (!(r_[i] > 0.0) || !std::isfinite(r_[i])) {
      throw Error(ErrorKind::InvalidInput, "spectrum atoms must be positive and finite");
    }
    if (!(w_[i] >= 0.0)) throw Error(ErrorKind::InvalidInput, "spectrum weights must be >= 0");
    total += w_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidInput, "spectrum weights must sum to 1");
  }
}

SpectralDistribution SpectralDistribution::point_mass(double r) { return {{r}, {1.0}}; }

SpectralDistribution SpectralDistribution::empirical(const Eigen::VectorXd& eigenvalues) {
  const auto p = eigenvalues.size();
  if (p == 0) throw Error(ErrorKind::InvalidInput, "empty spectrum");
  std::vector<double> r(eigenvalues.data(), eigenvalues.data() + p);
  std::vector<double> w(static_cast<std::size_t>(p), 1.0 / static_cast<double>(p));
  return {std::move(r), std::move(w)};
}

SpectralDistribution read_spectrum_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open spectrum file " + path);
  std::vector<double> r;
  std::vector<double> w;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::InvalidInput, path + ": expected eigenvalue,weight rows");
    }
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    char* ea = nullptr;
    char* eb = nullptr;
    const double ra = std::strtod(a.c_str(), &ea);
    const double wb = std::strtod(b.c_str(), &eb);
    if (ea == a.c_str() || eb == b.c_str()) {
      if (first) {  // header
        first = false;
        continue;
      }
      throw Error(ErrorKind::InvalidInput, path + ": bad row '" + line + "'");
    }
    first = false;
    r.push_back(ra);
    w.push_back(wb);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidInput, path + ": weights sum to zero");
  for (double& x : w) x /= total;
  // Push the rounding remainder into the largest weight.
  const double drift = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  if (!w.empty()) *std::max_element(w.begin(), w.end()) += drift;
  return {std::move(r), std::move(w)};
}

bool FixedPointSolution::finite() const noexcept { return std::isfinite(v); }

double fixed_point_residual(double v, double lambda, double theta,
                            const SpectralDistribution& H) {
  return 1.0 / v - lambda - theta * H.integrate([v](double r) { return r / (1.0 + v * r); });
}

FixedPointSolution solve_v(double lambda, double theta, const SpectralDistribution& H) {
  if (std::isnan(lambda) || lambda < 0.0) {
    throw Error(ErrorKind::InvalidInput, "solve_v: lambda must be >= 0");
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorKind::InvalidInput, "solve_v: theta must be positive and finite");
  }
  FixedPointSolution sol{0.0, lambda, theta, 0.0};
  if (lambda == kInf) return sol;  // v = 0
  if (lambda == 0.0 && theta <= 1.0) {
    sol.v = kInf;
    return sol;
  }
  auto g = [&](double v) { return fixed_point_residual(v, lambda, theta, H); };

  const double mean_r = H.integrate([](double r) { return r; });
  // g(lo) >= 0 since r / (1 + v r) <= r.
  double lo = 1.0 / (lambda + theta * mean_r);
  double hi;
  if (lambda > 0.0) {
    hi = 1.0 / lambda;  // g(1/lambda) < 0
  } else {
    hi = 2.0 * lo;
    int expansions = 0;
    while (g(hi) >= 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++expansions > kMaxExpansions) {
        throw Error(ErrorKind::Numerical, "solve_v: no sign change while expanding bracket");
      }
    }
  }

  double best = lo;
  double best_res = std::abs(g(lo));
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket collapsed to adjacent doubles
    const double gm = g(mid);
    if (std::abs(gm) < best_res) {
      best = mid;
      best_res = std::abs(gm);
    }
    if (gm == 0.0 || best_res <= 1e-3 * kResidualTol) break;
    (gm > 0.0 ? lo : hi) = mid;
  }
  if (std::abs(g(hi)) < best_res) {
    best = hi;
    best_res = std::abs(g(hi));
  }
  sol.v = best;
  sol.residual = best_res;
  return sol;
}

Beta0Quadratic exact_beta0_quadratic(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& beta0) {
  if (Sigma.rows() != Sigma.cols() || Sigma.rows() != beta0.size()) {
    throw Error(ErrorKind::InvalidInput, "exact_beta0_quadratic: dimension mismatch");
  }
  Eigen::VectorXd r;
  Eigen::VectorXd c2;
  const Eigen::MatrixXd off = Sigma - Eigen::MatrixXd(Sigma.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() == 0.0) {
    r = Sigma.diagonal();
    c2 = beta0.array().square();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma);
    r = es.eigenvalues();
    c2 = (es.eigenvectors().transpose() * beta0).array().square();
  }
  return [r = std::move(r), c2 = std::move(c2)](double v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      const double den = 1.0 + v * r(i);
      s += c2(i) * r(i) / (den * den);
    }
    return s;
  };
}

Beta0Quadratic isotropic_beta0_quadratic(double beta0_norm2, const SpectralDistribution& H) {
  return [beta0_norm2, H](double v) {
    return beta0_norm2 * H.integrate([v](double r) {
             const double den = 1.0 + v * r;
             return r / (den * den);
           });
  };
}

DeterministicEquivalents deterministic_equivalents(double lambda, double phi, double psi,
                                                   const SpectralDistribution& H,
                                                   const Beta0Quadratic& beta0_quadratic,
                                                   double fnl_energy) {
  if (!(phi > 0.0) || !(psi >= phi) || !std::isfinite(psi)) {
    throw Error(ErrorKind::InvalidInput, "deterministic_equivalents: need 0 < phi <= psi < inf");
  }
  if (lambda == 0.0 && psi == 1.0) {
    throw Error(ErrorKind::Regime, "ridgeless at psi = 1: risk diverges");
  }
  const FixedPointSolution fp = solve_v(lambda, psi, H);
  if (!fp.finite()) {
    throw Error(ErrorKind::Regime, "v is infinite (ridgeless with psi < 1)");
  }
  DeterministicEquivalents eq;
  eq.lambda = lambda;
  eq.phi = phi;
  eq.psi = psi;
  eq.v = fp.v;
  eq.lambda_v = lambda == kInf ? 1.0 : lambda * fp.v;
  eq.fnl_energy = fnl_energy;

  // tv = a / (v^-2 - a) with a = phi' int r^2/(1+vr)^2, written in terms of
  // b = v^2 a so that v -> 0 stays finite.
  const double v = fp.v;
  const double shape = H.integrate([v](double r) {
    const double u = v * r / (1.0 + v * r);
    return u * u;
  });
  auto tv = [&](double phi_ml) {
    const double b = phi_ml * shape;
    if (!(1.0 - b > 0.0)) {
      throw Error(ErrorKind::Regime, "tv denominator is nonpositive");
    }
    return b / (1.0 - b);
  };
  eq.tv_diag = tv(psi);
  eq.tv_offdiag = tv(phi);
  eq.tc = beta0_quadratic(v);

  const double energy = fnl_energy + eq.tc;
  eq.sR_diag = energy * (1.0 + eq.tv_diag);
  eq.sR_offdiag = energy * (1.0 + eq.tv_offdiag);
  const double lv = eq.lambda_v;
  const double out = (psi - phi) / psi;
  const double in = phi / psi;
  eq.sD_sub = lv * lv;
  eq.sD_full_diag = out + in * lv * lv;
  eq.sD_full_offdiag = (out + in * lv) * (out + in * lv);
  eq.d_p_diag = eq.sD_full_diag;
  eq.d_p_offdiag = eq.sD_full_offdiag;
  return eq;
}

double asymptotic_ensemble_risk(const DeterministicEquivalents& eq, int M) {
  if (M < 1) throw Error(ErrorKind::InvalidInput, "M must be >= 1");
  const double m = M;
  return eq.sR_diag / m + (m - 1.0) / m * eq.sR_offdiag;
}

double asymptotic_gcv_gap(const DeterministicEquivalents& eq, int M) {
  if (M < 1) throw Error(ErrorKind::InvalidInput, "M must be >= 1");
  if (!(eq.d_p_offdiag > 0.0)) {
    throw Error(ErrorKind::DegenerateDenominator, "d_p(phi, psi) is zero");
  }
  return (1.0 / M) * (1.0 - eq.d_p_diag / eq.d_p_offdiag) * (1.0 + eq.tv_diag) *
         (eq.fnl_energy + eq.tc);
}

double asymptotic_df_fraction(const DeterministicEquivalents& eq) {
  return eq.phi / eq.psi * (1.0 - eq.lambda_v);
}

}  // namespace cgcv
