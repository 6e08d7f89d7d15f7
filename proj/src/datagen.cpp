#include "cgcv/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include "cgcv/errors.hpp"
#include "cgcv/sampling.hpp"

namespace cgcv {

namespace {

// Stream tags under a dataset seed.
enum : std::uint64_t { kBetaStream = 0, kTrainX = 1, kTrainNoise = 2, kTestX = 3, kTestNoise = 4 };

MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols, Engine& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd Z(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) Z(i, j) = normal(rng);
  }
  return Z;
}

MatrixXd scaled_student_t(Eigen::Index rows, Eigen::Index cols, double dof, Engine& rng) {
  boost::random::student_t_distribution<double> t(dof);
  const double scale = 1.0 / std::sqrt(dof / (dof - 2.0));
  MatrixXd Z(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) Z(i, j) = scale * t(rng);
  }
  return Z;
}

VectorXd normal_vector(Eigen::Index size, double sd, Engine& rng) {
  boost::random::normal_distribution<double> normal(0.0, sd);
  VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

VectorXd SpectrumSpec::diagonal(int p) const {
  switch (kind) {
    case Kind::Isotropic:
      return VectorXd::Ones(p);
    case Kind::EvenlySpaced: {
      if (!(lo > 0.0) || !(hi >= lo)) {
        throw Error(ErrorKind::InvalidInput, "evenly spaced spectrum needs 0 < lo <= hi");
      }
      if (p == 1) return VectorXd::Constant(1, lo);
      VectorXd d(p);
      for (int j = 0; j < p; ++j) d(j) = lo + j * ((hi - lo) / (p - 1));
      return d;
    }
    case Kind::Custom: {
      if (static_cast<int>(eigenvalues.size()) != p) {
        throw Error(ErrorKind::InvalidInput, "custom spectrum length must equal p");
      }
      VectorXd d = Eigen::Map<const VectorXd>(eigenvalues.data(), p);
      if (!(d.minCoeff() > 0.0) || !d.allFinite()) {
        throw Error(ErrorKind::InvalidInput, "custom spectrum must be positive and finite");
      }
      return d;
    }
  }
  throw Error(ErrorKind::InvalidInput, "unknown spectrum kind");
}

void GaussianLinearSpec::validate() const {
  if (n < 1 || p < 1) throw Error(ErrorKind::InvalidInput, "n and p must be positive");
  if (!(snr > 0.0) || !(sigma2 > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "snr and sigma2 must be positive");
  }
  if (sparsity_tail < 0 || sparsity_tail >= p) {
    throw Error(ErrorKind::InvalidInput, "sparsity_tail must satisfy 0 <= tail < p");
  }
  spectrum.diagonal(p);
}

void NonlinearAR1Spec::validate() const {
  if (n < 1 || p < 1) throw Error(ErrorKind::InvalidInput, "n and p must be positive");
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidInput, "AR(1) needs |rho| < 1");
  if (!(noise_sigma2 >= 0.0)) throw Error(ErrorKind::InvalidInput, "noise variance must be >= 0");
  if (feature_law.kind == FeatureLaw::Kind::ScaledHeavyTail && !(feature_law.dof > 4.0)) {
    throw Error(ErrorKind::InvalidInput, "heavy-tail features need dof > 4");
  }
}

GaussianLinearDraw gen_gaussian_linear(const GaussianLinearSpec& spec, std::uint64_t seed,
                                       int n_test) {
  spec.validate();
  if (n_test < 0) throw Error(ErrorKind::InvalidInput, "n_test must be >= 0");
  const VectorXd diag = spec.spectrum.diagonal(spec.p);
  const VectorXd sd = diag.cwiseSqrt();

  GaussianLinearDraw out;
  {
    Engine rng = make_engine(seed, {kBetaStream});
    VectorXd b = VectorXd::Zero(spec.p);
    b.head(spec.p - spec.sparsity_tail) = normal_vector(spec.p - spec.sparsity_tail, 1.0, rng);
    const double energy = b.dot(diag.cwiseProduct(b));
    if (!(energy > 0.0)) throw Error(ErrorKind::Numerical, "degenerate beta0 draw");
    out.oracle.beta0 = b * std::sqrt(spec.snr * spec.sigma2 / energy);
  }
  out.oracle.Sigma = diag.asDiagonal();
  out.oracle.sigma2 = spec.sigma2;

  auto draw = [&](int rows, std::uint64_t x_tag, std::uint64_t noise_tag, MatrixXd& X,
                  VectorXd& y) {
    Engine xr = make_engine(seed, {x_tag});
    X = standard_normal(rows, spec.p, xr) * sd.asDiagonal();
    Engine nr = make_engine(seed, {noise_tag});
    y = X * out.oracle.beta0 + normal_vector(rows, std::sqrt(spec.sigma2), nr);
  };
  draw(spec.n, kTrainX, kTrainNoise, out.train.X, out.train.y);
  if (n_test > 0) {
    draw(n_test, kTestX, kTestNoise, out.test.X, out.test.y);
  } else {
    out.test.X.resize(0, spec.p);
    out.test.y.resize(0);
  }
  return out;
}

MatrixXd ar1_covariance(int p, double rho) {
  if (p < 1) throw Error(ErrorKind::InvalidInput, "p must be positive");
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidInput, "AR(1) needs |rho| < 1");
  MatrixXd S(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) S(i, j) = std::pow(rho, std::abs(i - j));
  }
  return S;
}

VectorXd ar1_top_eigen_direction(const MatrixXd& Sigma, double rho, int count) {
  const auto p = Sigma.rows();
  count = static_cast<int>(std::min<Eigen::Index>(count, p));
  VectorXd dir = VectorXd::Zero(p);
  if (rho == 0.0) {
    // Identity covariance: every direction ties, take coordinates in order.
    dir.head(count).setOnes();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma);
    for (int c = 0; c < count; ++c) {
      VectorXd v = es.eigenvectors().col(p - 1 - c);
      for (Eigen::Index i = 0; i < p; ++i) {
        if (std::abs(v(i)) > 1e-12) {
          if (v(i) < 0.0) v = -v;
          break;
        }
      }
      dir += v;
    }
  }
  dir /= count;
  return dir / dir.norm();
}

NonlinearDraw gen_nonlinear_ar1(const NonlinearAR1Spec& spec, std::uint64_t seed, int n_test) {
  spec.validate();
  if (n_test < 0) throw Error(ErrorKind::InvalidInput, "n_test must be >= 0");
  NonlinearDraw out;
  out.Sigma = ar1_covariance(spec.p, spec.rho);
  out.beta0 = ar1_top_eigen_direction(out.Sigma, spec.rho);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(out.Sigma);
  const MatrixXd root = es.eigenvectors() *
                        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();

  const double p = spec.p;
  const bool heavy = spec.feature_law.kind == FeatureLaw::Kind::ScaledHeavyTail;
  // Var(z^T Sigma z) = 2 tr(Sigma^2) + (kurtosis - 3) sum_i Sigma_ii^2.
  const double kurtosis =
      heavy ? 3.0 * (spec.feature_law.dof - 2.0) / (spec.feature_law.dof - 4.0) : 3.0;
  const double quad_var =
      2.0 * out.Sigma.squaredNorm() + (kurtosis - 3.0) * out.Sigma.diagonal().squaredNorm();
  out.fnl_energy = spec.noise_sigma2 + quad_var / (p * p);

  auto draw = [&](int rows, std::uint64_t x_tag, std::uint64_t noise_tag, MatrixXd& X,
                  VectorXd& y) {
    Engine xr = make_engine(seed, {x_tag});
    const MatrixXd Z = heavy ? scaled_student_t(rows, spec.p, spec.feature_law.dof, xr)
                             : standard_normal(rows, spec.p, xr);
    X = Z * root;
    Engine nr = make_engine(seed, {noise_tag});
    const VectorXd eps = normal_vector(rows, std::sqrt(spec.noise_sigma2), nr);
    y = X * out.beta0 + eps;
    y.array() += X.rowwise().squaredNorm().array() / p - 1.0;
  };
  draw(spec.n, kTrainX, kTrainNoise, out.train.X, out.train.y);
  if (n_test > 0) {
    draw(n_test, kTestX, kTestNoise, out.test.X, out.test.y);
  } else {
    out.test.X.resize(0, spec.p);
    out.test.y.resize(0);
  }
  return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  const auto p = data.X.cols();
  for (Eigen::Index j = 0; j < p; ++j) os << "x_" << j << ',';
  os << "y\n";
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) os << format_double(data.X(i, j)) << ',';
    os << format_double(data.y(i)) << '\n';
  }
  if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::InvalidInput, path + ": empty file");
  const auto columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 2 || line.substr(line.rfind(',') + 1) != "y") {
    throw Error(ErrorKind::InvalidInput, path + ": header must be x_0,...,x_{p-1},y");
  }
  const auto p = columns - 1;
  std::vector<double> values;
  long rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    long count = 0;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw Error(ErrorKind::InvalidInput, path + ": bad number '" + cell + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count != columns) {
      throw Error(ErrorKind::InvalidInput,
                  path + ": row " + std::to_string(rows + 1) + " has wrong column count");
    }
    ++rows;
  }
  Dataset d;
  d.X.resize(rows, p);
  d.y.resize(rows);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < p; ++j) d.X(i, j) = values[static_cast<std::size_t>(i * columns + j)];
    d.y(i) = values[static_cast<std::size_t>(i * columns + p)];
  }
  return d;
}

}  // namespace cgcv
