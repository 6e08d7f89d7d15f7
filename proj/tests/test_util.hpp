#pragma once

#include <cstdint>

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include "cgcv/sampling.hpp"

namespace cgcv::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Engine rng(seed);
  boost::random::normal_distribution<double> normal;
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = normal(rng);
  return A;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index size, std::uint64_t seed) {
  return gaussian_matrix(size, 1, seed).col(0);
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace cgcv::testing
