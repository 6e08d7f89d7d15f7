#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "cgcv/datagen.hpp"
#include "cgcv/errors.hpp"
#include "cgcv/solvers.hpp"

namespace cgcv {

/// One penalty family swept over a lambda grid. For the elastic net the grid
/// is over lambda1 with lambda2 fixed.
struct PenaltyGrid {
  PenaltyKind kind = PenaltyKind::Ridge;
  std::vector<double> lambdas;
  double lambda2 = 0.0;

  PenaltyConfig at(std::size_t i) const;
};

using DesignSpec = std::variant<GaussianLinearSpec, NonlinearAR1Spec>;

struct ExperimentConfig {
  DesignSpec design;
  PenaltyGrid penalty;
  std::vector<int> k_grid;
  std::vector<int> M_grid;
  int reps = 1;
  std::uint64_t seed = 0;
  // Subset of known_estimators(). Rows are emitted in this order.
  std::vector<std::string> estimators;
  // Held-out rows per repetition; -1 picks the default (10 n for the
  // nonlinear design, none for the linear design whose risk is exact).
  int n_test = -1;
  SolverOptions solver;

  int n() const;
  int p() const;
  int effective_n_test() const;
  // Throws Error{Config} describing the first problem found.
  void validate() const;
};

/// Strict parse: unknown keys and wrong types are config errors.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

const std::vector<std::string>& known_estimators();

struct ResultRow {
  int rep = 0;
  double lambda = 0.0;
  int k = 0;
  int M = 0;
  std::string estimator;
  double value = 0.0;
  Status status = Status::Ok;
};

using RowSink = std::function<void(const ResultRow&)>;

/// Runs every (rep, k, lambda, M) cell. Repetitions are spread over
/// `threads` workers; rows reach `sink` on the calling thread in
/// (rep, k, lambda, M, estimator) order whatever the thread count.
void run_sweep(const ExperimentConfig& config, int threads, const RowSink& sink);
std::vector<ResultRow> run_sweep(const ExperimentConfig& config, int threads = 1);

/// Dataset of one repetition, as seen by run_sweep.
Dataset sweep_dataset(const ExperimentConfig& config, int rep);

inline constexpr const char* kCsvHeader = "rep,lambda,k,M,estimator,value,status";

/// Streams rows to a CSV file as they arrive.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void write(const ResultRow& row);
  void close();

 private:
  std::string path_;
  std::ofstream os_;
};

void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_csv(const std::string& path);

std::string format_row(const ResultRow& row);

}  // namespace cgcv
