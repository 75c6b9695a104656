#pragma once

#include "carnot/sobolev.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot::cli {

/// Bad flags, values or config keys; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// summary.csv: one row per reported item. Check rows carry pass 0/1,
/// informational rows leave it empty.
class Summary {
 public:
  void info(const std::string& item, const std::string& value);
  void info(const std::string& item, double value);
  void check(const std::string& item, double value, const std::string& target, bool pass);
  void check(const std::string& item, const std::string& value, const std::string& target, bool pass);

  bool pass() const { return pass_; }
  void write(const std::filesystem::path& dir) const;
  void print() const;

 private:
  struct Row {
    std::string item, value, target, pass;
  };
  std::vector<Row> rows_;
  bool pass_ = true;
};

/// Flat `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

/// Feeds config values to options of `sub` (or its parents) that were not
/// given on the command line. Unknown keys are usage errors.
void apply_config(CLI::App& sub, const std::vector<std::pair<std::string, std::string>>& entries);

/// CARNOT_HEAT_THREADS, or 0 when unset.
int thread_budget();

/// Runs jobs 0..n-1 on at most `workers` threads; results stay indexed so
/// output order does not depend on scheduling. Rethrows the first failure.
void run_pool(std::size_t jobs, int workers, const std::function<void(std::size_t)>& job);

/// exp(-sum_m x_m^2 / w^{2 k_m}), with k_m the weight of axis m.
TestFunction homogeneous_gaussian(const GroupSpec& g, double width);

/// delta | gaussian | bump | constant, scaled by amplitude.
GridFunction initial_data(const GroupSpec& g, GridPtr grid, const std::string& kind, double amplitude, double width,
                          std::uint64_t seed);

double parse_exponent(const std::string& text);
std::string join(const std::vector<double>& values);
std::filesystem::path prepare_dir(const std::string& dir);

}  // namespace carnot::cli
