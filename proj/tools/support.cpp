#include "support.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace carnot::cli {

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace

void Summary::info(const std::string& item, const std::string& value) { rows_.push_back({item, value, "", ""}); }
void Summary::info(const std::string& item, double value) { info(item, format_double(value)); }

void Summary::check(const std::string& item, double value, const std::string& target, bool pass) {
  check(item, format_double(value), target, pass);
}

void Summary::check(const std::string& item, const std::string& value, const std::string& target, bool pass) {
  rows_.push_back({item, value, target, pass ? "1" : "0"});
  pass_ = pass_ && pass;
}

void Summary::write(const std::filesystem::path& dir) const {
  std::ofstream out(dir / "summary.csv");
  out << "item,value,target,pass\n";
  for (const auto& r : rows_) out << r.item << ',' << r.value << ',' << r.target << ',' << r.pass << '\n';
}

void Summary::print() const {
  for (const auto& r : rows_) {
    std::cout << "  " << r.item << " = " << r.value;
    if (!r.pass.empty()) std::cout << "  [" << r.target << "] " << (r.pass == "1" ? "ok" : "FAIL");
    std::cout << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(n) + ": empty key");
    out.emplace_back(key, value);
  }
  return out;
}

void apply_config(CLI::App& sub, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [key, value] : entries) {
    CLI::Option* opt = nullptr;
    for (CLI::App* app = &sub; app && !opt; app = app->get_parent()) opt = app->get_option_no_throw("--" + key);
    if (!opt || key == "config") throw UsageError("unknown config key '" + key + "' for '" + sub.get_name() + "'");
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      if (value != "true" && value != "false") throw UsageError("config key '" + key + "' takes true or false");
      if (value == "false") continue;
    }
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

int thread_budget() {
  const char* env = std::getenv("CARNOT_HEAT_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) throw UsageError("CARNOT_HEAT_THREADS must be a positive integer");
  return static_cast<int>(n);
}

void run_pool(std::size_t jobs, int workers, const std::function<void(std::size_t)>& job) {
  const auto count = std::min<std::size_t>(jobs, static_cast<std::size_t>(std::max(1, workers)));
  std::vector<std::exception_ptr> errors(jobs);
  if (count <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < count; ++w) {
    threads.emplace_back([&] {
      omp_set_num_threads(1);
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

TestFunction homogeneous_gaussian(const GroupSpec& g, double width) {
  std::vector<double> scale;
  for (int k : g.shape().weights()) scale.push_back(std::pow(width, k));
  return [scale](std::span<const double> x) {
    double r = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) r += (x[m] / scale[m]) * (x[m] / scale[m]);
    return std::exp(-r);
  };
}

GridFunction initial_data(const GroupSpec& g, GridPtr grid, const std::string& kind, double amplitude, double width,
                          std::uint64_t seed) {
  GridFunction u;
  if (kind == "delta") {
    u = GridFunction::delta(grid);
  } else if (kind == "gaussian") {
    u = GridFunction::sample(grid, homogeneous_gaussian(g, width));
  } else if (kind == "bump") {
    u = dilated(g, grid, random_bump(g, seed, width), 1.0);
  } else if (kind == "constant") {
    u = GridFunction(grid, 1.0);
  } else {
    throw UsageError("unknown initial data '" + kind + "' (delta, gaussian, bump, constant)");
  }
  u *= amplitude;
  return u;
}

double parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0)) throw UsageError("bad exponent '" + text + "'");
  return v;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? " " : "") + format_double(values[i]);
  return out;
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace carnot::cli
