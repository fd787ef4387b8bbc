#pragma once

// Shared fixtures for the unit and acceptance binaries: paths, scratch
// directories, small hand-built grids, random generators and brute-force
// metric oracles.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gridbench/grid/case.hpp"
#include "gridbench/grid/case_io.hpp"
#include "gridbench/scenario/config.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path data_file(const std::string& name) { return fs::path(GRIDBENCH_DATA_DIR) / name; }
inline fs::path config_file(const std::string& name) { return fs::path(GRIDBENCH_CONFIG_DIR) / name; }

inline const gridbench::grid::GridCase& case14() {
  static const auto c = gridbench::grid::load_case(data_file("case14.m"));
  return c;
}
inline const gridbench::grid::GridCase& case118() {
  static const auto c = gridbench::grid::load_case(data_file("case118.m"));
  return c;
}
inline const gridbench::grid::GridCase& case6ww() {
  static const auto c = gridbench::grid::load_case(data_file("case6ww.m"));
  return c;
}

inline gridbench::scenario::ScenarioConfig desk_config() {
  return gridbench::scenario::load_scenario_config(config_file("desk.json"));
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("gridbench-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

/// Two substations joined by one line; generator (slack) at the first, load
/// at the second.
inline gridbench::grid::GridCase two_bus_case(double r = 0.01, double x = 0.1, double b = 0.0, double load_mw = 50.0,
                                              double load_mvar = 20.0) {
  using namespace gridbench::grid;
  CaseData d;
  d.base_mva = 100.0;
  d.substations = {{1, "a", 138.0}, {2, "b", 138.0}};
  d.lines = {{0, 0, 1, r, x, b, 1.0}};
  d.generators = {{0, 0, load_mw, 138.0, true}};
  d.loads = {{0, 1, load_mw, load_mvar}};
  return GridCase::create(d);
}

/// Connected random grid with `n` substations: a random spanning tree plus
/// `extra` chords, a slack generator at substation 0, a PV generator and
/// loads elsewhere.
inline gridbench::grid::GridCase random_case(std::mt19937_64& rng, int n = 6, int extra = 3) {
  using namespace gridbench::grid;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CaseData d;
  d.base_mva = 100.0;
  for (int i = 0; i < n; ++i) d.substations.push_back({i + 1, "s" + std::to_string(i + 1), 138.0});
  auto add_line = [&](int a, int b) {
    Line l;
    l.id = static_cast<int>(d.lines.size());
    l.sub_or = a;
    l.sub_ex = b;
    l.r = 0.005 + 0.045 * u(rng);
    l.x = 0.02 + 0.18 * u(rng);
    l.b = 0.05 * u(rng);
    l.tap = u(rng) < 0.3 ? 0.95 + 0.1 * u(rng) : 1.0;
    d.lines.push_back(l);
  };
  for (int i = 1; i < n; ++i) add_line(static_cast<int>(u(rng) * i), i);
  for (int k = 0; k < extra; ++k) {
    const int a = static_cast<int>(u(rng) * n);
    int b = static_cast<int>(u(rng) * n);
    if (a == b) b = (a + 1) % n;
    add_line(a, b);
  }
  const int pv = 1 + static_cast<int>(u(rng) * (n - 1));
  d.generators = {{0, 0, 0.0, 138.0 * (1.0 + 0.04 * u(rng)), true}, {1, pv, 20.0 + 40.0 * u(rng), 138.0, false}};
  for (int i = 1; i < n; ++i) {
    if (i == pv && u(rng) < 0.5) continue;
    d.loads.push_back({static_cast<int>(d.loads.size()), i, 10.0 + 30.0 * u(rng), 2.0 + 10.0 * u(rng)});
  }
  return GridCase::create(d);
}

// ---- brute-force metric oracles, written from the definitions only ----

/// Order statistic interpolation: sort, then interpolate at p * (n - 1).
inline double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Mean relative error over entries whose |truth| is in the top `share` of
/// magnitudes (by the quantile cutoff), skipping zero truths.
inline double oracle_mape_top(const std::vector<double>& pred, const std::vector<double>& truth, double share) {
  std::vector<double> mags;
  for (double t : truth) mags.push_back(std::abs(t));
  const double cutoff = oracle_quantile(mags, 1.0 - share);
  long double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::abs(truth[i]) < cutoff || truth[i] == 0.0) continue;
    sum += std::abs(static_cast<long double>(pred[i]) - truth[i]) / std::abs(static_cast<long double>(truth[i]));
    ++count;
  }
  return static_cast<double>(sum / static_cast<long double>(count));
}

inline double oracle_mae(const std::vector<double>& pred, const std::vector<double>& truth) {
  long double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += std::abs(static_cast<long double>(pred[i]) - truth[i]);
  return static_cast<double>(sum / static_cast<long double>(truth.size()));
}

}  // namespace testing
