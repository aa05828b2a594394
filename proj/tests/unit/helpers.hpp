#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testutil {

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& stem) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           (stem + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

// Pearson statistic against uniform cell expectations.
inline double chi_square_uniform(const std::vector<long>& counts, double expected) {
  double stat = 0.0;
  for (long c : counts) {
    double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// 0.99 quantiles of the chi-square distribution by degrees of freedom.
inline double chi_square_99(int df) {
  switch (df) {
    case 4: return 13.276704135987622;
    case 9: return 21.665994333461924;
    case 19: return 36.19086912927004;
    case 49: return 74.91947430847816;
    case 59: return 87.16571139978757;
    case 99: return 134.64161685578915;
    default: return -1.0;
  }
}

}  // namespace testutil
