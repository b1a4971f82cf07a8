#pragma once
// Small statistics helpers for tests.

#include <algorithm>
#include <span>
#include <vector>

namespace ewreward::testing {

// Kendall rank correlation between two score vectors over the same items.
// Pairs tied in either vector count as neither concordant nor discordant.
inline double kendall_tau(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double concordant = 0.0;
  double discordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double da = a[i] - a[j];
      double db = b[i] - b[j];
      double s = da * db;
      if (s > 0.0) {
        concordant += 1.0;
      } else if (s < 0.0) {
        discordant += 1.0;
      }
    }
  }
  double total = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return (concordant - discordant) / total;
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace ewreward::testing
