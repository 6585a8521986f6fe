#pragma once

#include <vector>

#include "tgqpt/common.hpp"

namespace tgqpt {

/// Strictly increasing waiting times in fs. The first point is exactly
/// T = 0; the initial condition there calibrates the whole inversion.
class WaitingTimeGrid {
public:
  explicit WaitingTimeGrid(std::vector<double> points);

  /// n evenly spaced points from 0 to t_max inclusive.
  static WaitingTimeGrid uniform(double t_max, int n);

  /// The published acquisition grid: 33 points from 0 to 510 fs.
  static WaitingTimeGrid published();

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

  bool operator==(const WaitingTimeGrid&) const = default;

private:
  std::vector<double> points_;
};

}  // namespace tgqpt
