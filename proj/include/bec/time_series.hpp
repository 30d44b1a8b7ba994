#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bec/errors.hpp"

namespace bec {

struct TimeSeries {
  std::string label;
  std::vector<double> times;
  std::vector<double> values;

  TimeSeries() = default;
  explicit TimeSeries(std::string l) : label(std::move(l)) {}

  /// Appends a sample; times must be strictly increasing.
  void push(double t, double v) {
    if (!times.empty() && !(t > times.back()))
      throw NumericalError("time series '" + label + "': non-increasing time");
    times.push_back(t);
    values.push_back(v);
  }
  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }

  /// Samples with t in [t0, t1].
  TimeSeries window(double t0, double t1) const {
    TimeSeries out(label);
    for (std::size_t i = 0; i < times.size(); ++i)
      if (times[i] >= t0 && times[i] <= t1) out.push(times[i], values[i]);
    return out;
  }
};

}  // namespace bec
