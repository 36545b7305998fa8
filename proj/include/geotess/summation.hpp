#pragma once

#include <cmath>

namespace geotess {

/// Neumaier compensated accumulator; summation order is the caller's loop order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) { add(v); return *this; }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace geotess
