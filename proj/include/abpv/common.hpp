#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace abpv {

namespace detail {

inline void str_impl(std::ostringstream&) {}

template <typename T, typename... Rest>
void str_impl(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  str_impl(os, rest...);
}

}  // namespace detail

/// Builds an error/message string from heterogeneous pieces.
template <typename... Args>
std::string str(const Args&... args) {
  std::ostringstream os;
  os.precision(17);
  detail::str_impl(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw std::runtime_error(str(args...));
}

template <typename... Args>
void require(bool cond, const Args&... args) {
  if (!cond) fail(args...);
}

/// Fixed-order compensated (Kahan-Neumaier) accumulator. Summation order is
/// part of the contract: reductions over meshes always run in index order so
/// repeated runs produce bit-identical results.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_total(const std::vector<double>& xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double sqr(double x) { return x * x; }

/// Positive part, (x)_+.
inline double pos(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace abpv
