#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "percsolid/lattice.hpp"

namespace percsolid {

// d-dimensional inclusive prefix sums over a Region, with box-sum queries by
// inclusion-exclusion over the 2^d corners. Queries are clamped to the region.
template <class T>
class PrefixSum {
 public:
  PrefixSum() = default;

  // value(i) is indexed row-major over the region.
  PrefixSum(const Region& region, const std::function<T(int64_t)>& value) : region_(region) {
    const int d = region.dim();
    ext_.resize(d);
    stride_.resize(d);
    int64_t total = 1;
    for (int k = 0; k < d; ++k) {
      ext_[k] = region.extent(k) + 1;  // one ghost layer of zeros at the low end
      if (region.extent(k) <= 0) throw std::invalid_argument("prefix_sum: empty region");
    }
    for (int k = d - 1; k >= 0; --k) {
      stride_[k] = total;
      total *= ext_[k];
    }
    data_.assign(static_cast<size_t>(total), T(0));

    // fill interior (offset by one along every axis)
    {
      Point p(d, 0);
      int64_t src = 0;
      while (true) {
        int64_t dst = 0;
        for (int k = 0; k < d; ++k) dst += (p[k] + 1) * stride_[k];
        data_[static_cast<size_t>(dst)] = value(src);
        ++src;
        int k = d - 1;
        while (k >= 0) {
          if (p[k] + 1 < region.extent(k)) {
            ++p[k];
            break;
          }
          p[k] = 0;
          --k;
        }
        if (k < 0) break;
      }
    }

    // axis-wise accumulation
    for (int axis = 0; axis < d; ++axis) {
      accumulate_axis(axis);
    }
  }

  // sum of values over the lattice box [a, b] intersected with the region
  T box_sum(const Point& a, const Point& b) const {
    const int d = region_.dim();
    std::vector<int64_t> lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::max<int64_t>(a[k], region_.lo[k]) - region_.lo[k];
      hi[k] = std::min<int64_t>(b[k], region_.hi[k]) - region_.lo[k];
      if (hi[k] < lo[k]) return T(0);
    }
    T total = T(0);
    const unsigned corners = 1u << d;
    for (unsigned m = 0; m < corners; ++m) {
      int64_t idx = 0;
      int sign = 1;
      for (int k = 0; k < d; ++k) {
        if (m & (1u << k)) {
          idx += lo[k] * stride_[k];  // exclusive low corner
          sign = -sign;
        } else {
          idx += (hi[k] + 1) * stride_[k];
        }
      }
      total += sign > 0 ? data_[static_cast<size_t>(idx)] : -data_[static_cast<size_t>(idx)];
    }
    return total;
  }

  const Region& region() const { return region_; }

 private:
  void accumulate_axis(int axis) {
    const int d = region_.dim();
    // iterate over all lines along `axis`
    Point p(d, 0);
    while (true) {
      int64_t base = 0;
      for (int k = 0; k < d; ++k) {
        if (k != axis) base += p[k] * stride_[k];
      }
      T run = T(0);
      for (int64_t i = 0; i < ext_[axis]; ++i) {
        const size_t idx = static_cast<size_t>(base + i * stride_[axis]);
        run += data_[idx];
        data_[idx] = run;
      }
      int k = d - 1;
      while (k >= 0) {
        if (k == axis) {
          --k;
          continue;
        }
        if (p[k] + 1 < ext_[k]) {
          ++p[k];
          break;
        }
        p[k] = 0;
        --k;
      }
      if (k < 0) break;
    }
  }

  Region region_;
  std::vector<int64_t> ext_, stride_;
  std::vector<T> data_;
};

}  // namespace percsolid
