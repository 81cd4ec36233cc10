#include "nrap/select.hpp"

#include <stdexcept>
#include <utility>

namespace nrap {

double quickselect(std::span<double> arr, std::size_t k) {
  if (arr.empty()) throw std::invalid_argument("quickselect of an empty array");
  if (k >= arr.size()) throw std::out_of_range("quickselect rank out of range");

  std::size_t l = 0;
  std::size_t ir = arr.size() - 1;
  for (;;) {
    if (ir <= l + 1) {
      if (ir == l + 1 && arr[ir] < arr[l]) std::swap(arr[l], arr[ir]);
      return arr[k];
    }
    const std::size_t mid = l + (ir - l) / 2;
    std::swap(arr[mid], arr[l + 1]);
    if (arr[l] > arr[ir]) std::swap(arr[l], arr[ir]);
    if (arr[l + 1] > arr[ir]) std::swap(arr[l + 1], arr[ir]);
    if (arr[l] > arr[l + 1]) std::swap(arr[l], arr[l + 1]);
    // arr[l] <= pivot <= arr[ir] act as sentinels for the scans below.
    std::size_t i = l + 1;
    std::size_t j = ir;
    const double pivot = arr[l + 1];
    for (;;) {
      do ++i; while (arr[i] < pivot);
      do --j; while (arr[j] > pivot);
      if (j < i) break;
      std::swap(arr[i], arr[j]);
    }
    arr[l + 1] = arr[j];
    arr[j] = pivot;
    if (j >= k) ir = j - 1;
    if (j <= k) l = i;
  }
}

double quickselect_median(std::span<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty array");
  return quickselect(values, (values.size() + 1) / 2 - 1);
}

}  // namespace nrap
