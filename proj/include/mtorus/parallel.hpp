#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace mtorus {

/// serial is the reference path; parallel runs the same per-element work under OpenMP.
enum class Exec { serial, parallel };

/// out[i] = fn(i) for i in [0, n). Each element is computed independently, so
/// both policies produce identical results. The first exception (lowest index)
/// is rethrown after the loop.
template <class Fn>
auto map_indexed(Exec policy, std::size_t n, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<R> out(n);
  if (policy == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }

  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline int max_threads() { return omp_get_max_threads(); }

}  // namespace mtorus
