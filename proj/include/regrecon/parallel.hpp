// Execution policy shared by the sweep kernels.
//
// Every hot loop is written once as a body over an index and run either
// serially or under OpenMP. The serial path is the reference: tests check
// that both produce identical results, which holds because reductions are
// either max (order independent) or performed serially over per-index slots.
#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <vector>

namespace regrecon {

enum class Exec { serial, parallel };

template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  if (exec == Exec::parallel) {
    // Exceptions must not escape an OpenMP region; the first one is rethrown.
    const long long m = static_cast<long long>(n);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < m; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(regrecon_error)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
}

// Evaluates body(i) into a slot per index; callers reduce the slots serially.
template <class T, class Body>
std::vector<T> map_indices(Exec exec, std::size_t n, Body&& body) {
  std::vector<T> out(n);
  for_each_index(exec, n, [&](std::size_t i) { out[i] = body(i); });
  return out;
}

template <class Body>
double max_over(Exec exec, std::size_t n, Body&& body) {
  auto slots = map_indices<double>(exec, n, body);
  double m = 0.0;
  for (double v : slots) m = std::max(m, v);
  return m;
}

}  // namespace regrecon
