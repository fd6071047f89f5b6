#pragma once

#include <exception>
#include <mutex>

namespace cda {

/// Selects between the OpenMP kernels and their serial reference loops.
/// Both paths produce bitwise-identical results.
enum class Exec { serial, parallel };

/// Runs body(i) for i in [0, n). Exceptions thrown by the body are captured
/// and the one from the lowest index is rethrown after the loop.
template <class Body>
void for_each_index(Exec exec, int n, Body&& body) {
  std::exception_ptr first;
  int first_index = n;
  std::mutex guard;
  auto run = [&](int i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(guard);
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) run(i);
  } else {
    for (int i = 0; i < n; ++i) run(i);
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace cda
