#pragma once

#include <exception>
#include <mutex>

namespace semrb {

enum class Exec { serial, parallel };

/// Runs body(i) for i in [0, n). The parallel path uses an OpenMP loop; the
/// first exception thrown by any iteration is rethrown on the caller.
template <typename Body>
void for_each_index(int n, Exec exec, Body&& body) {
  if (exec == Exec::serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace semrb
