#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace viewnav {

/// Selects between the OpenMP kernel and the serial reference loop.
enum class Execution { serial, parallel };

/// Runs f(i) for i in [0, n). Each index must write only its own outputs so
/// both policies produce identical results. The first exception thrown by
/// any index is rethrown on the calling thread.
template <typename F>
void for_each_index(std::size_t n, Execution exec, F&& f) {
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace viewnav
