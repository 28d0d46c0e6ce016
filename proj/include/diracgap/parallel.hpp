#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

namespace diracgap {

/// Serial execution is the reference path; parallel execution must produce
/// bit-identical results (every work item is independent and written to its
/// own slot).
enum class Execution { serial, parallel };

void set_threads(int n);
int max_threads();

/// out[i] = f(i) for i in [0, n). Exceptions are rethrown after the loop,
/// lowest index first, so failures are reported deterministically.
template <class F>
auto parallel_map(std::size_t n, F&& f, Execution exec) {
  using R = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace diracgap
