#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace crnlab {

enum class Execution { Serial, Parallel };

/// Runs f(0), ..., f(n-1) and returns the results in index order. Replicas
/// must not share mutable state. The serial path is the reference; the
/// parallel path must give identical output because each replica owns its
/// random stream. The first exception thrown by any replica is rethrown.
template <class R, class F>
std::vector<R> run_replicas(std::size_t n, F&& f, Execution exec = Execution::Parallel) {
  std::vector<R> out(n);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline void set_worker_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

inline int worker_count() { return omp_get_max_threads(); }

}  // namespace crnlab
