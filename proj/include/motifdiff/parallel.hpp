//
// motifdiff - Copyright 2026 The motifdiff Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace motifdiff::detail {

// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop. The
// exception raised at the lowest index is rethrown after the loop, so error
// reporting does not depend on scheduling.
template <class Fn>
void parallel_for(std::ptrdiff_t n, int threads, Fn &&fn) {
  if (threads <= 1 || n < 2) {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::exception_ptr first;
  std::ptrdiff_t first_index = n;
  std::mutex mu;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first)
    std::rethrow_exception(first);
}

}  // namespace motifdiff::detail
