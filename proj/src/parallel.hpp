#pragma once

#include "rfsim/kernels.hpp"

#include <exception>

namespace rfsim::detail {

// Runs body(k, i) over a rows x cols index space. Serial walks the nested
// loops; Parallel flattens them for OpenMP. The first exception thrown by any
// item is rethrown after the loop.
template <class Body>
void for_each_2d(Exec exec, int cols, int rows, Body&& body) {
  if (exec == Exec::Serial) {
    for (int k = 0; k < rows; ++k)
      for (int i = 0; i < cols; ++i) body(i, k);
    return;
  }
  const int total = rows * cols;
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < total; ++idx) {
    try {
      body(idx % cols, idx / cols);
    } catch (...) {
#pragma omp critical(rfsim_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace rfsim::detail
