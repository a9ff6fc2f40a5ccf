// core/src/parallel.hpp

// Copyright 2026  The mvae Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MVAE_SRC_PARALLEL_HPP_
#define MVAE_SRC_PARALLEL_HPP_

#include <exception>

namespace mvae::internal {

// Runs fn(i) for i in [0, count) on the OpenMP team. The first exception
// thrown by any iteration is rethrown on the calling thread.
template <typename Fn>
void ParallelFor(int count, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(mvae_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace mvae::internal

#endif  // MVAE_SRC_PARALLEL_HPP_
