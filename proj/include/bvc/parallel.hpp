#pragma once

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bvc/types.hpp"

namespace bvc {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Runs `compute(i, local)` for i in [0, n) and feeds each result to
/// `emit(i, local)` in increasing i.
///
/// The serial path reuses one scratch `Local`. The parallel path computes a
/// block of locals concurrently, then emits the block in index order, so the
/// emitted sequence is identical for both policies.
template <class Local, class Compute, class Emit>
void for_each_local(int n, ExecPolicy policy, Compute&& compute, Emit&& emit) {
  if (policy == ExecPolicy::serial) {
    Local local;
    for (int i = 0; i < n; ++i) {
      compute(i, local);
      emit(i, local);
    }
    return;
  }
  constexpr int kBlock = 4096;
  std::vector<Local> locals(std::min(n, kBlock));
  for (int begin = 0; begin < n; begin += kBlock) {
    const int end = std::min(n, begin + kBlock);
#pragma omp parallel for schedule(static)
    for (int i = begin; i < end; ++i) compute(i, locals[i - begin]);
    for (int i = begin; i < end; ++i) emit(i, locals[i - begin]);
  }
}

}  // namespace bvc
