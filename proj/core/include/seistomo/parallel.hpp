#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace seistomo {

/// Process-wide worker count used by parallel_for / parallel_reduce.
/// Results are deterministic for a fixed count: ranges are split into
/// contiguous chunks, one per worker, and reductions combine chunk
/// partials in chunk order.
void set_num_threads(int n);
int num_threads();

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& body,
                  std::int64_t grain = 2048);

double parallel_reduce_sum(
    std::int64_t begin, std::int64_t end,
    const std::function<double(std::int64_t, std::int64_t)>& chunk_sum,
    std::int64_t grain = 2048);

}  // namespace seistomo
