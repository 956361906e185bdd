#include "seistomo/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace seistomo {

namespace {
std::atomic<int> g_threads{0};  // 0 = not set yet, use hardware
}

void set_num_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

int num_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& body,
                  std::int64_t grain) {
  const std::int64_t n = end - begin;
  if (n <= 0) return;
  const int nt = num_threads();
  if (nt == 1 || n <= grain) {
    body(begin, end);
    return;
  }
  const int chunks = static_cast<int>(std::min<std::int64_t>(nt, (n + grain - 1) / grain));
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  const std::int64_t per = (n + chunks - 1) / chunks;
  for (int c = 0; c < chunks; ++c) {
    const std::int64_t lo = begin + c * per;
    const std::int64_t hi = std::min(end, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

double parallel_reduce_sum(
    std::int64_t begin, std::int64_t end,
    const std::function<double(std::int64_t, std::int64_t)>& chunk_sum,
    std::int64_t grain) {
  const std::int64_t n = end - begin;
  if (n <= 0) return 0.0;
  const int nt = num_threads();
  if (nt == 1 || n <= grain) return chunk_sum(begin, end);
  const int chunks = static_cast<int>(std::min<std::int64_t>(nt, (n + grain - 1) / grain));
  std::vector<double> partial(chunks, 0.0);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  const std::int64_t per = (n + chunks - 1) / chunks;
  for (int c = 0; c < chunks; ++c) {
    const std::int64_t lo = begin + c * per;
    const std::int64_t hi = std::min(end, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&chunk_sum, &partial, c, lo, hi] { partial[c] = chunk_sum(lo, hi); });
  }
  for (auto& t : pool) t.join();
  double s = 0.0;
  for (double p : partial) s += p;  // fixed chunk order
  return s;
}

}  // namespace seistomo
