#include "dg/util/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace dg::util {

namespace {

struct ChunkResult {
  std::uint64_t cost = 0;
  std::uint64_t items = 0;
  std::optional<std::uint64_t> failure;
};

}  // namespace

ScanResult ordered_scan(std::uint64_t n, unsigned workers,
                        const std::function<bool(std::uint64_t, std::uint64_t&)>& check,
                        std::uint64_t chunk_size) {
  chunk_size = std::max<std::uint64_t>(chunk_size, 1);
  const std::uint64_t chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<ChunkResult> results(chunks);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::exception_ptr error;
  std::uint64_t error_chunk = std::numeric_limits<std::uint64_t>::max();
  std::mutex error_mu;

  auto worker = [&] {
    while (true) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::uint64_t begin = c * chunk_size;
      if (begin > best.load()) continue;
      const std::uint64_t end = std::min(n, begin + chunk_size);
      ChunkResult& r = results[c];
      try {
        for (std::uint64_t i = begin; i < end; ++i) {
          ++r.items;
          if (!check(i, r.cost)) {
            r.failure = i;
            std::uint64_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
            break;
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (c < error_chunk) {
          error_chunk = c;
          error = std::current_exception();
        }
        std::uint64_t cur = best.load();
        while (begin < cur && !best.compare_exchange_weak(cur, begin)) {
        }
      }
    }
  };

  if (workers <= 1 || chunks <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::uint64_t>(workers, chunks); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  ScanResult out;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    out.cost += results[c].cost;
    out.items += results[c].items;
    if (results[c].failure) {
      out.first_failure = results[c].failure;
      break;
    }
  }
  return out;
}

void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& fn) {
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::uint64_t error_index = std::numeric_limits<std::uint64_t>::max();
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::uint64_t>(workers, n); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

unsigned default_workers() {
  if (const char* env = std::getenv("DG_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace dg::util
