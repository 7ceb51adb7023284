#pragma once

#include <cstdint>
#include <functional>
#include <optional>

namespace dg::util {

struct ScanResult {
  std::optional<std::uint64_t> first_failure;
  // Sum of per-item costs over [0, first_failure] (or [0, n) without a
  // failure); identical for every worker count.
  std::uint64_t cost = 0;
  std::uint64_t items = 0;
};

// Visits indices [0, n) and finds the smallest index whose check fails.
// `check(idx, cost)` returns false on failure and adds its cost to `cost`.
// Work is split into ordered chunks; once a chunk fails, strictly later
// chunks are skipped.
ScanResult ordered_scan(std::uint64_t n, unsigned workers,
                        const std::function<bool(std::uint64_t, std::uint64_t&)>& check,
                        std::uint64_t chunk_size = 4096);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown in the caller (the one from the smallest index wins).
void parallel_for(std::uint64_t n, unsigned workers, const std::function<void(std::uint64_t)>& fn);

unsigned default_workers();

}  // namespace dg::util
