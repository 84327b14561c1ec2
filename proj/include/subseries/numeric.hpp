#pragma once
// Small numeric utilities shared across modules: adaptive quadrature, exact
// binomial upper confidence limits, order statistics, stable text formatting
// of doubles, a streaming FNV-1a hash, and a fixed-chunk parallel driver
// whose results do not depend on the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace subseries {

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// One-sided upper confidence limit for a binomial proportion at confidence
// level 1 - alpha (Clopper-Pearson construction, exact beta quantile).
double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double alpha);

// Nearest-rank percentile (q in (0, 1]) of an unsorted sample; copies and sorts.
double percentile_nearest_rank(std::vector<double> values, double q);

// Shortest round-trip decimal representation, '.' decimal separator, no
// locale dependence. NaN renders as "nan", infinities as "inf"/"-inf".
std::string format_double(double value);

// 64-bit FNV-1a over a byte string, and its fixed-width hex rendering.
std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex64(std::uint64_t value);

// Runs `fn(chunk_index, begin, end)` over `count` items split into a fixed
// number of chunks. Chunk boundaries depend only on `count` and `n_chunks`,
// never on `threads`, so any per-chunk accumulation combined in chunk order
// is reproducible across thread counts.
void run_chunked(std::size_t count, unsigned threads, std::size_t n_chunks,
                 const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline constexpr std::size_t kDefaultChunks = 64;

}  // namespace subseries
