#include "subseries/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/binomial.hpp>

namespace subseries {

namespace {

double simpson_slice(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a, double fa, double b,
                       double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_slice(a, fa, m, fm, flm);
  const double right = simpson_slice(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::domain_error("adaptive_simpson: endpoints must be finite");
  }
  if (!(tol > 0.0)) {
    throw std::domain_error("adaptive_simpson: tolerance must be positive");
  }
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson_slice(a, fa, b, fb, fm);
  return simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double clopper_pearson_upper(std::uint64_t successes, std::uint64_t trials, double alpha) {
  if (trials == 0) throw std::domain_error("clopper_pearson_upper: trials must be positive");
  if (successes > trials) {
    throw std::domain_error("clopper_pearson_upper: successes exceed trials");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("clopper_pearson_upper: alpha must lie in (0, 1)");
  }
  using boost::math::binomial_distribution;
  return binomial_distribution<double>::find_upper_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), alpha,
      binomial_distribution<double>::clopper_pearson_exact_interval);
}

double percentile_nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw std::domain_error("percentile_nearest_rank: empty sample");
  if (!(q > 0.0) || !(q <= 1.0)) {
    throw std::domain_error("percentile_nearest_rank: q must lie in (0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * n));
  if (rank == 0) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

void run_chunked(std::size_t count, unsigned threads, std::size_t n_chunks,
                 const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  if (n_chunks == 0) n_chunks = 1;
  if (n_chunks > count) n_chunks = count;
  auto chunk_begin = [&](std::size_t c) { return c * count / n_chunks; };
  if (threads <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c, chunk_begin(c), chunk_begin(c + 1));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c, chunk_begin(c), chunk_begin(c + 1));
    }
  };
  const unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(n_chunks));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace subseries
