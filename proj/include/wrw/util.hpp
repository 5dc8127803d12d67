#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wrw {

// splitmix64; used to derive independent RNG streams from (seed, cell indices).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
  s = splitmix64(s ^ splitmix64(a));
  s = splitmix64(s ^ splitmix64(b + 0x13198a2e03707344ULL));
  s = splitmix64(s ^ splitmix64(c + 0xa4093822299f31d0ULL));
  return s;
}

// Uniform double in [0,1) from a raw 64-bit state; keeps sampling independent
// of std::uniform_real_distribution, which is implementation-defined.
inline double u01_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Header comment carrying the generation time; suppressible so that CSV
// output can be byte-identical across runs.
std::string timestamp_line(const std::string& what);

class Stopwatch {
 public:
  Stopwatch() : start_(clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

// Runs f(i) for i in [0, count). jobs <= 1 stays on the calling thread, which is
// the reproducibility-friendly default; results must not depend on scheduling.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& f) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::vector<std::exception_ptr> errors(count);
  for (unsigned t = 0; t < jobs && t < count; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += jobs) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  (void)next;
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wrw
