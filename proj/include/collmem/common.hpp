#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace collmem {

// Input that cannot be parsed or violates a documented precondition of the
// input files. The CLI maps this to exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical or statistical stage could not produce a result.
// The CLI maps this to exit status 3.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Medium : std::uint8_t { News = 0, Twitter = 1 };

inline constexpr Medium kMedia[] = {Medium::News, Medium::Twitter};

std::string_view to_string(Medium m);
// Accepts "news" / "twitter" (case-insensitive).
std::optional<Medium> parse_medium(std::string_view s);

// Calendar day as days since 1970-01-01 (UTC).
struct Day {
  std::int32_t value = 0;

  friend constexpr auto operator<=>(Day, Day) = default;
  constexpr Day operator+(std::int32_t d) const { return Day{value + d}; }
  constexpr Day operator-(std::int32_t d) const { return Day{value - d}; }
  constexpr std::int32_t operator-(Day o) const { return value - o.value; }
};

// Strict YYYY-MM-DD; returns nullopt for anything else, including invalid
// calendar dates such as 2013-02-30.
std::optional<Day> parse_day(std::string_view s);
std::string format_day(Day d);

// SplitMix64 step; used to derive independent per-task seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// xoshiro256** with hand-rolled uniform/normal draws, so that every seeded
// output is bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t s_[4];
  std::optional<double> spare_;
};

}  // namespace collmem
