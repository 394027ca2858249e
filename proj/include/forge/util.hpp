#pragma once
// Shared helpers: string munging, content hashing, deterministic RNG, file IO.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool contains_word(std::string_view text, std::string_view word);

// "Just-World Hypothesis" -> "just-world-hypothesis"
std::string slugify(std::string_view name);

// SHA-256 of the bytes, lowercase hex.
std::string sha256_hex(std::string_view data);
// First 16 hex chars of sha256 — used for ids and line checksums.
std::string short_hash(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Deterministic RNG. Bounded draws use rejection sampling so results depend
// only on the seed, not on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  uint64_t below(uint64_t bound);
  double unit();  // [0, 1)

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (size_t i = v.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

  // Sample k items without replacement, preserving draw order.
  template <typename T>
  std::vector<T> sample(const std::vector<T>& pool, size_t k) {
    std::vector<size_t> idx(pool.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<T> out;
    out.reserve(k);
    for (size_t i = 0; i < k && !idx.empty(); ++i) {
      size_t j = static_cast<size_t>(below(idx.size()));
      out.push_back(pool[idx[j]]);
      idx.erase(idx.begin() + static_cast<long>(j));
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

// Stable sub-seed for a labeled pipeline stage.
uint64_t derive_seed(uint64_t base, std::string_view label);

std::string iso8601_now();

}  // namespace forge
