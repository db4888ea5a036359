#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dd {

/// Fixed-capacity memoization table for one operation tag. Collisions
/// overwrite the resident entry (no chaining); a capacity of 0 disables the
/// cache entirely. A stored result is only ever returned for a key that
/// compares equal to the stored one, so a hit is bit-identical to
/// recomputation. The backing table is allocated on first insert so that
/// short-lived managers never pay for caches they do not touch.
template <class Key, class Value> class ComputeCache {
public:
  explicit ComputeCache(std::size_t capacity) {
    if (capacity != 0) {
      // round up to a power of two for cheap masking
      std::size_t cap = 1;
      while (cap < capacity) {
        cap <<= 1U;
      }
      capacity_ = cap;
      mask_ = cap - 1;
    }
  }

  const Value* lookup(const Key& key) {
    if (capacity_ == 0) {
      return nullptr;
    }
    ++lookups_;
    if (table_.empty()) {
      return nullptr;
    }
    auto& entry = table_[key.hash() & mask_];
    if (entry.valid && entry.key == key) {
      ++hits_;
      return &entry.value;
    }
    return nullptr;
  }

  void insert(const Key& key, const Value& value) {
    if (capacity_ == 0) {
      return;
    }
    if (table_.empty()) {
      table_.resize(capacity_);
    }
    auto& entry = table_[key.hash() & mask_];
    entry.key = key;
    entry.value = value;
    entry.valid = true;
  }

  void clear() {
    for (auto& entry : table_) {
      entry.valid = false;
    }
  }

  [[nodiscard]] std::size_t hits() const noexcept { return hits_; }
  [[nodiscard]] std::size_t lookups() const noexcept { return lookups_; }

private:
  struct Entry {
    Key key{};
    Value value{};
    bool valid = false;
  };

  std::vector<Entry> table_;
  std::size_t capacity_ = 0;
  std::size_t mask_ = 0;
  std::size_t hits_ = 0;
  std::size_t lookups_ = 0;
};

/// Pointer/bit mixing helpers shared by cache keys and the unique table.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hashCombine(std::uint64_t seed, std::uint64_t v) noexcept {
  return seed ^ (mix64(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace dd
