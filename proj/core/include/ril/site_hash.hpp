#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "ril/rng.hpp"

namespace ril {

// Open-addressing set of packed site keys, linear probing, power-of-two
// capacity. Packed keys use at most 63 bits, so ~0ull is free as the
// empty-slot sentinel.
class SiteHashSet {
 public:
  static constexpr std::uint64_t kEmpty = ~0ull;

  explicit SiteHashSet(std::size_t expected = 16) { rehash_for(expected); }

  // returns true when the key was not present before
  bool insert(std::uint64_t key) {
    if ((size_ + 1) * 10 >= slots_.size() * 7) rehash_for(size_ * 2 + 16);
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask_;
    while (true) {
      const std::uint64_t s = slots_[i];
      if (s == kEmpty) {
        slots_[i] = key;
        ++size_;
        return true;
      }
      if (s == key) return false;
      i = (i + 1) & mask_;
    }
  }

  bool contains(std::uint64_t key) const {
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask_;
    while (true) {
      const std::uint64_t s = slots_[i];
      if (s == kEmpty) return false;
      if (s == key) return true;
      i = (i + 1) & mask_;
    }
  }

  std::size_t size() const { return size_; }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), kEmpty);
    size_ = 0;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const std::uint64_t s : slots_)
      if (s != kEmpty) fn(s);
  }

 private:
  void rehash_for(std::size_t expected) {
    std::size_t cap = 16;
    while (cap * 7 < (expected + 1) * 10) cap <<= 1;
    if (cap <= slots_.size() && !slots_.empty()) return;
    std::vector<std::uint64_t> old;
    old.swap(slots_);
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
    size_ = 0;
    for (const std::uint64_t s : old)
      if (s != kEmpty) insert(s);
  }

  std::vector<std::uint64_t> slots_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

// Packed site -> visit count, same layout as SiteHashSet.
class SiteCounter {
 public:
  static constexpr std::uint64_t kEmpty = ~0ull;

  explicit SiteCounter(std::size_t expected = 16) { rehash_for(expected); }

  void increment(std::uint64_t key) {
    if ((size_ + 1) * 10 >= keys_.size() * 7) rehash_for(size_ * 2 + 16);
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask_;
    while (true) {
      const std::uint64_t s = keys_[i];
      if (s == kEmpty) {
        keys_[i] = key;
        counts_[i] = 1;
        ++size_;
        return;
      }
      if (s == key) {
        ++counts_[i];
        return;
      }
      i = (i + 1) & mask_;
    }
  }

  // 0 when absent
  std::int64_t count(std::uint64_t key) const {
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask_;
    while (true) {
      const std::uint64_t s = keys_[i];
      if (s == kEmpty) return 0;
      if (s == key) return counts_[i];
      i = (i + 1) & mask_;
    }
  }

  std::size_t distinct_sites() const { return size_; }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != kEmpty) t += counts_[i];
    return t;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != kEmpty) fn(keys_[i], counts_[i]);
  }

 private:
  void rehash_for(std::size_t expected) {
    std::size_t cap = 16;
    while (cap * 7 < (expected + 1) * 10) cap <<= 1;
    if (cap <= keys_.size() && !keys_.empty()) return;
    std::vector<std::uint64_t> old_keys;
    std::vector<std::int64_t> old_counts;
    old_keys.swap(keys_);
    old_counts.swap(counts_);
    keys_.assign(cap, kEmpty);
    counts_.assign(cap, 0);
    mask_ = cap - 1;
    size_ = 0;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == kEmpty) continue;
      add_count(old_keys[i], old_counts[i]);
    }
  }

  void add_count(std::uint64_t key, std::int64_t c) {
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask_;
    while (keys_[i] != kEmpty) i = (i + 1) & mask_;
    keys_[i] = key;
    counts_[i] = c;
    ++size_;
  }

  std::vector<std::uint64_t> keys_;
  std::vector<std::int64_t> counts_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

}  // namespace ril
