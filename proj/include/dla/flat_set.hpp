#pragma once

#include <cstdint>
#include <vector>

#include "dla/rng.hpp"

namespace dla {

// Insert-only open-addressing hash set of uint64 keys, used in walk hot
// loops. Keys must not equal the reserved empty marker (~0ull); packed
// coordinate keys never do.
class FlatSet64 {
 public:
  explicit FlatSet64(size_t expected = 1024) { rehash_for(expected); }

  bool contains(uint64_t key) const {
    size_t i = slot_of(key);
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return true;
      i = (i + 1) & mask_;
    }
    return false;
  }

  // Returns true if the key was newly inserted.
  bool insert(uint64_t key) {
    size_t i = slot_of(key);
    while (slots_[i] != kEmpty) {
      if (slots_[i] == key) return false;
      i = (i + 1) & mask_;
    }
    slots_[i] = key;
    ++size_;
    if (size_ * 10 >= slots_.size() * 7) grow();
    return true;
  }

  size_t size() const { return size_; }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), kEmpty);
    size_ = 0;
  }

 private:
  static constexpr uint64_t kEmpty = ~0ull;

  size_t slot_of(uint64_t key) const {
    return static_cast<size_t>(mix64(key)) & mask_;
  }

  void rehash_for(size_t expected) {
    size_t cap = 16;
    while (cap * 7 < expected * 10) cap <<= 1;
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
    size_ = 0;
  }

  void grow() {
    std::vector<uint64_t> old = std::move(slots_);
    slots_.assign(old.size() * 2, kEmpty);
    mask_ = slots_.size() - 1;
    size_ = 0;
    for (uint64_t k : old)
      if (k != kEmpty) {
        size_t i = slot_of(k);
        while (slots_[i] != kEmpty) i = (i + 1) & mask_;
        slots_[i] = k;
        ++size_;
      }
  }

  std::vector<uint64_t> slots_;
  size_t mask_ = 0;
  size_t size_ = 0;
};

}  // namespace dla
