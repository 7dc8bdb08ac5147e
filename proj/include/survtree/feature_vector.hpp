#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace survtree {

// Fixed-length bit vector over the binarized feature set.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  FeatureVector(std::initializer_list<int> bits) : FeatureVector(bits.size()) {
    std::size_t i = 0;
    for (int b : bits) set(i++, b != 0);
  }

  std::size_t size() const { return size_; }

  bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace survtree
