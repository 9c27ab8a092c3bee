#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "coclust/detail/matrix.hpp"

namespace coclust::detail {

/// Binary matrix packed row-wise into 64-bit words.
class BitRows {
 public:
  BitRows() = default;
  explicit BitRows(const BinaryMatrix& a) : rows_(a.rows()), cols_(a.cols()), words_((a.cols() + 63) / 64) {
    bits_.assign(rows_ * words_, 0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (a(i, j)) bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t words() const noexcept { return words_; }

  std::span<const std::uint64_t> row(std::size_t i) const noexcept { return {bits_.data() + i * words_, words_}; }

  /// popcount(row i AND mask)
  long count_and(std::size_t i, std::span<const std::uint64_t> mask) const noexcept {
    long c = 0;
    const auto r = row(i);
    for (std::size_t w = 0; w < words_; ++w) c += std::popcount(r[w] & mask[w]);
    return c;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// One bit mask per class over `length` positions.
inline std::vector<std::vector<std::uint64_t>> class_masks(std::span<const int> labels, std::size_t classes) {
  const std::size_t words = (labels.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(classes, std::vector<std::uint64_t>(words, 0));
  for (std::size_t i = 0; i < labels.size(); ++i)
    masks[static_cast<std::size_t>(labels[i])][i / 64] |= std::uint64_t{1} << (i % 64);
  return masks;
}

}  // namespace coclust::detail
