#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpfit {

/// Observed counts c_0..c_M in unit-width bins n = 0, 1, ...
class CountHistogram {
 public:
  /// Throws DataError for negative counts or a zero total.
  explicit CountHistogram(std::vector<std::int64_t> counts, std::string name = {},
                          std::string source = {});

  std::span<const std::int64_t> counts() const { return counts_; }
  std::int64_t operator[](std::size_t n) const { return n < counts_.size() ? counts_[n] : 0; }
  std::size_t size() const { return counts_.size(); }
  /// N_c, the total number of observations.
  std::int64_t total() const { return total_; }
  /// Index of the last bin with a nonzero count.
  std::size_t last_nonzero() const;

  const std::string& name() const { return name_; }
  const std::string& source() const { return source_; }

  /// Same bins, every count multiplied by factor (> 0).
  CountHistogram scaled(std::int64_t factor) const;

  bool operator==(const CountHistogram&) const = default;

 private:
  std::vector<std::int64_t> counts_;
  std::string name_;
  std::string source_;
  std::int64_t total_ = 0;
};

/// Parses the dataset text format: one "n count" pair per line, '#' starts a
/// comment, "# name: ..." and "# source: ..." set metadata. Bins may appear in
/// any order; missing bins are zero. Errors carry the 1-based line number.
CountHistogram parse_dataset(std::string_view text);

/// Writes every bin 0..M (zeros included) so that parsing restores the
/// histogram exactly.
std::string serialize_dataset(const CountHistogram& histogram);

CountHistogram load_dataset(const std::filesystem::path& path);

}  // namespace cpfit
