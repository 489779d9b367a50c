#include "cpfit/histogram.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "cpfit/error.hpp"

namespace cpfit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool starts_with_key(std::string_view body, std::string_view key, std::string_view& value) {
  if (body.substr(0, key.size()) != key) {
    return false;
  }
  body.remove_prefix(key.size());
  body = trim(body);
  if (body.empty() || body.front() != ':') {
    return false;
  }
  value = trim(body.substr(1));
  return true;
}

std::int64_t parse_integer(std::string_view token, std::size_t line, std::string_view what) {
  std::int64_t value = 0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(fmt::format("line {}: {} '{}' is not an integer", line, what, token));
  }
  return value;
}

}  // namespace

CountHistogram::CountHistogram(std::vector<std::int64_t> counts, std::string name,
                               std::string source)
    : counts_(std::move(counts)), name_(std::move(name)), source_(std::move(source)) {
  for (std::size_t n = 0; n < counts_.size(); ++n) {
    if (counts_[n] < 0) {
      throw DataError(fmt::format("bin {} has negative count {}", n, counts_[n]));
    }
    total_ += counts_[n];
  }
  if (total_ < 1) {
    throw DataError("histogram holds no observations");
  }
}

std::size_t CountHistogram::last_nonzero() const {
  std::size_t last = counts_.size() - 1;
  while (last > 0 && counts_[last] == 0) {
    --last;
  }
  return last;
}

CountHistogram CountHistogram::scaled(std::int64_t factor) const {
  if (factor < 1) {
    throw DataError("histogram scale factor must be positive");
  }
  std::vector<std::int64_t> counts(counts_);
  for (auto& c : counts) {
    c *= factor;
  }
  return CountHistogram(std::move(counts), name_, source_);
}

CountHistogram parse_dataset(std::string_view text) {
  std::map<std::int64_t, std::int64_t> bins;
  std::string name;
  std::string source;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    const auto hash = line.find('#');
    if (hash != std::string_view::npos) {
      std::string_view comment = trim(line.substr(hash + 1));
      std::string_view value;
      if (trim(line.substr(0, hash)).empty()) {
        if (starts_with_key(comment, "name", value)) {
          name = std::string(value);
        } else if (starts_with_key(comment, "source", value)) {
          source = std::string(value);
        }
      }
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }

    const auto split = line.find_first_of(" \t");
    if (split == std::string_view::npos) {
      throw DataError(fmt::format("line {}: expected 'n count', got '{}'", line_no, line));
    }
    const std::string_view bin_token = line.substr(0, split);
    const std::string_view count_token = trim(line.substr(split));
    if (count_token.find_first_of(" \t") != std::string_view::npos) {
      throw DataError(fmt::format("line {}: expected exactly two fields", line_no));
    }
    const std::int64_t bin = parse_integer(bin_token, line_no, "bin index");
    const std::int64_t count = parse_integer(count_token, line_no, "count");
    if (bin < 0) {
      throw DataError(fmt::format("line {}: negative bin index {}", line_no, bin));
    }
    if (count < 0) {
      throw DataError(fmt::format("line {}: negative count {}", line_no, count));
    }
    if (!bins.emplace(bin, count).second) {
      throw DataError(fmt::format("line {}: duplicate bin {}", line_no, bin));
    }
  }
  if (bins.empty()) {
    throw DataError("dataset contains no bins");
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins.rbegin()->first) + 1, 0);
  for (const auto& [bin, count] : bins) {
    counts[static_cast<std::size_t>(bin)] = count;
  }
  return CountHistogram(std::move(counts), std::move(name), std::move(source));
}

std::string serialize_dataset(const CountHistogram& histogram) {
  std::string out;
  if (!histogram.name().empty()) {
    out += fmt::format("# name: {}\n", histogram.name());
  }
  if (!histogram.source().empty()) {
    out += fmt::format("# source: {}\n", histogram.source());
  }
  const auto counts = histogram.counts();
  for (std::size_t n = 0; n < counts.size(); ++n) {
    out += fmt::format("{} {}\n", n, counts[n]);
  }
  return out;
}

CountHistogram load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(fmt::format("cannot open dataset '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str());
}

}  // namespace cpfit
