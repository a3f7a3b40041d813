#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bae/types.hpp"

namespace bae {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split_fields(std::string_view line, char delimiter = ',');

std::string join_doubles(const Eigen::Ref<const Eigen::VectorXd>& values, char delimiter = ',');
std::optional<Eigen::VectorXd> parse_doubles(std::string_view text, char delimiter = ',');

/// Ordered `key=value` text, one pair per line. Blank lines and lines
/// starting with '#' are ignored on read.
class KeyValueFile {
 public:
  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;
  static KeyValueFile parse(std::string_view text);  // throws ConfigError
  void write(const std::filesystem::path& path) const;
  static KeyValueFile read(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace bae
