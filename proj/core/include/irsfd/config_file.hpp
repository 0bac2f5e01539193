#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace irsfd {

/// File system failures, with the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key/value pairs; later entries override earlier ones when applied.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped,
/// surrounding quotes on values are removed. Throws ConfigError naming the
/// source and line on malformed input.
KeyValues parse_config_text(const std::string& text, const std::string& source = "<text>");

/// Throws IoError if the file cannot be read.
KeyValues load_config_file(const std::filesystem::path& path);

/// "key=value" as given on the command line.
std::pair<std::string, std::string> parse_override(const std::string& arg);

/// Comma separated list, optionally wrapped in [ ].
std::vector<std::string> split_list(const std::string& value);

double parse_double(const std::string& key, const std::string& value);
int parse_int(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);

}  // namespace irsfd
