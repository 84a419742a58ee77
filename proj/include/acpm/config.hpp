#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acpm::config {

/// One value of a TOML-style config file.
struct Value {
  enum class Kind { boolean, number, string, array };

  Kind kind = Kind::string;
  bool boolean = false;
  double number = 0.0;
  std::string string;
  std::vector<Value> items;

  std::string kind_name() const;
};

/// The subset of TOML used by run configs: `[table]` headers (dotted names allowed), `key = value`
/// lines, `#` comments, basic and literal strings, decimal numbers, booleans, and arrays that
/// may span several lines. Keys are stored flattened as "table.key".
class Document {
 public:
  static Document parse(std::string_view text);
  static Document parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, Value>& values() const { return values_; }

  /// Typed accessors; a present key of the wrong kind is a ValidationError.
  std::optional<double> number(const std::string& key) const;
  std::optional<int> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  std::optional<std::string> string(const std::string& key) const;
  std::optional<std::vector<std::string>> strings(const std::string& key) const;
  std::optional<std::vector<double>> numbers(const std::string& key) const;

  /// Every key not in `known`, for reporting typos.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  const Value* find(const std::string& key, Value::Kind kind) const;
  std::map<std::string, Value> values_;
};

}  // namespace acpm::config
