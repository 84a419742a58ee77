#include "acpm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acpm/errors.hpp"

namespace acpm::config {

std::string Value::kind_name() const {
  switch (kind) {
    case Kind::boolean: return "boolean";
    case Kind::number: return "number";
    case Kind::string: return "string";
    case Kind::array: return "array";
  }
  return "value";
}

namespace {

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::map<std::string, Value> run() {
    std::map<std::string, Value> out;
    std::string table;
    while (true) {
      skip_blank_and_comments();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        table = dotted_key(']');
        expect(']');
        end_of_line();
        continue;
      }
      const std::string key = dotted_key('=');
      skip_inline_space();
      expect('=');
      skip_inline_space();
      Value v = value();
      end_of_line();
      const std::string full = table.empty() ? key : table + "." + key;
      if (!out.emplace(full, std::move(v)).second) fail("duplicate key '" + full + "'");
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    const auto line = 1 + std::count(text_.begin(), text_.begin() + static_cast<long>(std::min(pos_, text_.size())), '\n');
    throw ValidationError("config line " + std::to_string(line) + ": " + what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }

  void skip_blank_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_inline_space();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (!at_end() && peek() != '\n') fail("unexpected trailing characters");
  }

  std::string dotted_key(char terminator) {
    std::string key;
    while (true) {
      skip_inline_space();
      std::string part;
      if (peek() == '"') {
        part = basic_string();
      } else {
        while (!at_end() && is_key_char(peek())) part += text_[pos_++];
      }
      if (part.empty()) fail("expected a key");
      key += key.empty() ? part : "." + part;
      skip_inline_space();
      if (peek() == '.') {
        ++pos_;
        continue;
      }
      if (peek() != terminator) fail(std::string("expected '") + terminator + "' after key '" + key + "'");
      return key;
    }
  }

  std::string basic_string() {
    expect('"');
    std::string s;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') return s;
      if (c != '\\') {
        s += c;
        continue;
      }
      const char e = text_[pos_++];
      switch (e) {
        case '"': s += '"'; break;
        case '\\': s += '\\'; break;
        case 'n': s += '\n'; break;
        case 't': s += '\t'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  std::string literal_string() {
    expect('\'');
    const auto close = text_.find_first_of("'\n", pos_);
    if (close == std::string_view::npos || text_[close] != '\'') fail("unterminated string");
    std::string s(text_.substr(pos_, close - pos_));
    pos_ = close + 1;
    return s;
  }

  Value value() {
    Value v;
    const char c = peek();
    if (c == '"' || c == '\'') {
      v.kind = Value::Kind::string;
      v.string = c == '"' ? basic_string() : literal_string();
    } else if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::array;
      while (true) {
        skip_blank_and_comments();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        v.items.push_back(value());
        skip_blank_and_comments();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    } else {
      std::string word;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || std::string_view("+-._").find(peek()) != std::string_view::npos))
        word += text_[pos_++];
      if (word == "true" || word == "false") {
        v.kind = Value::Kind::boolean;
        v.boolean = word == "true";
      } else {
        v.kind = Value::Kind::number;
        word.erase(std::remove(word.begin(), word.end(), '_'), word.end());
        const char* first = word.data() + (!word.empty() && word[0] == '+' ? 1 : 0);
        const auto [ptr, ec] = std::from_chars(first, word.data() + word.size(), v.number);
        if (word.empty() || ec != std::errc() || ptr != word.data() + word.size() || !std::isfinite(v.number))
          fail("invalid value '" + word + "'");
      }
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Document Document::parse(std::string_view text) {
  Document d;
  d.values_ = Parser(text).run();
  return d;
}

Document Document::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Value* Document::find(const std::string& key, Value::Kind kind) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  Value wanted;
  wanted.kind = kind;
  if (it->second.kind != kind)
    throw ValidationError("config key '" + key + "' must be a " + wanted.kind_name() + ", got " +
                          it->second.kind_name());
  return &it->second;
}

std::optional<double> Document::number(const std::string& key) const {
  const Value* v = find(key, Value::Kind::number);
  return v ? std::optional(v->number) : std::nullopt;
}

std::optional<int> Document::integer(const std::string& key) const {
  const auto n = number(key);
  if (!n) return std::nullopt;
  if (*n != std::floor(*n) || std::abs(*n) > 2e9) throw ValidationError("config key '" + key + "' must be an integer");
  return static_cast<int>(*n);
}

std::optional<bool> Document::boolean(const std::string& key) const {
  const Value* v = find(key, Value::Kind::boolean);
  return v ? std::optional(v->boolean) : std::nullopt;
}

std::optional<std::string> Document::string(const std::string& key) const {
  const Value* v = find(key, Value::Kind::string);
  return v ? std::optional(v->string) : std::nullopt;
}

std::optional<std::vector<std::string>> Document::strings(const std::string& key) const {
  const Value* v = find(key, Value::Kind::array);
  if (!v) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& item : v->items) {
    if (item.kind != Value::Kind::string) throw ValidationError("config key '" + key + "' must hold strings");
    out.push_back(item.string);
  }
  return out;
}

std::optional<std::vector<double>> Document::numbers(const std::string& key) const {
  const Value* v = find(key, Value::Kind::array);
  if (!v) return std::nullopt;
  std::vector<double> out;
  for (const auto& item : v->items) {
    if (item.kind != Value::Kind::number) throw ValidationError("config key '" + key + "' must hold numbers");
    out.push_back(item.number);
  }
  return out;
}

std::vector<std::string> Document::unknown_keys(const std::vector<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [key, _] : values_)
    if (std::find(known.begin(), known.end(), key) == known.end()) out.push_back(key);
  return out;
}

}  // namespace acpm::config
