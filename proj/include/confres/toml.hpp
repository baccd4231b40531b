#pragma once

// Minimal TOML reader covering what the config files use: bare keys,
// [table] / [[array-of-table]] headers with dotted paths, strings, integers,
// floats, booleans, and (possibly nested, multi-line) arrays.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "confres/errors.hpp"

namespace confres::toml {

class Value;
using Array = std::vector<Value>;
using Table = std::vector<std::pair<std::string, Value>>;  // insertion-ordered

class Value {
public:
    enum class Kind { None, Bool, Int, Float, String, Array, Table };

    Value() : data_(std::monostate{}) {}
    Value(bool b) : data_(b) {}
    Value(std::int64_t i) : data_(i) {}
    Value(double d) : data_(d) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(Array a) : data_(std::move(a)) {}
    Value(Table t) : data_(std::move(t)) {}

    Kind kind() const { return static_cast<Kind>(data_.index()); }
    bool is_table() const { return kind() == Kind::Table; }
    bool is_array() const { return kind() == Kind::Array; }

    bool as_bool() const { return expect<bool>("boolean"); }
    std::int64_t as_int() const { return expect<std::int64_t>("integer"); }
    const std::string& as_string() const { return expect<std::string>("string"); }
    const Array& as_array() const { return expect<Array>("array"); }
    const Table& as_table() const { return expect<Table>("table"); }
    Table& as_table() { return std::get<Table>(data_); }

    double as_float() const {
        if (auto* i = std::get_if<std::int64_t>(&data_)) return double(*i);
        return expect<double>("float");
    }

    const Value* find(std::string_view key) const {
        if (!is_table()) return nullptr;
        for (const auto& [k, v] : std::get<Table>(data_))
            if (k == key) return &v;
        return nullptr;
    }

    const Value& at(std::string_view key) const {
        if (const Value* v = find(key)) return *v;
        throw Error("config", "MissingKey", "missing key '" + std::string(key) + "'");
    }

    bool has(std::string_view key) const { return find(key) != nullptr; }

    std::string get_string(std::string_view key, std::string fallback = "") const {
        const Value* v = find(key);
        return v ? v->as_string() : std::move(fallback);
    }
    double get_float(std::string_view key, double fallback) const {
        const Value* v = find(key);
        return v ? v->as_float() : fallback;
    }
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const {
        const Value* v = find(key);
        return v ? v->as_int() : fallback;
    }
    bool get_bool(std::string_view key, bool fallback) const {
        const Value* v = find(key);
        return v ? v->as_bool() : fallback;
    }

    std::vector<double> as_float_array() const {
        std::vector<double> out;
        for (const Value& v : as_array()) out.push_back(v.as_float());
        return out;
    }

private:
    template <typename T>
    const T& expect(const char* what) const {
        if (auto* p = std::get_if<T>(&data_)) return *p;
        throw Error("config", "TypeMismatch", std::string("expected ") + what);
    }

    std::variant<std::monostate, bool, std::int64_t, double, std::string, Array, Table> data_;
};

namespace detail {

struct Parser {
    std::string_view text;
    std::string origin;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error("config", "ParseError",
                    origin + ":" + std::to_string(line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }

    void skip_ws_inline() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
    }

    // Whitespace, newlines and comments; used inside arrays and between lines.
    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    void expect_line_end() {
        skip_ws_inline();
        if (eof()) return;
        if (peek() == '#') {
            while (!eof() && peek() != '\n') advance();
        }
        if (!eof()) {
            if (peek() != '\n') fail("unexpected trailing characters");
            advance();
        }
    }

    static bool is_bare_key_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-';
    }

    std::string parse_key() {
        skip_ws_inline();
        if (!eof() && peek() == '"') return parse_string();
        std::string key;
        while (!eof() && is_bare_key_char(peek())) {
            key += peek();
            advance();
        }
        if (key.empty()) fail("expected key");
        return key;
    }

    std::string parse_string() {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string");
            char c = peek();
            advance();
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = peek();
                advance();
                switch (e) {
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    default: fail("unsupported escape sequence");
                }
            } else {
                out += c;
            }
        }
        return out;
    }

    Value parse_value() {
        skip_ws_and_comments();
        if (eof()) fail("expected value");
        char c = peek();
        if (c == '"') return Value(parse_string());
        if (c == '[') return parse_array();
        if (text.compare(pos, 4, "true") == 0 && boundary(pos + 4)) {
            pos += 4;
            return Value(true);
        }
        if (text.compare(pos, 5, "false") == 0 && boundary(pos + 5)) {
            pos += 5;
            return Value(false);
        }
        return parse_number();
    }

    bool boundary(std::size_t p) const {
        return p >= text.size() || !is_bare_key_char(text[p]);
    }

    Value parse_array() {
        advance();  // '['
        Array items;
        while (true) {
            skip_ws_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                advance();
                break;
            }
            items.push_back(parse_value());
            skip_ws_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ',') {
                advance();
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
        return Value(std::move(items));
    }

    Value parse_number() {
        std::size_t start = pos;
        bool is_float = false;
        if (!eof() && (peek() == '+' || peek() == '-')) advance();
        while (!eof()) {
            char c = peek();
            if (c >= '0' && c <= '9') {
                advance();
            } else if (c == '.' || c == 'e' || c == 'E') {
                is_float = true;
                advance();
                if (!eof() && (peek() == '+' || peek() == '-')) advance();
            } else if (c == '_') {
                advance();
            } else {
                break;
            }
        }
        std::string raw(text.substr(start, pos - start));
        raw.erase(std::remove(raw.begin(), raw.end(), '_'), raw.end());
        if (raw.empty() || raw == "+" || raw == "-") fail("expected number");
        if (is_float) {
            double d = 0;
            auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
            if (ec != std::errc{} || p != raw.data() + raw.size()) fail("bad float '" + raw + "'");
            return Value(d);
        }
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), i);
        if (ec != std::errc{} || p != raw.data() + raw.size()) fail("bad integer '" + raw + "'");
        return Value(i);
    }

    std::vector<std::string> parse_header_path(bool& is_array_of_tables) {
        advance();  // '['
        is_array_of_tables = !eof() && peek() == '[';
        if (is_array_of_tables) advance();
        std::vector<std::string> path;
        while (true) {
            path.push_back(parse_key());
            skip_ws_inline();
            if (!eof() && peek() == '.') {
                advance();
                continue;
            }
            break;
        }
        if (eof() || peek() != ']') fail("expected ']' in table header");
        advance();
        if (is_array_of_tables) {
            if (eof() || peek() != ']') fail("expected ']]' in table header");
            advance();
        }
        expect_line_end();
        return path;
    }
};

inline Table* navigate(Table& root, const std::vector<std::string>& path, std::size_t count,
                       Parser& p) {
    Table* current = &root;
    for (std::size_t i = 0; i < count; ++i) {
        Value* slot = nullptr;
        for (auto& [k, v] : *current)
            if (k == path[i]) slot = &v;
        if (!slot) {
            current->emplace_back(path[i], Value(Table{}));
            slot = &current->back().second;
        }
        if (slot->is_array()) {
            // descend into the most recent element of an array of tables
            auto& arr = const_cast<Array&>(slot->as_array());
            if (arr.empty() || !arr.back().is_table()) p.fail("'" + path[i] + "' is not a table");
            current = &arr.back().as_table();
        } else if (slot->is_table()) {
            current = &slot->as_table();
        } else {
            p.fail("'" + path[i] + "' is not a table");
        }
    }
    return current;
}

}  // namespace detail

inline Value parse(std::string_view text, std::string origin = "<string>") {
    detail::Parser p{text, std::move(origin)};
    Table root;
    Table* current = &root;

    while (true) {
        p.skip_ws_and_comments();
        if (p.eof()) break;
        if (p.peek() == '[') {
            bool is_array = false;
            auto path = p.parse_header_path(is_array);
            Table* parent = detail::navigate(root, path, path.size() - 1, p);
            const std::string& leaf = path.back();
            Value* slot = nullptr;
            for (auto& [k, v] : *parent)
                if (k == leaf) slot = &v;
            if (is_array) {
                if (!slot) {
                    parent->emplace_back(leaf, Value(Array{}));
                    slot = &parent->back().second;
                }
                if (!slot->is_array()) p.fail("'" + leaf + "' redefined as array of tables");
                auto& arr = const_cast<Array&>(slot->as_array());
                arr.push_back(Value(Table{}));
                current = &arr.back().as_table();
            } else {
                if (!slot) {
                    parent->emplace_back(leaf, Value(Table{}));
                    slot = &parent->back().second;
                }
                if (!slot->is_table()) p.fail("'" + leaf + "' redefined as table");
                current = &slot->as_table();
            }
            continue;
        }
        std::string key = p.parse_key();
        p.skip_ws_inline();
        if (p.eof() || p.peek() != '=') p.fail("expected '=' after key '" + key + "'");
        p.advance();
        for (const auto& [k, v] : *current)
            if (k == key) p.fail("duplicate key '" + key + "'");
        current->emplace_back(key, p.parse_value());
        p.expect_line_end();
    }
    return Value(std::move(root));
}

inline Value load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("config", "FileNotFound", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

}  // namespace confres::toml
