#pragma once

// Path-tracking accessors over nlohmann::ordered_json. Every failure names
// the JSON path that was wrong.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pwlab/errors.hpp"

namespace pwlab::jsonutil {

using nlohmann::ordered_json;

inline ordered_json parse(std::string_view bytes) {
    try {
        return ordered_json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

class ArrayReader;

class Reader {
public:
    Reader(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError(display(path_) + ": expected an object");
    }

    const std::string& path() const { return path_; }
    const ordered_json& raw() const { return j_; }
    bool has(std::string_view key) const { return j_.contains(key); }

    const ordered_json& at(std::string_view key) const {
        auto it = j_.find(key);
        if (it == j_.end()) throw SchemaError(child(key) + ": missing field");
        return *it;
    }

    std::string str(std::string_view key) const {
        const auto& v = at(key);
        if (!v.is_string()) throw SchemaError(child(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::optional<std::string> opt_str(std::string_view key) const {
        const auto& v = at(key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_string()) throw SchemaError(child(key) + ": expected a string or null");
        return v.get<std::string>();
    }

    std::int64_t i64(std::string_view key) const {
        const auto& v = at(key);
        if (!v.is_number_integer()) throw SchemaError(child(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t u64(std::string_view key) const {
        const auto& v = at(key);
        if (!v.is_number_unsigned()) throw SchemaError(child(key) + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::optional<std::int64_t> opt_i64(std::string_view key) const {
        const auto& v = at(key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_number_integer()) throw SchemaError(child(key) + ": expected an integer or null");
        return v.get<std::int64_t>();
    }

    double num(std::string_view key) const {
        const auto& v = at(key);
        if (!v.is_number()) throw SchemaError(child(key) + ": expected a number");
        return v.get<double>();
    }

    bool boolean(std::string_view key) const {
        const auto& v = at(key);
        if (!v.is_boolean()) throw SchemaError(child(key) + ": expected a boolean");
        return v.get<bool>();
    }

    Reader obj(std::string_view key) const { return Reader(at(key), child(key)); }
    inline ArrayReader arr(std::string_view key) const;

    void expect_format(std::string_view format) const {
        const auto got = str("format");
        if (got != format) {
            throw VersionMismatch(child("format") + ": expected '" + std::string(format) + "', found '" + got + "'");
        }
    }

    std::string child(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

private:
    static std::string display(const std::string& p) { return p.empty() ? "<root>" : p; }

    const ordered_json& j_;
    std::string path_;
};

class ArrayReader {
public:
    ArrayReader(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_array()) throw SchemaError(path_ + ": expected an array");
    }

    std::size_t size() const { return j_.size(); }
    std::string path_at(std::size_t i) const { return path_ + "[" + std::to_string(i) + "]"; }
    const ordered_json& raw_at(std::size_t i) const { return j_[i]; }
    Reader obj_at(std::size_t i) const { return Reader(j_[i], path_at(i)); }

    std::string str_at(std::size_t i) const {
        if (!j_[i].is_string()) throw SchemaError(path_at(i) + ": expected a string");
        return j_[i].get<std::string>();
    }

    double num_at(std::size_t i) const {
        if (!j_[i].is_number()) throw SchemaError(path_at(i) + ": expected a number");
        return j_[i].get<double>();
    }

    std::int64_t i64_at(std::size_t i) const {
        if (!j_[i].is_number_integer()) throw SchemaError(path_at(i) + ": expected an integer");
        return j_[i].get<std::int64_t>();
    }

private:
    const ordered_json& j_;
    std::string path_;
};

inline ArrayReader Reader::arr(std::string_view key) const { return ArrayReader(at(key), child(key)); }

}  // namespace pwlab::jsonutil
