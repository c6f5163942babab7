#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pwlab {

/// Minimal absolute http(s) URL: scheme://host[:port]/path[?query].
/// Fragments are dropped.
struct Url {
    std::string scheme;
    std::string host;
    int port = 0;  // 0 = scheme default
    std::string path = "/";
    std::string query;

    static std::optional<Url> parse(std::string_view text);

    /// Resolves `ref` (absolute, scheme-relative, or path) against this URL.
    std::optional<Url> resolve(std::string_view ref) const;

    /// path plus "?query" when present.
    std::string target() const;
    std::string origin() const;
    std::string str() const;

    friend bool operator==(const Url&, const Url&) = default;
};

bool is_valid_url(std::string_view text);

/// Host of an absolute URL, lowercase; empty when unparsable.
std::string host_of(std::string_view url);

/// True when `host` equals `domain` or is a subdomain of it.
bool host_matches_domain(std::string_view host, std::string_view domain);

}  // namespace pwlab
