#include "pwlab/url.hpp"

#include <charconv>

#include "pwlab/text.hpp"

namespace pwlab {

namespace {

int default_port(std::string_view scheme) { return scheme == "https" ? 443 : 80; }

std::string normalize_path(std::string_view path) {
    std::vector<std::string> out;
    for (auto& seg : text::split(path, '/')) {
        if (seg.empty() || seg == ".") continue;
        if (seg == "..") {
            if (!out.empty()) out.pop_back();
            continue;
        }
        out.push_back(seg);
    }
    std::string joined = "/" + text::join(out, "/");
    if (path.size() > 1 && path.back() == '/' && joined != "/") joined.push_back('/');
    return joined;
}

}  // namespace

std::optional<Url> Url::parse(std::string_view t) {
    auto sep = t.find("://");
    if (sep == std::string_view::npos) return std::nullopt;
    Url u;
    u.scheme = text::to_lower(t.substr(0, sep));
    if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
    auto rest = t.substr(sep + 3);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    auto path_start = rest.find_first_of("/?");
    auto authority = rest.substr(0, path_start);
    if (authority.empty()) return std::nullopt;
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        auto port_text = authority.substr(colon + 1);
        int port = 0;
        auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (ec != std::errc{} || p != port_text.data() + port_text.size() || port <= 0 || port > 65535) {
            return std::nullopt;
        }
        u.port = port == default_port(u.scheme) ? 0 : port;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) return std::nullopt;
    for (char c : authority) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                  c == '.' || c == '_';
        if (!ok) return std::nullopt;
    }
    u.host = text::to_lower(authority);
    if (path_start == std::string_view::npos) return u;
    auto remainder = rest.substr(path_start);
    auto q = remainder.find('?');
    std::string_view path = remainder.substr(0, q);
    u.path = path.empty() ? "/" : normalize_path(path);
    if (q != std::string_view::npos) u.query = std::string(remainder.substr(q + 1));
    return u;
}

std::optional<Url> Url::resolve(std::string_view ref) const {
    if (ref.find("://") != std::string_view::npos) return parse(ref);
    if (ref.substr(0, 2) == "//") return parse(scheme + ":" + std::string(ref));
    if (ref.empty()) return *this;
    Url u = *this;
    u.query.clear();
    if (ref.front() == '?') {
        u.query = std::string(ref.substr(1));
        return u;
    }
    auto q = ref.find('?');
    std::string_view path = ref.substr(0, q);
    if (auto hash = path.find('#'); hash != std::string_view::npos) path = path.substr(0, hash);
    if (!path.empty() && path.front() == '/') {
        u.path = normalize_path(path);
    } else if (!path.empty()) {
        auto slash = this->path.rfind('/');
        u.path = normalize_path(this->path.substr(0, slash + 1) + std::string(path));
    }
    if (q != std::string_view::npos) {
        auto query = ref.substr(q + 1);
        if (auto hash = query.find('#'); hash != std::string_view::npos) query = query.substr(0, hash);
        u.query = std::string(query);
    }
    return u;
}

std::string Url::target() const { return query.empty() ? path : path + "?" + query; }

std::string Url::origin() const {
    std::string o = scheme + "://" + host;
    if (port != 0) o += ":" + std::to_string(port);
    return o;
}

std::string Url::str() const { return origin() + target(); }

bool is_valid_url(std::string_view t) { return Url::parse(t).has_value(); }

std::string host_of(std::string_view url) {
    auto u = Url::parse(url);
    return u ? u->host : std::string{};
}

bool host_matches_domain(std::string_view host, std::string_view domain) {
    if (domain.empty() || host.size() < domain.size()) return false;
    auto h = text::to_lower(host);
    auto d = text::to_lower(domain);
    if (h == d) return true;
    return h.size() > d.size() && h.compare(h.size() - d.size(), d.size(), d) == 0 &&
           h[h.size() - d.size() - 1] == '.';
}

}  // namespace pwlab
