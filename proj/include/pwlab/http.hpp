#pragma once

// Minimal HTTP message types and the transports the browser model uses to
// reach a simulator: direct in-process dispatch, or a real HTTP socket.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwlab {

using Headers = std::vector<std::pair<std::string, std::string>>;

/// Case-insensitive header lookup; first match wins.
std::optional<std::string> find_header(const Headers& headers, std::string_view name);

struct HttpRequest {
    std::string method = "GET";
    std::string url;  // absolute
    Headers headers;
    std::string body;

    std::optional<std::string> header(std::string_view name) const { return find_header(headers, name); }
};

struct HttpResponse {
    int status = 200;
    Headers headers;
    std::string body;

    std::optional<std::string> header(std::string_view name) const { return find_header(headers, name); }
    static HttpResponse text(int status, std::string content_type, std::string body);
};

class Simulator;

class Transport {
public:
    virtual ~Transport() = default;
    /// Throws FetchError when the request cannot be delivered.
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

class InProcessTransport final : public Transport {
public:
    explicit InProcessTransport(Simulator& sim) : sim_(sim) {}
    HttpResponse send(const HttpRequest& request) override;

private:
    Simulator& sim_;
};

/// Sends every request to host:port over HTTP/1.1, keeping the URL's host
/// in the Host header so one server can answer for all simulated sites.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string host, int port);
    ~HttpTransport() override;
    HttpResponse send(const HttpRequest& request) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pwlab
