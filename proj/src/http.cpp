#include "pwlab/http.hpp"

#include "httplib.h"
#include "pwlab/errors.hpp"
#include "pwlab/simulator.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"

namespace pwlab {

std::optional<std::string> find_header(const Headers& headers, std::string_view name) {
    const auto want = text::to_lower(name);
    for (const auto& [k, v] : headers) {
        if (text::to_lower(k) == want) return v;
    }
    return std::nullopt;
}

HttpResponse HttpResponse::text(int status, std::string content_type, std::string body) {
    HttpResponse r;
    r.status = status;
    r.headers.emplace_back("Content-Type", std::move(content_type));
    r.body = std::move(body);
    return r;
}

HttpResponse InProcessTransport::send(const HttpRequest& request) { return sim_.handle(request); }

struct HttpTransport::Impl {
    std::string host;
    int port;
};

HttpTransport::HttpTransport(std::string host, int port) : impl_(std::make_unique<Impl>(Impl{std::move(host), port})) {}
HttpTransport::~HttpTransport() = default;

HttpResponse HttpTransport::send(const HttpRequest& request) {
    const auto url = Url::parse(request.url);
    if (!url) throw FetchError("invalid url " + request.url);
    httplib::Client client(impl_->host, impl_->port);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);

    httplib::Headers headers;
    headers.emplace("Host", url->host);
    std::string content_type = "application/octet-stream";
    for (const auto& [k, v] : request.headers) {
        if (text::to_lower(k) == "content-type") {
            content_type = v;
        } else {
            headers.emplace(k, v);
        }
    }
    const auto target = url->target();
    auto result = request.method == "POST" ? client.Post(target, headers, request.body, content_type)
                                           : client.Get(target, headers);
    if (!result) {
        throw FetchError(request.method + " " + request.url + ": " + httplib::to_string(result.error()));
    }
    HttpResponse resp;
    resp.status = result->status;
    for (const auto& [k, v] : result->headers) resp.headers.emplace_back(k, v);
    resp.body = result->body;
    return resp;
}

}  // namespace pwlab
