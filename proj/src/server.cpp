#include "pwlab/server.hpp"

#include <sys/socket.h>

#include <thread>

#include "httplib.h"
#include "pwlab/errors.hpp"
#include "pwlab/simulator.hpp"

namespace pwlab {

struct Server::Impl {
    explicit Impl(Simulator& s) : sim(s) {}

    Simulator& sim;
    httplib::Server http;
    std::thread worker;
    bool bound = false;

    void dispatch(const httplib::Request& req, httplib::Response& res) {
        auto host = req.get_header_value("Host");
        if (auto colon = host.find(':'); colon != std::string::npos) host.resize(colon);
        HttpRequest r;
        r.method = req.method;
        r.url = "http://" + host + req.target;
        for (const auto& [k, v] : req.headers) r.headers.emplace_back(k, v);
        r.body = req.body;
        const auto out = sim.handle(r);
        res.status = out.status;
        std::string content_type = "text/plain";
        for (const auto& [k, v] : out.headers) {
            if (k == "Content-Type") {
                content_type = v;
            } else {
                res.set_header(k, v);
            }
        }
        res.set_content(out.body, content_type);
    }
};

Server::Server(Simulator& sim) : impl_(std::make_unique<Impl>(sim)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->dispatch(req, res); };
    impl_->http.Get(".*", handler);
    impl_->http.Post(".*", handler);
    // SO_REUSEADDR only: SO_REUSEPORT would let a second server share a busy port.
    impl_->http.set_socket_options([](int sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    int bound_port = port;
    if (port == 0) {
        bound_port = impl_->http.bind_to_any_port(host);
        if (bound_port < 0) throw BindError("cannot bind " + host + " on any port");
    } else if (!impl_->http.bind_to_port(host, port)) {
        throw BindError("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->bound = true;
    return bound_port;
}

void Server::run() {
    if (!impl_->bound) throw BindError("server is not bound");
    impl_->http.listen_after_bind();
}

void Server::start() {
    if (!impl_->bound) throw BindError("server is not bound");
    impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
}

void Server::stop() {
    impl_->http.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace pwlab
