#pragma once

#include <memory>
#include <string>

namespace pwlab {

class Simulator;

/// Exposes a Simulator over HTTP/1.1. The Host header selects the site,
/// so a single listener serves the whole corpus.
class Server {
public:
    explicit Server(Simulator& sim);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns the
    /// bound port. Throws BindError.
    int bind(const std::string& host, int port);

    /// Serves until stop() is called. bind() first.
    void run();
    /// run() on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pwlab
