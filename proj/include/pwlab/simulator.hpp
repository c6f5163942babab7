#pragma once

// The publisher simulator: every site of a corpus answered from one
// request handler, keyed by Host. Thread-safe; each site's meter state is
// guarded by its own mutex.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pwlab/http.hpp"
#include "pwlab/identity.hpp"
#include "pwlab/policy.hpp"

namespace pwlab {

inline constexpr const char* kMeterCookie = "__tp";

/// JSON body the paywall client posts to the meter endpoint.
struct MeterRequest {
    std::string aid;
    ArticleId article = 0;
    std::optional<std::string> referrer;
    bool adblock = false;
    VisitorProfile profile;  // cookie field unused; the cookie travels in the Cookie header
};

std::string serialize_meter_request(const MeterRequest& r);
MeterRequest deserialize_meter_request(std::string_view bytes);

class Simulator {
public:
    explicit Simulator(std::vector<SitePlan> plans);
    ~Simulator();
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    HttpResponse handle(const HttpRequest& request);

    const SitePlan* plan_for_host(std::string_view host) const;
    std::vector<const SitePlan*> plans() const;

    /// Meter of a cookie visitor on one site (test hook).
    MeterState meter_state(std::string_view site_id, const std::string& cookie) const;

private:
    struct Site;
    HttpResponse handle_site(Site& site, const HttpRequest& request);
    HttpResponse handle_meter(Site& site, const HttpRequest& request);

    std::map<std::string, std::unique_ptr<Site>, std::less<>> by_host_;
};

}  // namespace pwlab
