/// @file  service.hpp
/// @brief HTTP/JSON facade over parsing, compilation and analysis
///
/// Endpoints (JSON bodies, errors as `{code, message, line?}`):
///
///     POST /sessions                          {"widths":{...}}?
///     PUT  /sessions/{id}/rulesets/{slot}     {"text": "...", "name": "..."}
///     POST /sessions/{id}/query               {"slot","where","order","summary","not_allowed","row_budget"}
///     POST /sessions/{id}/diff                {"order","where","row_budget"}
///     GET  /sessions/{id}/redundant?slot=old
///     GET  /sessions/{id}/stats?slot=old
///
/// Slots are "old" and "new"; both share the session's manager.

#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "aclbdd/analysis.hpp"
#include "aclbdd/layout.hpp"

namespace httplib {
class Server;
}

namespace aclbdd {

class Service {
public:
  using Clock = std::chrono::steady_clock;

  struct Options {
    Widths widths{};
    std::size_t row_budget = kDefaultRowBudget;
    std::chrono::seconds idle_expiry{3600};
  };

  struct Response {
    int status = 200;
    nlohmann::json body;
  };

  Service() : Service(Options{}) {}
  explicit Service(Options options);
  ~Service();

  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  /// Transport-independent entry point; `query` holds URL parameters.
  Response handle(std::string_view method, std::string_view path,
                  const std::map<std::string, std::string> &query, std::string_view body);

  /// Registers every endpoint on `server`.
  void mount(httplib::Server &server);

  /// Drops sessions idle since before `now - idle_expiry`.
  void expire_idle(Clock::time_point now);
  [[nodiscard]] std::size_t session_count() const;

private:
  struct Session;

  std::shared_ptr<Session> find_session(const std::string &id);
  Response create_session(const nlohmann::json &body);
  Response load(Session &s, const std::string &slot, const nlohmann::json &body);
  Response query(Session &s, const nlohmann::json &body);
  Response diff(Session &s, const nlohmann::json &body);
  Response redundant(Session &s, const std::string &slot);
  Response stats(Session &s, const std::string &slot);

  Options options_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
};

/// Blocks serving `service` on `address` ("host:port" or ":port").
/// Returns false if the address cannot be bound.
bool serve(Service &service, const std::string &address);

} // namespace aclbdd
