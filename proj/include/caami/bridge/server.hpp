#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "caami/bridge/session.hpp"

namespace caami::bridge {

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8765;  // 0 picks a free port
    double realtime_factor = 1.0;
    double telemetry_rate = 10.0;  // Hz of wall time
    /// When set, each trial's decision log is written here on reset and shutdown.
    std::optional<std::filesystem::path> log_dir;
};

class BindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// WebSocket endpoint for one console at a time. Each text frame carries one
/// or more newline-separated JSON messages with a "type" field. The tick
/// clock runs on its own thread; networking runs on an io thread.
class BridgeServer {
public:
    BridgeServer(LiveSession& session, ServerOptions options);
    ~BridgeServer();

    BridgeServer(const BridgeServer&) = delete;
    BridgeServer& operator=(const BridgeServer&) = delete;

    /// Binds and starts serving; returns the bound port. Throws BindError.
    unsigned short start();
    /// Stops both threads and writes pending logs. Idempotent.
    void stop();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace caami::bridge
