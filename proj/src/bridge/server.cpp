#include "caami/bridge/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <fstream>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace caami::bridge {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

constexpr std::size_t max_queued_frames = 256;

}  // namespace

struct BridgeServer::Impl {
    class Connection;

    Impl(LiveSession& s, ServerOptions o) : session(s), options(std::move(o)), acceptor(ioc),
                                             telemetry_timer(ioc), signals(ioc) {}

    void accept();
    void schedule_telemetry();
    void tick_loop();
    void write_logs();
    void signal_stop();

    LiveSession& session;
    ServerOptions options;
    asio::io_context ioc;
    tcp::acceptor acceptor;
    asio::steady_timer telemetry_timer;
    asio::signal_set signals;
    std::weak_ptr<Connection> active;
    std::thread io_thread;
    std::thread tick_thread;
    std::atomic<bool> running{false};
    std::mutex stop_mu;
    std::condition_variable stop_cv;
    bool stop_requested = false;
    bool stopped = false;
};

class BridgeServer::Impl::Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(Impl& server, tcp::socket socket, bool reject)
        : server_(server), ws_(std::move(socket)), reject_(reject) {}

    void run() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->open_ = true;
            if (self->reject_) {
                self->send(json{{"type", "error"}, {"reason", "another console is connected"}});
                self->closing_ = true;
                return;
            }
            self->send_hello();
            self->read();
        });
    }

    void send(const json& j) { send_text(j.dump() + "\n"); }

    void send_telemetry() {
        if (!open_ || reject_) return;
        if (server_.session.generation() != generation_) send_hello();
        if (queue_.size() >= max_queued_frames) return;  // slow client: drop a frame
        send(to_json(server_.session.snapshot()));
    }

    bool open() const { return open_; }

private:
    void send_hello() {
        const json hello = server_.session.hello();
        generation_ = hello.at("generation").get<int>();
        send(hello);
    }

    void send_text(std::string text) {
        queue_.push_back(std::move(text));
        if (queue_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) {
                            if (ec) {
                                self->open_ = false;
                                return;
                            }
                            self->queue_.pop_front();
                            if (!self->queue_.empty()) {
                                self->write();
                            } else if (self->closing_) {
                                self->ws_.async_close(websocket::close_code::try_again_later,
                                                      [self](beast::error_code) {});
                            }
                        });
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->open_ = false;
                return;
            }
            self->on_message(beast::buffers_to_string(self->buffer_.data()));
            self->buffer_.consume(self->buffer_.size());
            self->read();
        });
    }

    void on_message(const std::string& text) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t nl = std::min(text.find('\n', pos), text.size());
            const std::string line = text.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const json reply = server_.session.handle_text(line);
            send(reply);
            if (reply.value("command", "") == "reset" && reply.value("type", "") == "ack") {
                server_.write_logs();
                send_hello();
            }
        }
    }

    Impl& server_;
    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    bool reject_;
    bool open_ = false;
    bool closing_ = false;
    int generation_ = -1;
};

void BridgeServer::Impl::accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (ec) return;  // acceptor closed
        const auto current = active.lock();
        const bool busy = current && current->open();
        auto conn = std::make_shared<Connection>(*this, std::move(socket), busy);
        if (!busy) active = conn;
        conn->run();
        accept();
    });
}

void BridgeServer::Impl::schedule_telemetry() {
    const auto period = std::chrono::duration<double>(1.0 / options.telemetry_rate);
    telemetry_timer.expires_after(std::chrono::duration_cast<std::chrono::nanoseconds>(period));
    telemetry_timer.async_wait([this](beast::error_code ec) {
        if (ec) return;
        if (auto conn = active.lock()) conn->send_telemetry();
        schedule_telemetry();
    });
}

void BridgeServer::Impl::tick_loop() {
    using clock = std::chrono::steady_clock;
    auto next = clock::now();
    while (running) {
        // A reset may change the tick rate, so the period is re-read every tick.
        next += std::chrono::duration_cast<clock::duration>(
            std::chrono::duration<double>(session.dt() / options.realtime_factor));
        std::this_thread::sleep_until(next);
        session.tick();
        if (clock::now() - next > std::chrono::seconds(1)) next = clock::now();  // fell behind
    }
}

void BridgeServer::Impl::write_logs() {
    if (!options.log_dir) return;
    std::filesystem::create_directories(*options.log_dir);
    auto logs = session.finished_logs();
    logs.push_back(session.decision_log());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        std::ofstream out(*options.log_dir / ("live_" + std::to_string(i + 1) + ".jsonl"),
                          std::ios::binary);
        out << logs[i];
    }
}

void BridgeServer::Impl::signal_stop() {
    {
        std::lock_guard lock(stop_mu);
        stop_requested = true;
    }
    stop_cv.notify_all();
}

BridgeServer::BridgeServer(LiveSession& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {
    if (!(impl_->options.realtime_factor > 0.0)) {
        throw std::invalid_argument("realtime factor must be positive");
    }
    if (!(impl_->options.telemetry_rate > 0.0)) {
        throw std::invalid_argument("telemetry rate must be positive");
    }
}

BridgeServer::~BridgeServer() { stop(); }

unsigned short BridgeServer::start() {
    Impl& s = *impl_;
    try {
        const tcp::endpoint endpoint(asio::ip::make_address(s.options.address), s.options.port);
        s.acceptor.open(endpoint.protocol());
        s.acceptor.set_option(asio::socket_base::reuse_address(true));
        s.acceptor.bind(endpoint);
        s.acceptor.listen();
    } catch (const std::exception& e) {
        throw BindError("cannot bind " + s.options.address + ":" +
                        std::to_string(s.options.port) + ": " + e.what());
    }
    s.signals.add(SIGINT);
    s.signals.add(SIGTERM);
    s.signals.async_wait([&s](beast::error_code ec, int) {
        if (!ec) s.signal_stop();
    });
    s.running = true;
    s.accept();
    s.schedule_telemetry();
    s.io_thread = std::thread([&s] { s.ioc.run(); });
    s.tick_thread = std::thread([&s] { s.tick_loop(); });
    return s.acceptor.local_endpoint().port();
}

void BridgeServer::wait() {
    std::unique_lock lock(impl_->stop_mu);
    impl_->stop_cv.wait(lock, [this] { return impl_->stop_requested; });
}

void BridgeServer::stop() {
    Impl& s = *impl_;
    {
        std::lock_guard lock(s.stop_mu);
        if (s.stopped) return;
        s.stopped = true;
        s.stop_requested = true;
    }
    s.stop_cv.notify_all();
    if (!s.io_thread.joinable()) return;  // never started
    s.running = false;
    s.ioc.stop();
    s.io_thread.join();
    s.tick_thread.join();
    s.write_logs();
}

}  // namespace caami::bridge
