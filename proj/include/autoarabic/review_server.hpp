// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "autoarabic/review.hpp"

namespace httplib {
class Server;
}

namespace autoarabic {

struct ServerOptions {
    std::string bind_address = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    /// Static assets mounted at `/` when set.
    std::filesystem::path static_dir;
};

nlohmann::ordered_json to_json(const ReviewTask& t);
/// Live breakdown of the corpus flags, as served by /api/stats.
nlohmann::ordered_json stats_json(const Corpus& corpus);

/// HTTP front of the review stage:
///
///     GET  /api/queue?budget=&state=
///     GET  /api/captions/{id}
///     POST /api/captions/{id}/edit      {after, categories, annotator_id, version}
///     POST /api/captions/{id}/approve   {annotator_id, version}
///     POST /api/captions/{id}/skip
///     GET  /api/stats
///     GET  /api/export?budget=
///
/// 400 on validation errors, 404 on unknown ids, 409 on task or version
/// conflicts.
class ReviewServer {
public:
    ReviewServer(CorpusStore& store, ReviewService& service, ServerOptions options);
    ~ReviewServer();

    ReviewServer(const ReviewServer&) = delete;
    ReviewServer& operator=(const ReviewServer&) = delete;

    /// Binds and starts serving on a background thread. Throws
    /// TransportError when the address cannot be bound.
    void start();
    /// Port actually bound; valid after start().
    int port() const noexcept { return port_; }
    /// Blocks until stop() is called from elsewhere.
    void wait();
    /// Stops accepting requests, waits for the listener and compacts the
    /// store so the journal is folded into the snapshot.
    void stop();

private:
    void routes();

    CorpusStore& store_;
    ReviewService& service_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::thread listener_;
    int port_ = 0;
    bool stopped_ = false;
};

}  // namespace autoarabic
