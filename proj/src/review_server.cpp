// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 AutoArabic Contributors

#include "autoarabic/review_server.hpp"

#include <httplib.h>

#include "autoarabic/analytics.hpp"
#include "autoarabic/corpus_store.hpp"
#include "autoarabic/errors.hpp"
#include "autoarabic/logging.hpp"

namespace autoarabic {

using ojson = nlohmann::ordered_json;

ojson to_json(const ReviewTask& t) {
    ojson j;
    j["caption_id"] = t.caption_id;
    j["source_text"] = t.source_text;
    j["presented_text"] = t.presented_text;
    j["flags"] = t.flags.tokens();
    j["review_needed"] = t.review_needed;
    j["suggested_fix"] = t.suggested_fix ? ojson(*t.suggested_fix) : ojson(nullptr);
    j["assigned_to"] = t.assigned_to ? ojson(*t.assigned_to) : ojson(nullptr);
    j["state"] = std::string(to_string(t.state));
    j["version"] = t.version;
    return j;
}

ojson stats_json(const Corpus& corpus) {
    const auto b = analytics::error_breakdown([&] {
        std::vector<CategorySet> flags;
        for (const auto& [id, r] : corpus.captions()) flags.push_back(r.flags);
        return flags;
    }());
    ojson j;
    j["captions"] = b.total;
    ojson categories = ojson::object();
    for (auto c : kAllCategories) {
        categories[std::string(to_token(c))] = {{"count", b.marginal_count(c)},
                                                {"rate", analytics::round_to(b.marginal_rate(c), 1)}};
    }
    j["categories"] = std::move(categories);
    ojson pairs = ojson::object();
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        for (std::size_t k = i + 1; k < kCategoryCount; ++k) {
            const auto a = kAllCategories[i], c = kAllCategories[k];
            if (b.pair_count(a, c) == 0) continue;
            pairs[std::string(to_token(a)) + "+" + std::string(to_token(c))] = {
                {"count", b.pair_count(a, c)}, {"rate", analytics::round_to(b.pair_rate(a, c), 1)}};
        }
    }
    j["pairs"] = std::move(pairs);
    j["union"] = {{"count", b.union_count}, {"rate", analytics::round_to(b.union_rate(), 1)}};
    std::size_t review_needed = 0;
    for (const auto& [id, f] : corpus.flag_records()) review_needed += f.review_needed ? 1 : 0;
    j["review_needed"] = review_needed;
    ojson status = ojson::object();
    for (auto s : {Status::pending, Status::translated, Status::flagged, Status::edited, Status::approved}) {
        status[std::string(to_string(s))] = 0;
    }
    for (const auto& [id, r] : corpus.captions()) {
        auto& slot = status[std::string(to_string(r.status))];
        slot = slot.get<std::size_t>() + 1;
    }
    j["status"] = std::move(status);
    return j;
}

namespace {

void send_json(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, ojson{{"error", message}});
}

template <typename F>
httplib::Server::Handler guarded(F fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const NotFoundError& e) {
            send_error(res, 404, e.what());
        } catch (const ConflictError& e) {
            send_error(res, 409, e.what());
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what());
        } catch (const nlohmann::json::exception& e) {
            send_error(res, 400, std::string("malformed JSON body: ") + e.what());
        } catch (const std::exception& e) {
            log::error(std::string("review server: ") + e.what());
            send_error(res, 500, e.what());
        }
    };
}

nlohmann::json parse_body(const httplib::Request& req) {
    auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw ValidationError("request body must be a JSON object");
    return body;
}

std::string required_string(const nlohmann::json& body, const char* field) {
    auto it = body.find(field);
    if (it == body.end() || !it->is_string()) throw ValidationError(std::string(field) + " must be a string");
    return it->get<std::string>();
}

std::optional<std::size_t> optional_version(const nlohmann::json& body) {
    auto it = body.find("version");
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_unsigned()) throw ValidationError("version must be a non-negative integer");
    return it->get<std::size_t>();
}

std::optional<Budget> budget_param(const httplib::Request& req) {
    if (!req.has_param("budget")) return std::nullopt;
    return budget_from_string(req.get_param_value("budget"));
}

}  // namespace

ReviewServer::ReviewServer(CorpusStore& store, ReviewService& service, ServerOptions options)
    : store_(store), service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
    // SO_REUSEADDR only, without SO_REUSEPORT.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    routes();
}

ReviewServer::~ReviewServer() {
    try {
        stop();
    } catch (const std::exception& e) {
        log::error(std::string("review server shutdown: ") + e.what());
    }
}

void ReviewServer::routes() {
    auto& s = *server_;

    s.Get("/api/queue", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Budget budget = budget_param(req).value_or(service_.budget());
        std::optional<TaskState> state;
        if (req.has_param("state")) state = task_state_from_string(req.get_param_value("state"));
        ojson out = ojson::array();
        for (const auto& t : service_.queue(budget, state)) out.push_back(to_json(t));
        send_json(res, 200, out);
    }));

    s.Get(R"(/api/captions/(.+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        auto body = store_.read([&](const Corpus& c) {
            const CaptionRecord& r = c.at(id);
            ojson j = autoarabic::to_json(r);
            j["version"] = r.history.size();
            if (auto it = c.flag_records().find(id); it != c.flag_records().end()) {
                j["flag_record"] = autoarabic::to_json(it->second);
            } else {
                j["flag_record"] = nullptr;
            }
            if (auto it = c.notes().find(id); it != c.notes().end()) {
                j["note"] = it->second;
            } else {
                j["note"] = nullptr;
            }
            return j;
        });
        send_json(res, 200, body);
    }));

    s.Post(R"(/api/captions/(.+)/edit)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        store_.read([&](const Corpus& c) { return c.at(id).status; });
        const auto body = parse_body(req);
        const std::string after = required_string(body, "after");
        const std::string annotator = required_string(body, "annotator_id");
        CategorySet categories;
        if (auto it = body.find("categories"); it != body.end() && !it->is_null()) {
            if (!it->is_array()) throw ValidationError("categories must be an array of category tokens");
            std::vector<std::string> tokens;
            for (const auto& t : *it) {
                if (!t.is_string()) throw ValidationError("categories must be an array of category tokens");
                tokens.push_back(t.get<std::string>());
            }
            categories = CategorySet::from_tokens(tokens);
        }
        const EditRecord edit = service_.submit_edit(id, after, categories, annotator, optional_version(body));
        send_json(res, 200, autoarabic::to_json(edit));
    }));

    s.Post(R"(/api/captions/(.+)/approve)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        store_.read([&](const Corpus& c) { return c.at(id).status; });
        const auto body = parse_body(req);
        const auto result = service_.approve(id, required_string(body, "annotator_id"), optional_version(body));
        ojson out{{"caption_id", id}, {"applied", result.applied}};
        out["warning"] = result.warning ? ojson(*result.warning) : ojson(nullptr);
        send_json(res, 200, out);
    }));

    s.Post(R"(/api/captions/(.+)/skip)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        service_.skip(id);
        send_json(res, 200, ojson{{"caption_id", id}, {"state", "skipped"}});
    }));

    s.Get("/api/stats", guarded([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, store_.read([](const Corpus& c) { return stats_json(c); }));
    }));

    s.Get("/api/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Budget budget = budget_param(req).value_or(service_.budget());
        const std::string body = store_.read([&](const Corpus& c) { return export_materialized(c, budget); });
        res.status = 200;
        res.set_content(body, "application/x-ndjson; charset=utf-8");
    }));

    if (!options_.static_dir.empty()) {
        if (!s.set_mount_point("/", options_.static_dir.string())) {
            throw ConfigError("static directory not found: " + options_.static_dir.string());
        }
    }
}

void ReviewServer::start() {
    if (options_.port == 0) {
        port_ = server_->bind_to_any_port(options_.bind_address);
        if (port_ < 0) throw TransportError("cannot bind " + options_.bind_address);
    } else {
        if (!server_->bind_to_port(options_.bind_address, options_.port)) {
            throw TransportError("cannot bind " + options_.bind_address + ":" + std::to_string(options_.port) +
                                 " (port busy?)");
        }
        port_ = options_.port;
    }
    listener_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    log::info("review service listening on " + options_.bind_address + ":" + std::to_string(port_));
}

void ReviewServer::wait() {
    if (listener_.joinable()) listener_.join();
}

void ReviewServer::stop() {
    if (stopped_) return;
    stopped_ = true;
    server_->stop();
    if (listener_.joinable()) listener_.join();
    store_.compact();
}

}  // namespace autoarabic
