#include "capql/service/server.hpp"

#include <functional>

#include <httplib.h>
#include <json.hpp>

#include "capql/authority.hpp"
#include "capql/capql.hpp"
#include "capql/service/endpoints.hpp"

namespace capql::library {

using nlohmann::json;

struct LibraryServer::Impl {
    httplib::Server server;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

/// Per-request trusted entry: authenticate, open a fresh connection, mint
/// the base capabilities, and run the handler inside the user scope.
void handle(const std::string& db_path, const httplib::Request& req, httplib::Response& res,
            const std::function<std::string(const RootAuthority&)>& body) {
    std::string user = req.get_header_value("X-User");
    if (user.empty()) {
        send_json(res, 401, json{{"error", "missing X-User header"}});
        return;
    }
    try {
        auto conn = Connection::open(db_path);
        auto card = lookup_card_id(*conn, user);
        if (!card) {
            send_json(res, 403, json{{"error", "unknown user: " + user}});
            return;
        }
        RootAuthority auth = RootAuthority::adopt("library", conn);
        std::string out = with_user(std::to_string(*card), [&] { return body(auth); });
        res.status = 200;
        res.set_content(out, "application/json");
    } catch (const ContractViolation& e) {
        send_json(res, 403, json{{"error", e.what()}});
    } catch (const ViewConstraintViolation& e) {
        send_json(res, 403, json{{"error", e.what()}});
    } catch (const EngineError& e) {
        send_json(res, 500, json{{"error", e.what()}});
    } catch (const Error& e) {
        send_json(res, 400, json{{"error", e.what()}});
    }
}

} // namespace

LibraryServer::LibraryServer(std::string db_path)
    : db_path_(std::move(db_path)), impl_(std::make_unique<Impl>()) {
    auto& server = impl_->server;
    const std::string db = db_path_;

    server.Post("/reserve", [db](const httplib::Request& req, httplib::Response& res) {
        handle(db, req, res, [&](const RootAuthority& auth) {
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("book_id")) {
                throw Error("request body must be JSON with a book_id field");
            }
            std::string book = body["book_id"].is_string()
                                   ? body["book_id"].get<std::string>()
                                   : std::to_string(body["book_id"].get<std::int64_t>());
            Value out = endpoints().reserve(
                {Value{book}, Value{make_view(auth, "library", "reservations")}});
            return std::get<std::string>(out);
        });
    });

    server.Get("/reservations", [db](const httplib::Request& req, httplib::Response& res) {
        handle(db, req, res, [&](const RootAuthority& auth) {
            Value out = endpoints().my_reservations(
                {Value{make_view(auth, "library", "reservations")},
                 Value{make_view(auth, "library", "books")},
                 Value{make_view(auth, "library", "authors")}});
            return std::get<std::string>(out);
        });
    });

    server.Delete(R"(/reservations/([^/]+))",
                  [db](const httplib::Request& req, httplib::Response& res) {
                      handle(db, req, res, [&](const RootAuthority& auth) {
                          Value out = endpoints().remove_reservation(
                              {Value{req.matches[1].str()},
                               Value{make_view(auth, "library", "reservations")}});
                          return std::get<std::string>(out);
                      });
                  });

    server.Get("/search", [db](const httplib::Request& req, httplib::Response& res) {
        handle(db, req, res, [&](const RootAuthority& auth) {
            if (!req.has_param("fname") || !req.has_param("lname")) {
                throw Error("search requires fname and lname parameters");
            }
            Value out = endpoints().search_author(
                {Value{req.get_param_value("fname")}, Value{req.get_param_value("lname")},
                 Value{make_view(auth, "library", "authors")},
                 Value{make_view(auth, "library", "books")}});
            return std::get<std::string>(out);
        });
    });

    server.Get(R"(/books/([^/]+)/reservation-count)",
               [db](const httplib::Request& req, httplib::Response& res) {
                   handle(db, req, res, [&](const RootAuthority& auth) {
                       Value out = endpoints().num_reservations(
                           {Value{req.matches[1].str()},
                            Value{make_view(auth, "library", "reservations")}});
                       // string? results travel as JSON strings
                       return json(std::get<std::string>(out)).dump();
                   });
               });
}

LibraryServer::~LibraryServer() {
    stop();
}

int LibraryServer::start(const std::string& host, int port) {
    auto& server = impl_->server;
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    server.wait_until_ready();
    return bound;
}

void LibraryServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace capql::library
