#pragma once

#include <memory>
#include <string>
#include <thread>

namespace capql::library {

/// HTTP/JSON frontend for the reservation backend.
///
/// Routes:
///   POST   /reserve                        {"book_id": "..."}
///   GET    /reservations
///   DELETE /reservations/{r_id}
///   GET    /search?fname=...&lname=...
///   GET    /books/{book_id}/reservation-count
///
/// Authentication is the demo-grade `X-User: <firstname lastname>` header.
/// Each request opens its own engine connection, so check triggers stay
/// isolated between concurrent requests. Contract and constraint
/// violations map to 403, validation errors to 400, engine errors to 500.
class LibraryServer {
public:
    explicit LibraryServer(std::string db_path);
    ~LibraryServer();

    LibraryServer(const LibraryServer&) = delete;
    LibraryServer& operator=(const LibraryServer&) = delete;

    /// Bind and serve on a background thread; port 0 picks an ephemeral
    /// port. Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

private:
    struct Impl;
    std::string db_path_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

} // namespace capql::library
