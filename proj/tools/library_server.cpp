#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "capql/service/fixture.hpp"
#include "capql/service/server.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) {
    g_stop = 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lending-library reservation service"};

    std::string db_path = "library.db";
    std::string host = "127.0.0.1";
    int port = 8080;
    bool init = false;
    app.add_option("--db", db_path, "database file")->capture_default_str();
    app.add_option("--host", host, "bind address")->capture_default_str();
    app.add_option("--port", port, "port (0 = ephemeral)")->capture_default_str();
    app.add_flag("--init", init, "create the schema and seed data, then serve");

    CLI11_PARSE(app, argc, argv);

    if (init) {
        capql::library::create_fixture_db(db_path);
        std::cout << "initialized " << db_path << "\n";
    }

    capql::library::LibraryServer server(db_path);
    int bound = server.start(host, port);
    std::cout << "serving " << db_path << " on http://" << host << ":" << bound << "\n";
    std::cout << "authenticate with the X-User header, e.g. 'X-User: Richard Pryor'\n";

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
    return 0;
}
