#include "capql/service/fixture.hpp"

#include <filesystem>

namespace capql::library {

void create_schema(Connection& conn) {
    conn.execute("CREATE TABLE cardholders ("
                 " card_id INTEGER PRIMARY KEY,"
                 " firstname TEXT NOT NULL,"
                 " lastname TEXT NOT NULL)");
    conn.execute("CREATE TABLE authors ("
                 " author_id INTEGER PRIMARY KEY,"
                 " firstname TEXT NOT NULL,"
                 " lastname TEXT NOT NULL)");
    conn.execute("CREATE TABLE books ("
                 " book_id INTEGER PRIMARY KEY,"
                 " author INTEGER NOT NULL REFERENCES authors(author_id),"
                 " title TEXT NOT NULL,"
                 " copies INTEGER NOT NULL)");
    conn.execute("CREATE TABLE reservations ("
                 " r_id INTEGER PRIMARY KEY,"
                 " book INTEGER NOT NULL REFERENCES books(book_id),"
                 " cardholder_id INTEGER NOT NULL REFERENCES cardholders(card_id))");
}

void seed_data(Connection& conn) {
    conn.execute("INSERT INTO cardholders (card_id, firstname, lastname) VALUES"
                 " (1, 'Steve', 'Martin'),"
                 " (2, 'Richard', 'Pryor')");
    conn.execute("INSERT INTO authors (author_id, firstname, lastname) VALUES"
                 " (1, 'Trevor', 'Noah'),"
                 " (2, 'Tina', 'Fey')");
    conn.execute("INSERT INTO books (book_id, author, title, copies) VALUES"
                 " (1, 1, 'Born a Crime', 4),"
                 " (2, 2, 'Bossypants', 6)");
    conn.execute("INSERT INTO reservations (r_id, book, cardholder_id) VALUES"
                 " (1, 2, 2),"
                 " (2, 1, 2)");
}

void create_fixture_db(const std::string& path) {
    std::filesystem::remove(path);
    auto conn = Connection::create(path);
    create_schema(*conn);
    seed_data(*conn);
}

std::shared_ptr<Connection> fixture_memory_db() {
    auto conn = Connection::open(":memory:");
    create_schema(*conn);
    seed_data(*conn);
    return conn;
}

} // namespace capql::library
