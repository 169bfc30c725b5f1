#include "capql/service/baseline.hpp"

#include <algorithm>

#include <json.hpp>

namespace capql::library {

using nlohmann::json;

std::string BaselineEndpoints::reserve(Connection& conn, std::int64_t card,
                                       const std::string& book) {
    conn.execute("INSERT INTO reservations (book, cardholder_id) VALUES (?, ?)",
                 std::vector<SqlValue>{SqlValue{book}, SqlValue{card}});
    return json{{"status", "ok"}}.dump();
}

std::string BaselineEndpoints::my_reservations(Connection& conn, std::int64_t card) {
    RowSet rows = conn.query(
        "SELECT r_id, title, firstname, lastname FROM reservations"
        " JOIN books ON book = book_id JOIN authors ON author = author_id"
        " WHERE cardholder_id = ? ORDER BY r_id",
        std::vector<SqlValue>{SqlValue{card}});
    json out = json::array();
    for (const auto& row : rows.rows) {
        out.push_back({{"r_id", std::get<std::int64_t>(row[0])},
                       {"title", std::get<std::string>(row[1])},
                       {"author", std::get<std::string>(row[2]) + " " +
                                      std::get<std::string>(row[3])}});
    }
    return out.dump();
}

std::string BaselineEndpoints::remove_reservation(Connection& conn, std::int64_t card,
                                                  const std::string& r_id) {
    std::int64_t deleted =
        conn.execute("DELETE FROM reservations WHERE r_id = ? AND cardholder_id = ?",
                     std::vector<SqlValue>{SqlValue{r_id}, SqlValue{card}});
    return json{{"deleted", deleted}}.dump();
}

std::string BaselineEndpoints::search_author(Connection& conn, const std::string& fname,
                                             const std::string& lname) {
    RowSet rows =
        conn.query("SELECT title FROM authors JOIN books ON author_id = author"
                   " WHERE firstname = ? AND lastname = ?",
                   std::vector<SqlValue>{SqlValue{fname}, SqlValue{lname}});
    std::vector<std::string> titles;
    for (const auto& row : rows.rows) {
        titles.push_back(std::get<std::string>(row[0]));
    }
    std::sort(titles.begin(), titles.end());
    return json(titles).dump();
}

std::string BaselineEndpoints::num_reservations(Connection& conn, const std::string& book) {
    RowSet rows = conn.query("SELECT COUNT(*) FROM reservations WHERE book = ?",
                             std::vector<SqlValue>{SqlValue{book}});
    return std::to_string(std::get<std::int64_t>(rows.rows[0][0]));
}

} // namespace capql::library
