#include "capql/service/endpoints.hpp"

#include <algorithm>

#include <json.hpp>

#include "capql/parser.hpp"
#include "capql/view.hpp"

namespace capql::library {

using nlohmann::json;

namespace {

ViewTransform restrict_to_current_cardholder() {
    return [](const ViewPtr& v) {
        return where(v, sqlformat("cardholder_id = $1", {SqlValue{current_user()}}));
    };
}

Contracted make_reserve() {
    FunctionContract fc;
    fc.args = {
        string_arg(),
        view_arg(view_c({insert_priv().restrict(restrict_to_current_cardholder())})),
    };
    fc.result = any_result();
    return define_contracted("reserve", fc, [](const std::vector<Value>& args) {
        const auto& book = std::get<std::string>(args[0]);
        const auto& v_reservations = std::get<ViewPtr>(args[1]);
        insert(v_reservations, {"book", "cardholder_id"},
               {{SqlValue{book}, SqlValue{current_user()}}});
        return Value{json{{"status", "ok"}}.dump()};
    });
}

Contracted make_my_reservations() {
    FunctionContract fc;
    fc.args = {
        view_arg(view_c({fetch_priv().restrict(restrict_to_current_cardholder()),
                         join_priv(), where_priv(), select_priv()})),
        view_arg(view_c({join_priv(), fetch_priv(), select_priv(), where_priv()})),
        view_arg(view_c({join_priv(), fetch_priv(), select_priv(), where_priv()})),
    };
    fc.result = string_result();
    return define_contracted("my-reservations", fc, [](const std::vector<Value>& args) {
        const auto& v_reservations = std::get<ViewPtr>(args[0]);
        const auto& v_books = std::get<ViewPtr>(args[1]);
        const auto& v_authors = std::get<ViewPtr>(args[2]);

        // No user filter here: the +fetch restriction on the reservations
        // capability rewrites the query to the caller's own rows. The
        // cardholder column stays in the projection so that rewrite can
        // still resolve it.
        ViewPtr details = select(
            join(join(v_reservations, v_books, "book = book_id"), v_authors,
                 "author = author_id"),
            "r_id, title, firstname, lastname, cardholder_id");
        RowSet rows = fetch(details);
        std::sort(rows.rows.begin(), rows.rows.end(), [](const Row& a, const Row& b) {
            return std::get<std::int64_t>(a[0]) < std::get<std::int64_t>(b[0]);
        });
        json out = json::array();
        for (const auto& row : rows.rows) {
            out.push_back({{"r_id", std::get<std::int64_t>(row[0])},
                           {"title", std::get<std::string>(row[1])},
                           {"author", std::get<std::string>(row[2]) + " " +
                                          std::get<std::string>(row[3])}});
        }
        return Value{out.dump()};
    });
}

Contracted make_remove_reservation() {
    FunctionContract fc;
    fc.args = {
        string_arg(),
        view_arg(view_c({where_priv(),
                         delete_priv().restrict(restrict_to_current_cardholder())})),
    };
    fc.result = any_result();
    return define_contracted("remove-reservation", fc, [](const std::vector<Value>& args) {
        const auto& rid = std::get<std::string>(args[0]);
        const auto& v_reservations = std::get<ViewPtr>(args[1]);
        std::int64_t deleted =
            erase(where(v_reservations, sqlformat("r_id = $1", {SqlValue{rid}})));
        return Value{json{{"deleted", deleted}}.dump()};
    });
}

Contracted make_search_author() {
    FunctionContract fc;
    fc.args = {
        string_arg(),
        string_arg(),
        view_arg(view_c({fetch_priv(), join_priv(), select_priv(), where_priv()})),
        view_arg(view_c({fetch_priv(), join_priv(), select_priv(), where_priv()})),
    };
    fc.result = string_result();
    return define_contracted("search-author", fc, [](const std::vector<Value>& args) {
        const auto& fname = std::get<std::string>(args[0]);
        const auto& lname = std::get<std::string>(args[1]);
        const auto& v_authors = std::get<ViewPtr>(args[2]);
        const auto& v_books = std::get<ViewPtr>(args[3]);

        ViewPtr matched = where(v_authors, sqlformat("firstname = $1 AND lastname = $2",
                                                     {SqlValue{fname}, SqlValue{lname}}));
        RowSet rows = fetch(select(join(matched, v_books, "author_id = author"), "title"));
        std::vector<std::string> titles;
        for (const auto& row : rows.rows) {
            titles.push_back(std::get<std::string>(row[0]));
        }
        std::sort(titles.begin(), titles.end());
        return Value{json(titles).dump()};
    });
}

Contracted make_num_reservations() {
    FunctionContract fc;
    fc.args = {
        string_arg(),
        view_arg(view_c({aggregate_priv().with(view_c({fetch_priv()})), where_priv()})),
    };
    fc.result = string_result();
    return define_contracted("num-reservations", fc, [](const std::vector<Value>& args) {
        const auto& book = std::get<std::string>(args[0]);
        const auto& v_reservations = std::get<ViewPtr>(args[1]);
        ViewPtr counted =
            aggregate(where(v_reservations, sqlformat("book = $1", {SqlValue{book}})),
                      "COUNT(*)");
        RowSet rows = fetch(counted);
        return Value{std::to_string(std::get<std::int64_t>(rows.rows[0][0]))};
    });
}

} // namespace

const Endpoints& endpoints() {
    static const Endpoints instance{
        make_reserve(),
        make_my_reservations(),
        make_remove_reservation(),
        make_search_author(),
        make_num_reservations(),
    };
    return instance;
}

std::optional<std::int64_t> lookup_card_id(Connection& conn, const std::string& full_name) {
    auto space = full_name.find(' ');
    if (space == std::string::npos) {
        return std::nullopt;
    }
    std::string first = full_name.substr(0, space);
    std::string last = full_name.substr(space + 1);
    RowSet rows =
        conn.query("SELECT card_id FROM cardholders WHERE firstname = ? AND lastname = ?",
                   std::vector<SqlValue>{SqlValue{first}, SqlValue{last}});
    if (rows.empty()) {
        return std::nullopt;
    }
    return std::get<std::int64_t>(rows.rows[0][0]);
}

} // namespace capql::library
