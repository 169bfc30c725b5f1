#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <capql/authority.hpp>
#include <capql/capql.hpp>

#include "support/evaluator.hpp"
#include "support/fixtures.hpp"

using namespace capql;

TEST_CASE("make_view mints base capabilities") {
    auto conn = testsupport::student_directory_db();
    auto auth = RootAuthority::adopt("directory", conn);

    ViewPtr students = make_view(auth, "directory", "students");
    CHECK(students->schema().column_names() ==
          std::vector<std::string>{"id", "name", "email", "gpa"});
    CHECK(fetch(students).size() == 3);

    CHECK_THROWS_AS(make_view(auth, "directory", "no_such_table"), UnknownTable);
    CHECK_THROWS_AS(make_view(auth, "other", "students"), IoError);
}

TEST_CASE("two mints of the same table are distinct but equal in denotation") {
    auto conn = testsupport::student_directory_db();
    auto auth = RootAuthority::adopt("directory", conn);
    ViewPtr a = make_view(auth, "directory", "students");
    ViewPtr b = make_view(auth, "directory", "students");
    CHECK(a != b);
    CHECK(testsupport::same_rows_unordered(fetch(a).rows, fetch(b).rows));
}

TEST_CASE("authority from a config file") {
    auto dir = std::filesystem::temp_directory_path() / "capql_auth_test";
    std::filesystem::create_directories(dir);
    auto db_path = (dir / "directory.db").string();
    std::filesystem::remove(db_path);
    {
        auto conn = Connection::create(db_path);
        testsupport::create_student_directory(*conn);
    }
    auto config_path = (dir / "databases.conf").string();
    {
        std::ofstream out(config_path);
        out << "# databases available to the service\n";
        out << "directory = " << db_path << "\n";
    }
    auto auth = RootAuthority::from_config(config_path);
    CHECK(fetch(make_view(auth, "directory", "students")).size() == 3);
}

TEST_CASE("with_user scopes nest and restore") {
    CHECK_THROWS_AS(current_user(), NoUserContext);
    std::string seen = with_user("A", [] {
        std::string inner = with_user("B", [] { return current_user(); });
        CHECK(inner == "B");
        return current_user();
    });
    CHECK(seen == "A");
    CHECK_THROWS_AS(current_user(), NoUserContext);
}

TEST_CASE("user context is observed at operation time, not capture time") {
    auto conn = testsupport::student_directory_db();
    auto auth = RootAuthority::adopt("directory", conn);
    ViewPtr students = make_view(auth, "directory", "students");
    ViewPtr advising = make_view(auth, "directory", "advising");

    // The pipeline closes over current_user() lazily via sqlformat at
    // operation time: run the same code under two users.
    auto advisee_names = [&]() {
        return fetch(select(where(join(students, advising, "id = student"),
                                  sqlformat("advisor = $1", {SqlValue{current_user()}})),
                            "name"));
    };
    RowSet a = with_user("Jerome Seinfeld", advisee_names);
    RowSet b = with_user("Joan Rivers", advisee_names);
    CHECK(a.size() == 2);
    CHECK(b.size() == 1);
}
