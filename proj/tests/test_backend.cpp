#include <doctest.h>

#include <filesystem>
#include <random>
#include <thread>

#include <capql/backend.hpp>
#include <capql/error.hpp>
#include <capql/parser.hpp>

#include "support/fixtures.hpp"

using namespace capql;

namespace {

std::optional<CheckClause> check_of(const std::string& clause) {
    return CheckClause{parse_predicate(clause), clause};
}

} // namespace

TEST_CASE("open and create") {
    CHECK_NOTHROW(Connection::open(":memory:"));
    CHECK_THROWS_AS(Connection::open("/nonexistent/x.db"), IoError);

    auto dir = std::filesystem::temp_directory_path() / "capql_backend_test";
    std::filesystem::create_directories(dir);

    SUBCASE("existing file round trip") {
        auto path = (dir / "fixture.db").string();
        std::filesystem::remove(path);
        {
            auto conn = Connection::create(path);
            testsupport::create_student_directory(*conn);
        }
        auto conn = Connection::open(path);
        CHECK(conn->table_exists("students"));
        CHECK(conn->table_exists("advising"));
        CHECK(!conn->table_exists("missing"));
    }

    SUBCASE("non-database file") {
        auto path = (dir / "not_a_db.txt").string();
        {
            std::FILE* f = std::fopen(path.c_str(), "w");
            std::fputs("this is just text, long enough to not look like a db header", f);
            std::fclose(f);
        }
        CHECK_THROWS_AS(Connection::open(path), NotADatabase);
    }
}

TEST_CASE("query returns typed rows") {
    auto conn = testsupport::student_directory_db();
    RowSet rows = conn->query("SELECT name, gpa FROM students WHERE gpa <= ?",
                              std::vector<SqlValue>{SqlValue{2.5}});
    REQUIRE(rows.size() == 1);
    CHECK(rows.rows[0][0] == SqlValue{std::string("Mike Birbiglia")});
    CHECK(rows.rows[0][1] == SqlValue{2.5});

    CHECK(conn->query("SELECT * FROM students WHERE 1 = 0").empty());
    CHECK_THROWS_AS(conn->query("SELECT * FROM no_such_table"), EngineError);
}

TEST_CASE("guarded_insert enforces the check over NEW rows") {
    auto conn = testsupport::student_directory_db();

    SUBCASE("violating row aborts with the clause in the message") {
        try {
            conn->guarded_insert("students", {"id", "name", "email", "gpa"},
                                 {{SqlValue{std::int64_t{9}}, SqlValue{std::string("X")},
                                   SqlValue{std::string("x@c")}, SqlValue{4.0}}},
                                 check_of("gpa <= 2.5"));
            FAIL("expected ViewConstraintViolation");
        } catch (const ViewConstraintViolation& e) {
            CHECK(std::string(e.what()) == "insert: violated view constraint: gpa <= 2.5");
        }
        CHECK(conn->query("SELECT count(*) FROM students").rows[0][0] ==
              SqlValue{std::int64_t{3}});
    }

    SUBCASE("satisfying row is inserted") {
        auto outcome = conn->guarded_insert("students", {"id", "name", "email", "gpa"},
                                            {{SqlValue{std::int64_t{9}}, SqlValue{std::string("X")},
                                              SqlValue{std::string("x@c")}, SqlValue{2.0}}},
                                            check_of("gpa <= 2.5"));
        CHECK(outcome.affected_rows == 1);
    }

    SUBCASE("no check means plain insert") {
        auto outcome = conn->guarded_insert("students", {"id", "gpa"},
                                            {{SqlValue{std::int64_t{9}}, SqlValue{4.0}}},
                                            std::nullopt);
        CHECK(outcome.affected_rows == 1);
    }

    SUBCASE("one bad row rolls back the whole multi-row insert") {
        CHECK_THROWS_AS(
            conn->guarded_insert("students", {"id", "gpa"},
                                 {{SqlValue{std::int64_t{10}}, SqlValue{1.0}},
                                  {SqlValue{std::int64_t{11}}, SqlValue{4.0}},
                                  {SqlValue{std::int64_t{12}}, SqlValue{1.5}}},
                                 check_of("gpa <= 2.5")),
            ViewConstraintViolation);
        CHECK(conn->query("SELECT count(*) FROM students").rows[0][0] ==
              SqlValue{std::int64_t{3}});
    }
}

TEST_CASE("guarded_update reproduces the check-option behavior") {
    auto conn = testsupport::student_directory_db();

    SUBCASE("update that escapes the window is aborted atomically") {
        try {
            conn->guarded_update("students", parse_assignments("gpa = 3.7"),
                                 parse_predicate("gpa <= 2.5"), check_of("gpa <= 2.5"));
            FAIL("expected ViewConstraintViolation");
        } catch (const ViewConstraintViolation& e) {
            CHECK(std::string(e.what()) == "update: violated view constraint: gpa <= 2.5");
        }
        RowSet rows = conn->query("SELECT gpa FROM students ORDER BY id");
        CHECK(rows.rows[0][0] == SqlValue{2.5});
        CHECK(rows.rows[1][0] == SqlValue{3.9});
        CHECK(rows.rows[2][0] == SqlValue{3.4});
    }

    SUBCASE("per-op where without check succeeds") {
        auto outcome = conn->guarded_update("students", parse_assignments("gpa = 3.7"),
                                            parse_predicate("gpa <= 2.5"), std::nullopt);
        CHECK(outcome.affected_rows == 1);
        CHECK(conn->query("SELECT gpa FROM students WHERE id = 1").rows[0][0] ==
              SqlValue{3.7});
    }

    SUBCASE("unscoped identity update still checks every touched row") {
        // Rows outside the window (3.9, 3.4) fail the check even unchanged,
        // and a single violating row aborts the whole statement.
        CHECK_THROWS_AS(conn->guarded_update("students", parse_assignments("gpa = gpa"),
                                             nullptr, check_of("gpa <= 2.5")),
                        ViewConstraintViolation);
    }

    SUBCASE("identity update within the window") {
        auto outcome = conn->guarded_update("students", parse_assignments("gpa = gpa"),
                                            parse_predicate("gpa <= 2.5"),
                                            check_of("gpa <= 2.5"));
        CHECK(outcome.affected_rows == 1);
    }
}

TEST_CASE("delete installs no trigger") {
    auto conn = testsupport::student_directory_db();
    std::int64_t before = conn->statement_count();
    auto outcome = conn->delete_rows("students", parse_predicate("id = 1"));
    CHECK(outcome.affected_rows == 1);
    CHECK(conn->statement_count() == before + 1);

    CHECK(conn->delete_rows("students", parse_predicate("1 = 0")).affected_rows == 0);
    conn->delete_rows("students", nullptr);
    CHECK(conn->query("SELECT count(*) FROM students").rows[0][0] == SqlValue{std::int64_t{0}});
    CHECK(conn->delete_rows("students", nullptr).affected_rows == 0);
}

TEST_CASE("no value payload ever reaches statement text") {
    auto conn = testsupport::student_directory_db();
    // A check clause whose literal is a hostile payload: were it spliced
    // into the trigger DDL, this would break out of the WHEN expression.
    std::string payload = "x' OR '1'='1";
    ExprPtr check = sqlformat("name <> $1", {SqlValue{payload}});
    auto outcome =
        conn->guarded_insert("students", {"id", "name", "gpa"},
                             {{SqlValue{std::int64_t{7}}, SqlValue{std::string("New Kid")},
                               SqlValue{1.0}}},
                             CheckClause{check, render(check)});
    CHECK(outcome.affected_rows == 1);
    // And a row equal to the payload is rejected by the check.
    CHECK_THROWS_AS(conn->guarded_insert("students", {"id", "name", "gpa"},
                                         {{SqlValue{std::int64_t{8}}, SqlValue{payload},
                                           SqlValue{1.0}}},
                                         CheckClause{check, render(check)}),
                    ViewConstraintViolation);
    CHECK(conn->temp_trigger_count() == 0);
}

TEST_CASE("trigger hygiene after randomized guarded operations") {
    auto conn = testsupport::student_directory_db();
    std::mt19937_64 rng(1234);
    int failures = 0;
    for (int i = 0; i < 300; ++i) {
        double gpa = static_cast<double>(rng() % 50) / 10.0; // 0.0 .. 4.9
        try {
            if (rng() % 2 == 0) {
                conn->guarded_insert("students", {"gpa"}, {{SqlValue{gpa}}},
                                     check_of("gpa <= 2.5"));
            } else {
                conn->guarded_update("students", parse_assignments("gpa = gpa"),
                                     parse_predicate("id = 1"), check_of("gpa <= 4.9"));
            }
        } catch (const ViewConstraintViolation&) {
            ++failures;
        }
        CHECK(conn->temp_trigger_count() == 0);
    }
    CHECK(failures > 0); // the mix must include failing operations
}

TEST_CASE("temp triggers are invisible to a second connection") {
    auto dir = std::filesystem::temp_directory_path() / "capql_backend_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "isolation.db").string();
    std::filesystem::remove(path);
    {
        auto setup = Connection::create(path);
        testsupport::create_student_directory(*setup);
    }
    auto a = Connection::open(path);
    auto b = Connection::open(path);

    bool b_ran = false;
    // While a's check trigger is installed, b inserts a row that would
    // violate a's constraint; b must not be constrained.
    a->set_guard_hook([&] {
        auto outcome = b->guarded_insert("students", {"id", "gpa"},
                                         {{SqlValue{std::int64_t{50}}, SqlValue{4.0}}},
                                         std::nullopt);
        CHECK(outcome.affected_rows == 1);
        b_ran = true;
    });
    auto outcome = a->guarded_insert("students", {"id", "gpa"},
                                     {{SqlValue{std::int64_t{51}}, SqlValue{1.0}}},
                                     check_of("gpa <= 2.5"));
    CHECK(outcome.affected_rows == 1);
    CHECK(b_ran);
    CHECK(a->query("SELECT count(*) FROM students").rows[0][0] == SqlValue{std::int64_t{5}});
}

TEST_CASE("check enforcement can be disabled") {
    auto conn = testsupport::student_directory_db();
    conn->set_check_enforcement(false);
    auto outcome = conn->guarded_insert("students", {"id", "gpa"},
                                        {{SqlValue{std::int64_t{9}}, SqlValue{4.0}}},
                                        check_of("gpa <= 2.5"));
    CHECK(outcome.affected_rows == 1); // no trigger, no rejection
}
