#include <doctest.h>

#include <capql/error.hpp>
#include <capql/parser.hpp>
#include <capql/query.hpp>

#include "support/evaluator.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace capql;

namespace {

ViewSchema figure_students() {
    ViewSchema s;
    s.columns = {
        {"id", "INTEGER", true, true, ColumnOrigin{"students", "id"}},
        {"name", "TEXT", true, true, ColumnOrigin{"students", "name"}},
        {"email", "TEXT", true, true, ColumnOrigin{"students", "email"}},
        {"gpa", "REAL", true, true, ColumnOrigin{"students", "gpa"}},
    };
    return s;
}

ViewSchema figure_advising() {
    ViewSchema s;
    s.columns = {
        {"student", "INTEGER", true, true, ColumnOrigin{"advising", "student"}},
        {"advisor", "TEXT", true, true, ColumnOrigin{"advising", "advisor"}},
    };
    return s;
}

QueryPtr students_base() { return Query::base("students", figure_students()); }
QueryPtr advising_base() { return Query::base("advising", figure_advising()); }

QueryPtr where_text(QueryPtr child, const std::string& clause) {
    return Query::where(std::move(child), parse_predicate(clause), clause);
}

} // namespace

TEST_CASE("derive_schema per node kind") {
    QueryPtr students = students_base();
    CHECK(derive_schema(students).column_names() ==
          std::vector<std::string>{"id", "name", "email", "gpa"});

    QueryPtr projected = Query::project(students, parse_select_list("name, email"));
    CHECK(derive_schema(projected).column_names() == std::vector<std::string>{"name", "email"});

    QueryPtr joined = Query::join(students, advising_base(), parse_predicate("id = student"));
    CHECK(derive_schema(joined).column_names() ==
          std::vector<std::string>{"id", "name", "email", "gpa", "student", "advisor"});
}

TEST_CASE("derive_schema marks aggregation outputs non-simple") {
    QueryPtr agg = Query::aggregate(students_base(), parse_agg_list("COUNT(*)"), {}, nullptr);
    const ViewSchema& schema = derive_schema(agg);
    REQUIRE(schema.columns.size() == 1);
    CHECK(schema.columns[0].name == "COUNT(*)");
    CHECK(!schema.columns[0].is_simple);
}

TEST_CASE("derive_updatability conservative rules") {
    QueryPtr students = students_base();
    Updatability base = derive_updatability(students);
    CHECK(base.insertable);
    CHECK(base.deletable);
    CHECK(base.updatable_columns == NameSet{"id", "name", "email", "gpa"});

    Updatability join =
        derive_updatability(Query::join(students, advising_base(), parse_predicate("id = student")));
    CHECK(!join.insertable);
    CHECK(!join.deletable);
    CHECK(join.updatable_columns.empty());

    Updatability agg = derive_updatability(
        Query::aggregate(students, parse_agg_list("COUNT(*)"), {}, nullptr));
    CHECK(!agg.insertable);
    CHECK(!agg.deletable);
    CHECK(agg.updatable_columns.empty());

    // A computed output column is never updatable.
    Updatability computed =
        derive_updatability(Query::project(students, parse_select_list("name, gpa + id")));
    CHECK(computed.updatable_columns == NameSet{"name"});
    CHECK(!computed.updatable_columns.count("(gpa+id)"));
}

TEST_CASE("projection insertability requires omitted columns nullable") {
    ViewSchema strict;
    strict.columns = {
        {"id", "INTEGER", false, true, ColumnOrigin{"t", "id"}},
        {"note", "TEXT", true, true, ColumnOrigin{"t", "note"}},
    };
    QueryPtr base = Query::base("t", strict);
    CHECK(derive_updatability(Query::project(base, parse_select_list("id"))).insertable);
    CHECK(!derive_updatability(Query::project(base, parse_select_list("note"))).insertable);
}

TEST_CASE("check_clause collects definition predicates") {
    QueryPtr students = students_base();
    CHECK(!check_clause(students).has_value());

    auto single = check_clause(where_text(students, "gpa <= 2.5"));
    REQUIRE(single.has_value());
    CHECK(single->text == "gpa <= 2.5");

    auto doubled = check_clause(where_text(where_text(students, "gpa <= 2.5"), "id > 0"));
    REQUIRE(doubled.has_value());
    CHECK(doubled->text == "gpa <= 2.5 AND id > 0");
    CHECK(structurally_equal(doubled->expr,
                             make_binary(BinaryOp::And, parse_predicate("gpa <= 2.5"),
                                         parse_predicate("id > 0"))));

    // Projections pass the constraint through untouched.
    auto through = check_clause(
        Query::project(where_text(students, "gpa <= 2.5"), parse_select_list("name, gpa")));
    REQUIRE(through.has_value());
    CHECK(through->text == "gpa <= 2.5");
}

TEST_CASE("embedded expressions are validated at construction") {
    QueryPtr students = students_base();
    CHECK_THROWS_AS(where_text(students, "salary > 0"), UnknownColumn);
    CHECK_THROWS_AS(Query::project(students, parse_select_list("salary")), UnknownColumn);
    QueryPtr self_join = Query::join(students, students_base(), nullptr);
    CHECK_THROWS_AS(where_text(self_join, "id = 1"), AmbiguousColumn);
}

TEST_CASE("concretize produces parameterized single SELECTs") {
    auto conn = testsupport::student_directory_db();

    SUBCASE("base table") {
        ConcreteQuery cq = concretize(students_base());
        CHECK(cq.sql == "SELECT \"id\", \"name\", \"email\", \"gpa\" FROM \"students\"");
        CHECK(cq.params.empty());
        CHECK(conn->query(cq.sql, cq.params).size() == 3);
    }

    SUBCASE("the advisee query") {
        QueryPtr ast = Query::project(
            where_text(Query::join(students_base(), advising_base(),
                                   parse_predicate("id = student")),
                       "advisor = 'Jerome Seinfeld'"),
            parse_select_list("name, email, gpa"));
        ConcreteQuery cq = concretize(ast);
        // Every literal must travel as a parameter, never as text.
        CHECK(cq.sql.find("Seinfeld") == std::string::npos);
        REQUIRE(cq.params.size() == 1);
        RowSet rows = conn->query(cq.sql, cq.params);
        CHECK(rows.size() == 2);
    }

    SUBCASE("aggregate count") {
        QueryPtr ast =
            Query::aggregate(students_base(), parse_agg_list("COUNT(*)"), {}, nullptr);
        RowSet rows = conn->query(concretize(ast).sql, {});
        REQUIRE(rows.size() == 1);
        CHECK(rows.rows[0][0] == SqlValue{std::int64_t{3}});
    }

    SUBCASE("deterministic output") {
        QueryPtr ast = where_text(students_base(), "gpa <= 2.5");
        CHECK(concretize(ast).sql == concretize(ast).sql);
    }
}

TEST_CASE("property: engine and evaluator agree on random trees") {
    std::mt19937_64 rng(20250811);
    auto typed = testsupport::random_database(rng, 12);
    auto plain = testsupport::plain_database(typed);
    auto conn = Connection::open(":memory:");
    testsupport::install_database(*conn, typed);

    int executed = 0;
    for (int i = 0; i < 150; ++i) {
        QueryPtr ast = testsupport::random_ast(rng, typed, 4);
        ConcreteQuery cq = concretize(ast);
        CAPTURE(cq.sql);
        RowSet engine = conn->query(cq.sql, cq.params);
        RowSet oracle = testsupport::eval_query(ast, plain);
        CHECK(engine.rows.size() == oracle.rows.size());
        CHECK(testsupport::same_rows_unordered(engine.rows, oracle.rows));
        ++executed;
    }
    CHECK(executed == 150);
}

TEST_CASE("property: selection narrows and projection is columnwise") {
    std::mt19937_64 rng(4242);
    auto typed = testsupport::random_database(rng, 15);
    auto plain = testsupport::plain_database(typed);

    for (int i = 0; i < 60; ++i) {
        QueryPtr child = testsupport::random_ast(rng, typed, 2);
        ExprPtr pred = testsupport::random_predicate_over(rng, child->schema());
        QueryPtr filtered = Query::where(child, pred, render(pred));

        RowSet all = testsupport::eval_query(child, plain);
        RowSet narrowed = testsupport::eval_query(filtered, plain);
        CHECK(narrowed.rows.size() <= all.rows.size());
        // every narrowed row appears in the parent rows
        for (const auto& row : narrowed.rows) {
            bool found = false;
            for (const auto& candidate : all.rows) {
                if (testsupport::same_rows_unordered({row}, {candidate})) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
}
