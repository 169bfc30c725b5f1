#include <doctest.h>

#include <random>

#include <capql/error.hpp>
#include <capql/parser.hpp>
#include <capql/schema.hpp>

using namespace capql;

namespace {

ViewSchema students_schema() {
    ViewSchema s;
    s.columns = {
        {"id", "INTEGER", true, true, ColumnOrigin{"students", "id"}},
        {"name", "TEXT", true, true, ColumnOrigin{"students", "name"}},
        {"email", "TEXT", true, true, ColumnOrigin{"students", "email"}},
        {"gpa", "REAL", true, true, ColumnOrigin{"students", "gpa"}},
    };
    return s;
}

const Binary& as_binary(const ExprPtr& e) {
    REQUIRE(std::holds_alternative<Binary>(e->node));
    return std::get<Binary>(e->node);
}

} // namespace

TEST_CASE("parse_predicate builds comparison trees") {
    ExprPtr e = parse_predicate("gpa <= 2.5");
    const Binary& b = as_binary(e);
    CHECK(b.op == BinaryOp::Le);
    CHECK(std::get<ColumnRef>(b.lhs->node).name == "gpa");
    CHECK(std::get<Literal>(b.rhs->node).value == SqlValue{2.5});
}

TEST_CASE("parse_predicate handles text literals") {
    ExprPtr e = parse_predicate("advisor = 'Jerome Seinfeld'");
    const Binary& b = as_binary(e);
    CHECK(b.op == BinaryOp::Eq);
    CHECK(std::get<Literal>(b.rhs->node).value == SqlValue{std::string("Jerome Seinfeld")});
}

TEST_CASE("parse_predicate accepts literal-only tautologies") {
    ExprPtr e = parse_predicate("1 = 1");
    const Binary& b = as_binary(e);
    CHECK(std::get<Literal>(b.lhs->node).value == SqlValue{std::int64_t{1}});
    CHECK(std::get<Literal>(b.rhs->node).value == SqlValue{std::int64_t{1}});
}

TEST_CASE("predicate grammar follows standard precedence") {
    // a + b * 2 < 10 parses as (a + (b * 2)) < 10
    ExprPtr e = parse_predicate("a + b * 2 < 10");
    const Binary& cmp = as_binary(e);
    CHECK(cmp.op == BinaryOp::Lt);
    const Binary& add = as_binary(cmp.lhs);
    CHECK(add.op == BinaryOp::Add);
    CHECK(as_binary(add.rhs).op == BinaryOp::Mul);

    // NOT binds tighter than AND, AND tighter than OR
    ExprPtr logic = parse_predicate("NOT a = 1 AND b = 2 OR c = 3");
    const Binary& top = as_binary(logic);
    CHECK(top.op == BinaryOp::Or);
    CHECK(as_binary(top.lhs).op == BinaryOp::And);
}

TEST_CASE("parse_predicate error carries offset and expectations") {
    CHECK_THROWS_AS(parse_predicate("gpa <="), ParseError);
    CHECK_THROWS_AS(parse_predicate("lower(name) = 'x'"), ParseError);
    CHECK_THROWS_AS(parse_predicate("name = 'unterminated"), ParseError);
    CHECK_THROWS_AS(parse_predicate("COUNT(*) > 1"), ParseError); // no aggregates here
    try {
        parse_predicate("gpa <= ");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 7); // end of "gpa <= "
        CHECK(!e.expected().empty());
    }
}

TEST_CASE("IS NULL / IS NOT NULL parse as postfix operators") {
    ExprPtr e = parse_predicate("email IS NULL OR email IS NOT NULL");
    const Binary& b = as_binary(e);
    CHECK(std::get<Unary>(b.lhs->node).op == UnaryOp::IsNull);
    CHECK(std::get<Unary>(b.rhs->node).op == UnaryOp::IsNotNull);
}

TEST_CASE("parse_select_list marks simple items") {
    auto items = parse_select_list("name, email, gpa");
    REQUIRE(items.size() == 3);
    for (const auto& item : items) {
        CHECK(item.is_simple);
    }
    CHECK(items[0].output_name == "name");
    CHECK(items[2].output_name == "gpa");
}

TEST_CASE("parse_select_list canonicalizes expression outputs") {
    auto items = parse_select_list("gpa + id");
    REQUIRE(items.size() == 1);
    CHECK(!items[0].is_simple);
    CHECK(items[0].output_name == "(gpa+id)");
}

TEST_CASE("select list aliases are rejected") {
    CHECK_THROWS_AS(parse_select_list("name AS n"), AliasNotSupported);
    CHECK_THROWS_AS(parse_select_list("name n"), AliasNotSupported);
    CHECK_THROWS_AS(parse_select_list("*"), ParseError);
}

TEST_CASE("parse_assignments") {
    auto assignments = parse_assignments("gpa = 3.7");
    REQUIRE(assignments.size() == 1);
    CHECK(assignments[0].column == "gpa");
    CHECK(std::get<Literal>(assignments[0].value->node).value == SqlValue{3.7});

    CHECK_NOTHROW(parse_assignments("gpa = gpa")); // identity update is legal
    CHECK_THROWS_AS(parse_assignments("gpa = 1, gpa = 2"), DuplicateAssignment);
    CHECK_THROWS_AS(parse_assignments("gpa = 1, GPA = 2"), DuplicateAssignment);
}

TEST_CASE("parse_agg_list accepts the closed function set") {
    auto items = parse_agg_list("COUNT(*)");
    REQUIRE(items.size() == 1);
    CHECK(items[0].is_aggregate());
    CHECK(items[0].output_name() == "COUNT(*)");

    auto mixed = parse_agg_list("name, MIN(gpa), MAX(gpa)");
    CHECK(mixed.size() == 3);
    CHECK(!mixed[0].is_aggregate());

    CHECK_THROWS_AS(parse_agg_list("MEDIAN(gpa)"), ParseError);
    CHECK_THROWS_AS(parse_agg_list("SUM(*)"), ParseError); // star is COUNT-only
}

TEST_CASE("mentions returns exactly the referenced columns") {
    CHECK(mentions(parse_predicate("gpa < 3.0")) == NameSet{"gpa"});
    CHECK(mentions(parse_predicate("1 = 1")).empty());
    CHECK(mentions(parse_predicate("advisor = 'x' AND student = id")) ==
          NameSet{"advisor", "student", "id"});
}

TEST_CASE("validate resolves columns against the schema") {
    ViewSchema schema = students_schema();
    auto ok = validate(parse_predicate("gpa <= 2.5"), schema);
    CHECK(ok.bindings.at("gpa") == 3);

    CHECK_THROWS_AS(validate(parse_predicate("salary > 0"), schema), UnknownColumn);

    ViewSchema joined = schema;
    joined.columns.push_back({"id", "INTEGER", true, true, ColumnOrigin{"advising", "id"}});
    CHECK_THROWS_AS(validate(parse_predicate("id = 1"), joined), AmbiguousColumn);
    CHECK_NOTHROW(validate(parse_predicate("name = 'x'"), joined));
}

TEST_CASE("column matching is case-insensitive") {
    ViewSchema schema = students_schema();
    CHECK_NOTHROW(validate(parse_predicate("GPA <= 2.5"), schema));
    CHECK(mentions(parse_predicate("GPA < 1 AND gpa > 0")).size() == 1);
}

TEST_CASE("sqlformat splices arguments as literals") {
    ExprPtr e = sqlformat("advisor = $1", {SqlValue{std::string("Jerome Seinfeld")}});
    const Binary& b = as_binary(e);
    CHECK(std::get<ColumnRef>(b.lhs->node).name == "advisor");
    CHECK(std::get<Literal>(b.rhs->node).value == SqlValue{std::string("Jerome Seinfeld")});

    ExprPtr both = sqlformat("$1 = $2", {SqlValue{std::int64_t{1}}, SqlValue{std::int64_t{1}}});
    CHECK(structurally_equal(both, parse_predicate("1 = 1")));
}

TEST_CASE("sqlformat cannot change expression shape") {
    ExprPtr benign = sqlformat("advisor = $1", {SqlValue{std::string("x")}});
    ExprPtr hostile = sqlformat("advisor = $1", {SqlValue{std::string("x' OR '1'='1")}});
    CHECK(same_shape(benign, hostile));
    // The whole payload lands in one text literal.
    const Binary& b = as_binary(hostile);
    CHECK(std::get<Literal>(b.rhs->node).value == SqlValue{std::string("x' OR '1'='1")});
    CHECK(mentions(benign) == mentions(hostile));
}

TEST_CASE("sqlformat arity checks") {
    CHECK_THROWS_AS(sqlformat("a = $1", {}), ArityMismatch);
    CHECK_THROWS_AS(sqlformat("a = $1", {SqlValue{std::int64_t{1}}, SqlValue{std::int64_t{2}}}),
                    ArityMismatch);
    // $2 without $1 is not contiguous
    CHECK_THROWS_AS(sqlformat("a = $2", {SqlValue{std::int64_t{1}}, SqlValue{std::int64_t{2}}}),
                    ArityMismatch);
    // placeholders may repeat
    ExprPtr e = sqlformat("a = $1 OR b = $1", {SqlValue{std::int64_t{7}}});
    CHECK(mentions(e) == NameSet{"a", "b"});
}

TEST_CASE("placeholders are rejected outside templates") {
    CHECK_THROWS_AS(parse_predicate("a = $1"), ParseError);
}

TEST_CASE("render is deterministic and round-trips") {
    CHECK(render(parse_predicate("gpa <= 2.5")) == "(gpa <= 2.5)");
    CHECK(render(make_literal(SqlValue{std::string("O'Brien")})) == "'O''Brien'");

    ExprPtr e = parse_predicate("a + b * 2 < 10");
    CHECK(structurally_equal(parse_predicate(render(e)), e));
}

namespace {

/// Random predicate generator for the round-trip property.
ExprPtr random_numeric(std::mt19937_64& rng, int depth);

ExprPtr random_leaf(std::mt19937_64& rng) {
    switch (rng() % 4) {
    case 0: return make_column("a");
    case 1: return make_column("b");
    // Literal payloads stay non-negative: the parser produces negation as a
    // unary node, never as a negative literal.
    case 2: return make_literal(SqlValue{static_cast<std::int64_t>(rng() % 200)});
    default: return make_literal(SqlValue{static_cast<double>(rng() % 100) / 4.0});
    }
}

ExprPtr random_numeric(std::mt19937_64& rng, int depth) {
    if (depth <= 0) return random_leaf(rng);
    switch (rng() % 6) {
    case 0: return random_leaf(rng);
    case 1: return make_unary(UnaryOp::Neg, random_numeric(rng, depth - 1));
    default: {
        BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div};
        return make_binary(ops[rng() % 4], random_numeric(rng, depth - 1),
                           random_numeric(rng, depth - 1));
    }
    }
}

ExprPtr random_predicate(std::mt19937_64& rng, int depth) {
    if (depth <= 0 || rng() % 3 == 0) {
        BinaryOp cmps[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                           BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};
        return make_binary(cmps[rng() % 6], random_numeric(rng, depth),
                           random_numeric(rng, depth));
    }
    switch (rng() % 4) {
    case 0: return make_unary(UnaryOp::Not, random_predicate(rng, depth - 1));
    case 1: return make_unary(UnaryOp::IsNull, random_numeric(rng, depth - 1));
    default:
        return make_binary(rng() % 2 ? BinaryOp::And : BinaryOp::Or,
                           random_predicate(rng, depth - 1), random_predicate(rng, depth - 1));
    }
}

} // namespace

TEST_CASE("property: parse/render round trip is structurally stable") {
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 500; ++i) {
        ExprPtr e = random_predicate(rng, 4);
        std::string text = render(e);
        ExprPtr reparsed = parse_predicate(text);
        CAPTURE(text);
        CHECK(structurally_equal(e, reparsed));
        CHECK(render(reparsed) == text);
    }
}

TEST_CASE("property: sqlformat shape and mentions are argument-independent") {
    std::mt19937_64 rng(7);
    const char* templates[] = {
        "advisor = $1",
        "a = $1 AND b < $2",
        "$1 = $2 OR name = $3",
    };
    const std::size_t arities[] = {1, 2, 3};
    auto random_value = [&](int pick) -> SqlValue {
        switch (pick % 4) {
        case 0: return SqlValue{static_cast<std::int64_t>(rng() % 1000)};
        case 1: return SqlValue{std::string("x' OR '1'='1")};
        case 2: return SqlValue{std::string("'; DROP TABLE students; --")};
        default: return sql_null();
        }
    };
    for (int t = 0; t < 3; ++t) {
        std::vector<SqlValue> base;
        for (std::size_t k = 0; k < arities[t]; ++k) base.push_back(random_value(0));
        ExprPtr reference = sqlformat(templates[t], base);
        for (int i = 0; i < 50; ++i) {
            std::vector<SqlValue> args;
            for (std::size_t k = 0; k < arities[t]; ++k) {
                args.push_back(random_value(static_cast<int>(rng() % 4)));
            }
            ExprPtr formatted = sqlformat(templates[t], args);
            CHECK(same_shape(reference, formatted));
            CHECK(mentions(reference) == mentions(formatted));
        }
    }
}

TEST_CASE("property: validate is total over generated expressions") {
    std::mt19937_64 rng(99);
    ViewSchema schema = students_schema();
    int outcomes[3] = {0, 0, 0};
    for (int i = 0; i < 300; ++i) {
        ExprPtr e = random_predicate(rng, 3);
        try {
            validate(e, schema);
            ++outcomes[0];
        } catch (const UnknownColumn&) {
            ++outcomes[1];
        } catch (const AmbiguousColumn&) {
            ++outcomes[2];
        }
    }
    // Columns a/b are unknown to the schema, so both paths must occur.
    CHECK(outcomes[0] + outcomes[1] + outcomes[2] == 300);
    CHECK(outcomes[1] > 0);
}
