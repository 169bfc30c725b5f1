#include "capql/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <optional>

#include "capql/error.hpp"

namespace capql {

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Real,
    String,
    Placeholder, // $k
    Star,
    Comma,
    LParen,
    RParen,
    Plus,
    Minus,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    // keywords
    KwAnd,
    KwOr,
    KwNot,
    KwIs,
    KwNull,
    KwAs,
};

struct Token {
    Tok kind = Tok::End;
    std::size_t offset = 0;
    std::string text;       // identifier / string payload (unescaped)
    std::int64_t int_value = 0;
    double real_value = 0.0;
    int placeholder = 0;
};

const std::map<std::string, Tok, CiLess> kKeywords = {
    {"and", Tok::KwAnd}, {"or", Tok::KwOr},   {"not", Tok::KwNot},
    {"is", Tok::KwIs},   {"null", Tok::KwNull}, {"as", Tok::KwAs},
};

const std::map<std::string, AggFunc, CiLess> kAggFuncs = {
    {"count", AggFunc::Count}, {"sum", AggFunc::Sum}, {"avg", AggFunc::Avg},
    {"min", AggFunc::Min},     {"max", AggFunc::Max},
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_ws();
        Token tok;
        tok.offset = pos_;
        if (pos_ >= text_.size()) {
            tok.kind = Tok::End;
            return tok;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            tok.text = std::string(text_.substr(start, pos_ - start));
            auto kw = kKeywords.find(tok.text);
            tok.kind = kw == kKeywords.end() ? Tok::Ident : kw->second;
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            return lex_number();
        }
        switch (c) {
        case '\'': return lex_string();
        case '$': return lex_placeholder();
        case ',': ++pos_; tok.kind = Tok::Comma; return tok;
        case '(': ++pos_; tok.kind = Tok::LParen; return tok;
        case ')': ++pos_; tok.kind = Tok::RParen; return tok;
        case '+': ++pos_; tok.kind = Tok::Plus; return tok;
        case '-': ++pos_; tok.kind = Tok::Minus; return tok;
        case '*': ++pos_; tok.kind = Tok::Star; return tok;
        case '/': ++pos_; tok.kind = Tok::Div; return tok;
        case '=': ++pos_; tok.kind = Tok::Eq; return tok;
        case '<':
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '=') { ++pos_; tok.kind = Tok::Le; }
            else if (pos_ < text_.size() && text_[pos_] == '>') { ++pos_; tok.kind = Tok::Ne; }
            else { tok.kind = Tok::Lt; }
            return tok;
        case '>':
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '=') { ++pos_; tok.kind = Tok::Ge; }
            else { tok.kind = Tok::Gt; }
            return tok;
        case '!':
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                pos_ += 2;
                tok.kind = Tok::Ne;
                return tok;
            }
            throw ParseError("unexpected character '!'", pos_, {"!="});
        default:
            throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        }
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    Token lex_number() {
        Token tok;
        tok.offset = pos_;
        std::size_t start = pos_;
        bool is_real = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            is_real = true;
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                is_real = true;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // `e` belongs to a following identifier, not this number
            }
        }
        std::string_view body = text_.substr(start, pos_ - start);
        if (is_real) {
            tok.kind = Tok::Real;
            tok.real_value = std::strtod(std::string(body).c_str(), nullptr);
        } else {
            std::int64_t value = 0;
            auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
            if (ec == std::errc::result_out_of_range) {
                tok.kind = Tok::Real;
                tok.real_value = std::strtod(std::string(body).c_str(), nullptr);
            } else {
                tok.kind = Tok::Int;
                tok.int_value = value;
            }
        }
        return tok;
    }

    Token lex_string() {
        Token tok;
        tok.offset = pos_;
        tok.kind = Tok::String;
        ++pos_; // opening quote
        std::string out;
        while (true) {
            if (pos_ >= text_.size()) {
                throw ParseError("unterminated string literal", tok.offset, {"'"});
            }
            char c = text_[pos_];
            if (c == '\'') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
                    out += '\'';
                    pos_ += 2;
                    continue;
                }
                ++pos_;
                break;
            }
            out += c;
            ++pos_;
        }
        tok.text = std::move(out);
        return tok;
    }

    Token lex_placeholder() {
        Token tok;
        tok.offset = pos_;
        tok.kind = Tok::Placeholder;
        ++pos_; // '$'
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) {
            throw ParseError("expected digits after '$'", tok.offset, {"$<n>"});
        }
        tok.placeholder = std::atoi(std::string(text_.substr(start, pos_ - start)).c_str());
        if (tok.placeholder < 1) {
            throw ParseError("placeholder indices start at $1", tok.offset);
        }
        return tok;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

struct ParserOptions {
    bool allow_placeholders = false;
    bool allow_aggregates = false; // aggregation calls as expression atoms
};

class Parser {
public:
    Parser(std::string_view text, ParserOptions options)
        : lexer_(text), options_(options) {
        advance();
    }

    ExprPtr parse_expression_to_end() {
        ExprPtr e = parse_or();
        expect_end();
        return e;
    }

    std::vector<SelectItem> parse_select_list_to_end() {
        std::vector<SelectItem> items;
        items.push_back(parse_select_item());
        while (cur_.kind == Tok::Comma) {
            advance();
            items.push_back(parse_select_item());
        }
        expect_end();
        return items;
    }

    std::vector<AggItem> parse_agg_list_to_end() {
        std::vector<AggItem> items;
        items.push_back(parse_agg_item());
        while (cur_.kind == Tok::Comma) {
            advance();
            items.push_back(parse_agg_item());
        }
        expect_end();
        return items;
    }

    std::vector<Assignment> parse_assignments_to_end() {
        std::vector<Assignment> out;
        NameSet seen;
        while (true) {
            if (cur_.kind != Tok::Ident) {
                throw ParseError("expected column name", cur_.offset, {"identifier"});
            }
            std::string column = cur_.text;
            advance();
            if (cur_.kind != Tok::Eq) {
                throw ParseError("expected '=' in assignment", cur_.offset, {"="});
            }
            advance();
            ExprPtr value = parse_or();
            if (!seen.insert(column).second) {
                throw DuplicateAssignment(column);
            }
            out.push_back(Assignment{std::move(column), std::move(value)});
            if (cur_.kind != Tok::Comma) break;
            advance();
        }
        expect_end();
        return out;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    void expect_end() {
        if (cur_.kind == Tok::KwAs) {
            throw AliasNotSupported(describe_current());
        }
        if (cur_.kind != Tok::End) {
            throw ParseError("unexpected trailing input: " + describe_current(), cur_.offset,
                             {"end of input"});
        }
    }

    std::string describe_current() const {
        switch (cur_.kind) {
        case Tok::Ident: return cur_.text;
        case Tok::String: return "'" + cur_.text + "'";
        case Tok::Int: return std::to_string(cur_.int_value);
        case Tok::End: return "<end>";
        default: return "token";
        }
    }

    SelectItem parse_select_item() {
        ExprPtr e = parse_or();
        if (cur_.kind == Tok::KwAs) {
            advance();
            std::string alias = cur_.kind == Tok::Ident ? cur_.text : "<alias>";
            throw AliasNotSupported(alias);
        }
        if (cur_.kind == Tok::Ident) {
            // implicit alias, e.g. "name n"
            throw AliasNotSupported(cur_.text);
        }
        return make_select_item(std::move(e));
    }

    AggItem parse_agg_item() {
        bool saved = options_.allow_aggregates;
        options_.allow_aggregates = true;
        ExprPtr e = parse_or();
        options_.allow_aggregates = saved;
        if (cur_.kind == Tok::KwAs) {
            advance();
            throw AliasNotSupported(cur_.kind == Tok::Ident ? cur_.text : "<alias>");
        }
        if (cur_.kind == Tok::Ident) {
            throw AliasNotSupported(cur_.text);
        }
        if (const auto* agg = std::get_if<AggExpr>(&e->node)) {
            return AggItem{*agg};
        }
        if (contains_aggregate(e)) {
            // e.g. COUNT(*) + 1: expressions over aggregates are out of scope
            throw ParseError("aggregation calls cannot be nested in expressions", 0);
        }
        return AggItem{make_select_item(std::move(e))};
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (cur_.kind == Tok::KwOr) {
            advance();
            lhs = make_binary(BinaryOp::Or, std::move(lhs), parse_and());
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (cur_.kind == Tok::KwAnd) {
            advance();
            lhs = make_binary(BinaryOp::And, std::move(lhs), parse_not());
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (cur_.kind == Tok::KwNot) {
            advance();
            return make_unary(UnaryOp::Not, parse_not());
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        while (true) {
            std::optional<BinaryOp> op;
            switch (cur_.kind) {
            case Tok::Eq: op = BinaryOp::Eq; break;
            case Tok::Ne: op = BinaryOp::Ne; break;
            case Tok::Lt: op = BinaryOp::Lt; break;
            case Tok::Le: op = BinaryOp::Le; break;
            case Tok::Gt: op = BinaryOp::Gt; break;
            case Tok::Ge: op = BinaryOp::Ge; break;
            case Tok::KwIs: {
                advance();
                bool negated = false;
                if (cur_.kind == Tok::KwNot) {
                    negated = true;
                    advance();
                }
                if (cur_.kind != Tok::KwNull) {
                    throw ParseError("expected NULL after IS", cur_.offset, {"NULL"});
                }
                advance();
                lhs = make_unary(negated ? UnaryOp::IsNotNull : UnaryOp::IsNull, std::move(lhs));
                continue;
            }
            default: return lhs;
            }
            advance();
            lhs = make_binary(*op, std::move(lhs), parse_additive());
        }
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            BinaryOp op = cur_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            advance();
            lhs = make_binary(op, std::move(lhs), parse_multiplicative());
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Div) {
            BinaryOp op = cur_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
            advance();
            lhs = make_binary(op, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (cur_.kind == Tok::Minus) {
            advance();
            return make_unary(UnaryOp::Neg, parse_unary());
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        switch (cur_.kind) {
        case Tok::Int: {
            auto e = make_literal(SqlValue{cur_.int_value});
            advance();
            return e;
        }
        case Tok::Real: {
            auto e = make_literal(SqlValue{cur_.real_value});
            advance();
            return e;
        }
        case Tok::String: {
            auto e = make_literal(SqlValue{cur_.text});
            advance();
            return e;
        }
        case Tok::KwNull: {
            advance();
            return make_literal(sql_null());
        }
        case Tok::Placeholder: {
            if (!options_.allow_placeholders) {
                throw ParseError("placeholders are only allowed in sqlformat templates",
                                 cur_.offset);
            }
            auto e = make_placeholder(cur_.placeholder);
            advance();
            return e;
        }
        case Tok::LParen: {
            advance();
            ExprPtr e = parse_or();
            if (cur_.kind != Tok::RParen) {
                throw ParseError("expected ')'", cur_.offset, {")"});
            }
            advance();
            return e;
        }
        case Tok::Ident: {
            Token ident = cur_;
            advance();
            if (cur_.kind == Tok::LParen) {
                return parse_call(ident);
            }
            return make_column(ident.text);
        }
        case Tok::Star:
            throw ParseError("'*' is only allowed inside COUNT in aggregate lists", cur_.offset);
        default:
            throw ParseError("expected expression", cur_.offset,
                             {"identifier", "literal", "'('"});
        }
    }

    ExprPtr parse_call(const Token& ident) {
        auto func = kAggFuncs.find(ident.text);
        if (func == kAggFuncs.end()) {
            throw ParseError("unknown function: " + ident.text, ident.offset,
                             {"COUNT", "SUM", "AVG", "MIN", "MAX"});
        }
        if (!options_.allow_aggregates) {
            throw ParseError("aggregation function not allowed here: " + ident.text,
                             ident.offset);
        }
        advance(); // '('
        ExprPtr argument;
        if (cur_.kind == Tok::Star) {
            if (func->second != AggFunc::Count) {
                throw ParseError("'*' is only valid as the argument of COUNT", cur_.offset);
            }
            advance();
        } else {
            bool saved = options_.allow_aggregates;
            options_.allow_aggregates = false; // no nested aggregation
            argument = parse_or();
            options_.allow_aggregates = saved;
        }
        if (cur_.kind != Tok::RParen) {
            throw ParseError("expected ')'", cur_.offset, {")"});
        }
        advance();
        return make_agg(func->second, std::move(argument));
    }

    Lexer lexer_;
    ParserOptions options_;
    Token cur_;
};

ExprPtr substitute_placeholders(const ExprPtr& expr, const std::vector<SqlValue>& args) {
    if (const auto* p = std::get_if<Placeholder>(&expr->node)) {
        return make_literal(args[static_cast<std::size_t>(p->index - 1)]);
    }
    if (const auto* u = std::get_if<Unary>(&expr->node)) {
        return make_unary(u->op, substitute_placeholders(u->operand, args));
    }
    if (const auto* b = std::get_if<Binary>(&expr->node)) {
        return make_binary(b->op, substitute_placeholders(b->lhs, args),
                           substitute_placeholders(b->rhs, args));
    }
    return expr;
}

void collect_placeholder_indices(const ExprPtr& expr, std::vector<bool>& seen, int& max_index) {
    if (const auto* p = std::get_if<Placeholder>(&expr->node)) {
        max_index = std::max(max_index, p->index);
        if (static_cast<std::size_t>(p->index) > seen.size()) {
            seen.resize(static_cast<std::size_t>(p->index), false);
        }
        seen[static_cast<std::size_t>(p->index - 1)] = true;
    } else if (const auto* u = std::get_if<Unary>(&expr->node)) {
        collect_placeholder_indices(u->operand, seen, max_index);
    } else if (const auto* b = std::get_if<Binary>(&expr->node)) {
        collect_placeholder_indices(b->lhs, seen, max_index);
        collect_placeholder_indices(b->rhs, seen, max_index);
    }
}

} // namespace

ExprPtr parse_predicate(std::string_view text) {
    return Parser(text, ParserOptions{}).parse_expression_to_end();
}

ExprPtr parse_having(std::string_view text) {
    return Parser(text, ParserOptions{.allow_placeholders = false, .allow_aggregates = true})
        .parse_expression_to_end();
}

std::vector<SelectItem> parse_select_list(std::string_view text) {
    return Parser(text, ParserOptions{}).parse_select_list_to_end();
}

std::vector<AggItem> parse_agg_list(std::string_view text) {
    return Parser(text, ParserOptions{}).parse_agg_list_to_end();
}

std::vector<Assignment> parse_assignments(std::string_view text) {
    return Parser(text, ParserOptions{}).parse_assignments_to_end();
}

std::vector<AggFunc> parse_agg_func_list(std::string_view text) {
    std::vector<AggFunc> out;
    Lexer lexer(text);
    bool expect_name = true;
    while (true) {
        Token tok = lexer.next();
        if (tok.kind == Tok::End) {
            if (expect_name && !out.empty()) {
                throw ParseError("trailing comma in aggregation function list", tok.offset);
            }
            break;
        }
        if (expect_name) {
            if (tok.kind != Tok::Ident) {
                throw ParseError("expected aggregation function name", tok.offset);
            }
            auto func = kAggFuncs.find(tok.text);
            if (func == kAggFuncs.end()) {
                throw ParseError("unknown aggregation function: " + tok.text, tok.offset,
                                 {"COUNT", "SUM", "AVG", "MIN", "MAX"});
            }
            out.push_back(func->second);
        } else if (tok.kind != Tok::Comma) {
            throw ParseError("expected ','", tok.offset, {","});
        }
        expect_name = !expect_name;
    }
    return out;
}

ExprPtr sqlformat(std::string_view tmpl, const std::vector<SqlValue>& args) {
    ExprPtr parsed =
        Parser(tmpl, ParserOptions{.allow_placeholders = true}).parse_expression_to_end();
    std::vector<bool> seen;
    int max_index = 0;
    collect_placeholder_indices(parsed, seen, max_index);
    if (static_cast<std::size_t>(max_index) != args.size()) {
        throw ArityMismatch("sqlformat: template uses " + std::to_string(max_index) +
                            " placeholder(s) but " + std::to_string(args.size()) +
                            " argument(s) were supplied");
    }
    for (int i = 0; i < max_index; ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            throw ArityMismatch("sqlformat: placeholders must be contiguous from $1; $" +
                                std::to_string(i + 1) + " is missing");
        }
    }
    return substitute_placeholders(parsed, args);
}

} // namespace capql
