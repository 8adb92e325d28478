#include "sqlrl/sqlmini.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace sqlrl {
namespace sqlmini {

namespace {

const char* kKeywords[] = {"SELECT", "FROM",    "WHERE", "UNION", "AND",
                           "OR",     "BETWEEN", "LIMIT", "OFFSET"};

std::string upper(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

bool is_keyword(const std::string& lexeme) {
    const std::string u = upper(lexeme);
    for (const char* k : kKeywords) {
        if (u == k) return true;
    }
    return false;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

LexResult tokenize(const std::string& q) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = q.size();
    while (i < n) {
        const char c = q[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {
            // Comment runs to end of input; nothing after it is lexed.
            tokens.push_back({TokenKind::Comment, q.substr(i), i, n});
            break;
        }
        if (c == '\'' || c == '"') {
            const std::size_t close = q.find(c, i + 1);
            if (close == std::string::npos) {
                return LexError{LexErrorKind::UnterminatedString, i};
            }
            tokens.push_back({TokenKind::StringLit, q.substr(i, close - i + 1), i, close + 1});
            i = close + 1;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(q[j]))) ++j;
            tokens.push_back({TokenKind::Number, q.substr(i, j - i), i, j});
            i = j;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < n && ident_char(q[j])) ++j;
            const std::string lexeme = q.substr(i, j - i);
            tokens.push_back({is_keyword(lexeme) ? TokenKind::Keyword : TokenKind::Identifier,
                              lexeme, i, j});
            i = j;
            continue;
        }
        if (c == '=' || c == '>' || c == ',') {
            tokens.push_back({TokenKind::Symbol, std::string(1, c), i, i + 1});
            ++i;
            continue;
        }
        return LexError{LexErrorKind::UnexpectedCharacter, i};
    }
    return tokens;
}

namespace {

// Recursive-descent parser over the token stream. A trailing comment token
// acts as end of input.
class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

    ParseResult run() {
        try {
            Ast ast;
            ast.selects.push_back(parse_select());
            while (accept_keyword("UNION")) {
                ast.selects.push_back(parse_select());
            }
            if (!at_end()) fail("trailing input after query");
            return ast;
        } catch (const SyntaxError& e) {
            return e;
        }
    }

private:
    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;

    bool at_end() const {
        return pos_ >= tokens_.size() || tokens_[pos_].kind == TokenKind::Comment;
    }

    const Token& peek() const {
        if (at_end()) fail("unexpected end of input");
        return tokens_[pos_];
    }

    const Token& advance() {
        const Token& t = peek();
        ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        const std::size_t where =
            pos_ < tokens_.size() ? tokens_[pos_].begin
                                  : (tokens_.empty() ? 0 : tokens_.back().end);
        throw SyntaxError{msg, where};
    }

    bool check_keyword(const char* kw) const {
        return !at_end() && tokens_[pos_].kind == TokenKind::Keyword &&
               upper(tokens_[pos_].text) == kw;
    }

    bool accept_keyword(const char* kw) {
        if (!check_keyword(kw)) return false;
        ++pos_;
        return true;
    }

    void expect_keyword(const char* kw) {
        if (!accept_keyword(kw)) fail(std::string("expected ") + kw);
    }

    bool accept_symbol(char s) {
        if (at_end() || tokens_[pos_].kind != TokenKind::Symbol || tokens_[pos_].text[0] != s) {
            return false;
        }
        ++pos_;
        return true;
    }

    Operand parse_operand() {
        const Token& t = peek();
        Operand op;
        switch (t.kind) {
            case TokenKind::Number: op.kind = Operand::Kind::Number; break;
            case TokenKind::StringLit: op.kind = Operand::Kind::String; break;
            case TokenKind::Identifier: op.kind = Operand::Kind::Identifier; break;
            default: fail("expected number, string, or identifier");
        }
        op.text = t.text;
        ++pos_;
        return op;
    }

    long parse_number() {
        const Token& t = peek();
        if (t.kind != TokenKind::Number) fail("expected number");
        ++pos_;
        return std::stol(t.text);
    }

    Comparison parse_comparison() {
        Comparison cmp;
        cmp.lhs = parse_operand();
        if (accept_symbol('=')) {
            cmp.op = Comparison::Op::Eq;
            cmp.rhs = parse_operand();
        } else if (accept_symbol('>')) {
            cmp.op = Comparison::Op::Gt;
            cmp.rhs = parse_operand();
        } else if (accept_keyword("BETWEEN")) {
            // The AND after BETWEEN binds greedily to the next operand;
            // any further AND continues the expression chain.
            cmp.op = Comparison::Op::Between;
            cmp.rhs = parse_operand();
            expect_keyword("AND");
            cmp.rhs_high = parse_operand();
        } else {
            fail("expected comparison operator");
        }
        return cmp;
    }

    BoolExpr parse_expr() {
        BoolExpr e;
        e.comparisons.push_back(parse_comparison());
        while (check_keyword("AND") || check_keyword("OR")) {
            const bool conj = check_keyword("AND");
            advance();
            e.connectives.push_back(conj ? Connective::And : Connective::Or);
            e.comparisons.push_back(parse_comparison());
        }
        return e;
    }

    SelectStmt parse_select() {
        expect_keyword("SELECT");
        SelectStmt s;
        s.columns.push_back(parse_operand());
        while (accept_symbol(',')) {
            s.columns.push_back(parse_operand());
        }
        if (accept_keyword("FROM")) {
            const Token& t = peek();
            if (t.kind != TokenKind::Identifier) fail("expected table name");
            s.from = t.text;
            ++pos_;
        }
        if (accept_keyword("WHERE")) {
            s.where = parse_expr();
        }
        if (accept_keyword("LIMIT")) {
            s.limit = parse_number();
            if (accept_keyword("OFFSET")) {
                s.offset = parse_number();
            }
        }
        return s;
    }
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

std::string compose(const std::string& tmpl, const std::string& payload) {
    const std::size_t first = tmpl.find(kInputPlaceholder);
    if (first == std::string::npos) {
        throw std::invalid_argument("compose: template has no {INPUT} placeholder");
    }
    if (tmpl.find(kInputPlaceholder, first + 1) != std::string::npos) {
        throw std::invalid_argument("compose: template has more than one {INPUT} placeholder");
    }
    std::string out = tmpl;
    out.replace(first, std::char_traits<char>::length(kInputPlaceholder), payload);
    return out;
}

InjectionAnalysis analyze(const QueryTemplate& tmpl, const Action& action) {
    const std::string rendered = render_template(tmpl);
    const std::size_t payload_begin = rendered.find(kInputPlaceholder);
    const std::string composed = compose(rendered, action.payload);
    const std::size_t payload_end = payload_begin + action.payload.size();

    InjectionAnalysis out;
    const LexResult lexed = tokenize(composed);
    if (std::holds_alternative<LexError>(lexed)) {
        return out;  // parse_ok = false, live = false
    }
    const auto& tokens = std::get<std::vector<Token>>(lexed);
    const ParseResult parsed = parse(tokens);
    if (std::holds_alternative<SyntaxError>(parsed)) {
        return out;
    }
    out.parse_ok = true;

    // Live iff some structural token lies wholly inside the payload span.
    // An inert payload is swallowed by a single string literal that also
    // covers the template's own quotes, so no token qualifies.
    for (const Token& t : tokens) {
        if (t.kind == TokenKind::StringLit || t.kind == TokenKind::Comment) continue;
        if (t.begin >= payload_begin && t.end <= payload_end) {
            out.live = true;
            break;
        }
    }
    for (const SelectStmt& s : std::get<Ast>(parsed).selects) {
        out.union_counts.push_back(static_cast<int>(s.columns.size()));
    }
    return out;
}

std::string dump_tokens(const std::vector<Token>& tokens) {
    std::ostringstream os;
    for (const Token& t : tokens) {
        const char* kind = nullptr;
        switch (t.kind) {
            case TokenKind::Keyword: kind = "keyword"; break;
            case TokenKind::Identifier: kind = "ident"; break;
            case TokenKind::Number: kind = "number"; break;
            case TokenKind::StringLit: kind = "string"; break;
            case TokenKind::Symbol: kind = "symbol"; break;
            case TokenKind::Comment: kind = "comment"; break;
        }
        os << t.begin << ".." << t.end << " " << kind << " " << t.text << "\n";
    }
    return os.str();
}

namespace {

void dump_operand(std::ostringstream& os, const Operand& op) { os << op.text; }

void dump_expr(std::ostringstream& os, const BoolExpr& e) {
    // Left-associative: ((c0 op c1) op c2) ...
    auto dump_cmp = [&os](const Comparison& c) {
        os << "(";
        switch (c.op) {
            case Comparison::Op::Eq: os << "= "; break;
            case Comparison::Op::Gt: os << "> "; break;
            case Comparison::Op::Between: os << "between "; break;
        }
        dump_operand(os, c.lhs);
        os << " ";
        dump_operand(os, c.rhs);
        if (c.op == Comparison::Op::Between) {
            os << " ";
            dump_operand(os, c.rhs_high);
        }
        os << ")";
    };
    for (std::size_t i = 0; i + 1 < e.comparisons.size(); ++i) os << "(";
    dump_cmp(e.comparisons[0]);
    for (std::size_t i = 1; i < e.comparisons.size(); ++i) {
        os << (e.connectives[i - 1] == Connective::And ? " and " : " or ");
        dump_cmp(e.comparisons[i]);
        os << ")";
    }
}

}  // namespace

std::string dump_ast(const Ast& ast) {
    std::ostringstream os;
    os << "query\n";
    for (const SelectStmt& s : ast.selects) {
        os << "  select\n    columns:";
        for (const Operand& c : s.columns) {
            os << " " << c.text;
        }
        os << "\n";
        if (s.from) os << "    from: " << *s.from << "\n";
        if (s.where) {
            os << "    where: ";
            dump_expr(os, *s.where);
            os << "\n";
        }
        if (s.limit) os << "    limit: " << *s.limit << "\n";
        if (s.offset) os << "    offset: " << *s.offset << "\n";
    }
    return os.str();
}

std::string render_tokens(const std::vector<Token>& tokens) {
    std::string out;
    for (const Token& t : tokens) {
        if (t.kind == TokenKind::Comment) continue;
        if (!out.empty()) out += " ";
        out += t.text;
    }
    return out;
}

}  // namespace sqlmini
}  // namespace sqlrl
