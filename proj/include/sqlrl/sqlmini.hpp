#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqlrl/actionspace.hpp"
#include "sqlrl/envgen.hpp"

namespace sqlrl {
namespace sqlmini {

// Miniature SQL front end used as a structural cross-check of the response
// oracle. It covers exactly the language produced by composing the 51
// attack payloads into the generated query templates:
//
//   query  := select (UNION select)*
//   select := SELECT term (, term)* [FROM ident] [WHERE expr]
//             [LIMIT num [OFFSET num]]
//   expr   := cmp ((AND | OR) cmp)*
//   cmp    := operand (= | >) operand | operand BETWEEN operand AND operand
//
// `#` starts a comment running to end of input. String literals use single
// or double quotes with no escape sequences, so the live/inert dichotomy of
// an injected payload is exact.

enum class TokenKind { Keyword, Identifier, Number, StringLit, Symbol, Comment };

struct Token {
    TokenKind kind;
    std::string text;  // raw lexeme, quotes included for string literals
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the last character
};

enum class LexErrorKind { UnterminatedString, UnexpectedCharacter };

struct LexError {
    LexErrorKind kind;
    std::size_t position = 0;
};

struct SyntaxError {
    std::string message;
    std::size_t position = 0;  // character offset of the offending token
};

using LexResult = std::variant<std::vector<Token>, LexError>;

LexResult tokenize(const std::string& query);

struct Operand {
    enum class Kind { Number, String, Identifier } kind = Kind::Number;
    std::string text;  // lexeme; string operands keep their quotes
};

struct Comparison {
    enum class Op { Eq, Gt, Between } op = Op::Eq;
    Operand lhs;
    Operand rhs;
    Operand rhs_high;  // BETWEEN only: lhs BETWEEN rhs AND rhs_high
};

enum class Connective { And, Or };

// expr := cmp ((AND|OR) cmp)* — a left-associative chain.
struct BoolExpr {
    std::vector<Comparison> comparisons;
    std::vector<Connective> connectives;  // size = comparisons.size() - 1
};

struct SelectStmt {
    std::vector<Operand> columns;
    std::optional<std::string> from;
    std::optional<BoolExpr> where;
    std::optional<long> limit;
    std::optional<long> offset;
};

struct Ast {
    std::vector<SelectStmt> selects;  // joined by UNION
};

using ParseResult = std::variant<Ast, SyntaxError>;

ParseResult parse(const std::vector<Token>& tokens);

// Substitutes the payload for the single {INPUT} placeholder, verbatim.
// Throws std::invalid_argument unless the template contains exactly one.
std::string compose(const std::string& template_with_placeholder, const std::string& payload);

struct InjectionAnalysis {
    bool parse_ok = false;
    // The payload contributes expression or UNION structure, as opposed to
    // sitting inert inside a string literal. live implies parse_ok.
    bool live = false;
    std::vector<int> union_counts;  // per-select column counts, when parse_ok
};

InjectionAnalysis analyze(const QueryTemplate& tmpl, const Action& action);

// Stable plain-text dumps, used by the debug CLI and golden tests.
std::string dump_tokens(const std::vector<Token>& tokens);
std::string dump_ast(const Ast& ast);

// Token stream rendered back to parseable text (comments dropped).
std::string render_tokens(const std::vector<Token>& tokens);

}  // namespace sqlmini
}  // namespace sqlrl
