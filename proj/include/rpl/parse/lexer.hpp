#pragma once

#include "rpl/lang/ast.hpp"
#include "rpl/parse/diagnostics.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rpl::parse {

enum class Tok {
    Ident, Int, Placeholder, Dollar,
    LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Lt, Gt, Le, Ge, EqEq, Ne, Assign,
    Comma, Semi, Colon, Dot, Bang, Question,
    Plus, Minus, Star, Slash, AndAnd, OrOr,
    End,
};

const char* to_string(Tok t);

struct Token {
    Tok kind = Tok::End;
    std::string text;   // identifier name, digits, or placeholder name without `$`
    lang::SourceSpan span;
};

/// Splits RPL source into tokens. `//` comments run to end of line.
/// Unrecognised characters produce an error diagnostic and are skipped.
std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diags);

bool is_keyword(std::string_view word);

} // namespace rpl::parse
