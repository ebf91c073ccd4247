#include "rpl/parse/lexer.hpp"

#include <array>
#include <cctype>

namespace rpl::parse {

namespace {

constexpr std::array<std::string_view, 16> kKeywords{
    "module", "interface", "class", "implements", "if",   "else", "while", "return",
    "await",  "new",       "hold",  "release",    "cost", "after", "dl",   "Resources",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

bool is_keyword(std::string_view word)
{
    for (auto k : kKeywords)
        if (k == word)
            return true;
    return false;
}

const char* to_string(Tok t)
{
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Placeholder: return "placeholder";
    case Tok::Dollar: return "'$'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Assign: return "'='";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Bang: return "'!'";
    case Tok::Question: return "'?'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view src, std::vector<Diagnostic>& diags)
{
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto emit = [&](Tok kind, std::size_t len, std::string text = {}) {
        out.push_back(Token{kind, std::move(text), {line, col, static_cast<int>(len)}});
        advance(len);
    };

    while (i < src.size()) {
        char c = src[i];
        char next = i + 1 < src.size() ? src[i + 1] : '\0';
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && next == '/') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (ident_start(c)) {
            std::size_t end = i;
            while (end < src.size() && ident_char(src[end]))
                ++end;
            emit(Tok::Ident, end - i, std::string(src.substr(i, end - i)));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = i;
            while (end < src.size() && std::isdigit(static_cast<unsigned char>(src[end])))
                ++end;
            emit(Tok::Int, end - i, std::string(src.substr(i, end - i)));
            continue;
        }
        if (c == '$') {
            if (ident_char(next)) {
                std::size_t end = i + 1;
                while (end < src.size() && ident_char(src[end]))
                    ++end;
                emit(Tok::Placeholder, end - i, std::string(src.substr(i + 1, end - i - 1)));
            } else {
                emit(Tok::Dollar, 1);
            }
            continue;
        }
        auto two = [&](char second) { return next == second; };
        switch (c) {
        case '{': emit(Tok::LBrace, 1); break;
        case '}': emit(Tok::RBrace, 1); break;
        case '(': emit(Tok::LParen, 1); break;
        case ')': emit(Tok::RParen, 1); break;
        case '[': emit(Tok::LBracket, 1); break;
        case ']': emit(Tok::RBracket, 1); break;
        case ',': emit(Tok::Comma, 1); break;
        case ';': emit(Tok::Semi, 1); break;
        case ':': emit(Tok::Colon, 1); break;
        case '.': emit(Tok::Dot, 1); break;
        case '?': emit(Tok::Question, 1); break;
        case '+': emit(Tok::Plus, 1); break;
        case '-': emit(Tok::Minus, 1); break;
        case '*': emit(Tok::Star, 1); break;
        case '/': emit(Tok::Slash, 1); break;
        case '<': two('=') ? emit(Tok::Le, 2) : emit(Tok::Lt, 1); break;
        case '>': two('=') ? emit(Tok::Ge, 2) : emit(Tok::Gt, 1); break;
        case '=': two('=') ? emit(Tok::EqEq, 2) : emit(Tok::Assign, 1); break;
        case '!': two('=') ? emit(Tok::Ne, 2) : emit(Tok::Bang, 1); break;
        case '&':
            if (two('&')) {
                emit(Tok::AndAnd, 2);
                break;
            }
            [[fallthrough]];
        case '|':
            if (c == '|' && two('|')) {
                emit(Tok::OrOr, 2);
                break;
            }
            [[fallthrough]];
        default:
            diags.push_back({{line, col, 1}, Severity::Error,
                             std::string("unexpected character '") + c + "'"});
            advance(1);
        }
    }
    out.push_back(Token{Tok::End, {}, {line, col, 0}});
    return out;
}

} // namespace rpl::parse
