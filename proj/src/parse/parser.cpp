#include "rpl/parse/parser.hpp"

#include "rpl/lang/preprocess.hpp"
#include "rpl/parse/lexer.hpp"

#include <charconv>

namespace rpl::parse {

using namespace rpl::lang;

bool has_errors(const std::vector<Diagnostic>& diags)
{
    for (const auto& d : diags)
        if (d.severity == Severity::Error)
            return true;
    return false;
}

nlohmann::json to_json(const Diagnostic& d)
{
    return {{"line", d.span.line},
            {"column", d.span.column},
            {"severity", d.severity == Severity::Error ? "error" : "warning"},
            {"message", d.message}};
}

nlohmann::json to_json(const std::vector<Diagnostic>& diags)
{
    auto arr = nlohmann::json::array();
    for (const auto& d : diags)
        arr.push_back(to_json(d));
    return arr;
}

std::string format(const Diagnostic& d)
{
    return std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
           (d.severity == Severity::Error ? "error: " : "warning: ") + d.message;
}

namespace {

struct SyntaxError {
    Diagnostic diag;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    std::optional<Program> program()
    {
        try {
            return parse_program();
        } catch (const SyntaxError& e) {
            diags_.push_back(e.diag);
            return std::nullopt;
        }
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;

    // -- token helpers -------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const
    {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
    bool at_word(std::string_view w, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == w;
    }
    const Token& take()
    {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size())
            ++pos_;
        return t;
    }
    const Token& previous() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }

    [[noreturn]] void fail(const Token& at, std::string message) const
    {
        throw SyntaxError{{at.span, Severity::Error, std::move(message)}};
    }

    const Token& expect(Tok k, const char* context)
    {
        if (!at(k))
            fail(peek(), std::string("expected ") + to_string(k) + " " + context + ", found " + describe(peek()));
        return take();
    }
    void expect_word(std::string_view w, const char* context)
    {
        if (!at_word(w))
            fail(peek(), "expected '" + std::string(w) + "' " + context + ", found " + describe(peek()));
        take();
    }
    std::string expect_name(const char* context)
    {
        if (!at(Tok::Ident))
            fail(peek(), std::string("expected identifier ") + context + ", found " + describe(peek()));
        if (is_keyword(peek().text))
            fail(peek(), "'" + peek().text + "' is a reserved word");
        return take().text;
    }
    static std::string describe(const Token& t)
    {
        if (t.kind == Tok::Ident || t.kind == Tok::Int)
            return "'" + t.text + "'";
        if (t.kind == Tok::Placeholder)
            return "'$" + t.text + "'";
        return to_string(t.kind);
    }

    // Span from `start` to the end of the previously consumed token.
    SourceSpan span_from(const Token& start) const
    {
        const Token& last = previous();
        SourceSpan s = start.span;
        if (last.span.line == start.span.line)
            s.length = last.span.column + last.span.length - start.span.column;
        return s;
    }

    // -- declarations --------------------------------------------------------

    Program parse_program()
    {
        Program p;
        expect_word("module", "at start of model");
        p.module_name = expect_name("after 'module'");
        expect(Tok::Semi, "after module name");

        for (;;) {
            if (at_word("interface"))
                p.interfaces.push_back(parse_interface());
            else if (at_word("class"))
                p.classes.push_back(parse_class());
            else
                break;
        }
        if (!at(Tok::LBrace))
            fail(peek(), "expected interface, class or main block, found " + describe(peek()));
        p.main = parse_block();
        if (at_word("Resources"))
            p.resources = parse_resources();
        if (!at(Tok::End))
            fail(peek(), "unexpected " + describe(peek()) + " after main block");
        return p;
    }

    InterfaceDecl parse_interface()
    {
        InterfaceDecl decl;
        const Token& start = peek();
        take();
        decl.name = expect_name("after 'interface'");
        decl.span = span_from(start);
        expect(Tok::LBrace, "to open interface body");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            const Token& sig_start = peek();
            try {
                MethodSig sig;
                sig.return_type = parse_type();
                sig.name = expect_name("as method name");
                sig.params = parse_params();
                expect(Tok::Semi, "after method signature");
                sig.span = span_from(sig_start);
                decl.methods.push_back(std::move(sig));
            } catch (const SyntaxError& e) {
                diags_.push_back(e.diag);
                synchronize();
            }
        }
        expect(Tok::RBrace, "to close interface body");
        return decl;
    }

    ClassDecl parse_class()
    {
        ClassDecl decl;
        const Token& start = peek();
        take();
        decl.name = expect_name("after 'class'");
        expect_word("implements", "after class name");
        decl.implements = expect_name("after 'implements'");
        decl.span = span_from(start);
        expect(Tok::LBrace, "to open class body");
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            const Token& member_start = peek();
            try {
                Type type = parse_type();
                std::string name = expect_name("as member name");
                if (at(Tok::LParen)) {
                    MethodDecl m;
                    m.return_type = std::move(type);
                    m.name = std::move(name);
                    m.params = parse_params();
                    m.span = span_from(member_start);
                    m.body = parse_block();
                    decl.methods.push_back(std::move(m));
                } else {
                    FieldDecl f;
                    f.type = std::move(type);
                    f.name = std::move(name);
                    if (at(Tok::Assign)) {
                        take();
                        f.init = parse_expr();
                    }
                    expect(Tok::Semi, "after field declaration");
                    f.span = span_from(member_start);
                    decl.fields.push_back(std::move(f));
                }
            } catch (const SyntaxError& e) {
                diags_.push_back(e.diag);
                synchronize();
            }
        }
        expect(Tok::RBrace, "to close class body");
        return decl;
    }

    std::vector<lang::Param> parse_params()
    {
        std::vector<lang::Param> params;
        expect(Tok::LParen, "to open parameter list");
        if (!at(Tok::RParen)) {
            do {
                lang::Param p;
                p.type = parse_type();
                p.name = expect_name("as parameter name");
                params.push_back(std::move(p));
            } while (at(Tok::Comma) && (take(), true));
        }
        expect(Tok::RParen, "to close parameter list");
        return params;
    }

    Type parse_type()
    {
        Type t;
        t.name = expect_name("as type name");
        if (at(Tok::Lt)) {
            take();
            do {
                t.args.push_back(parse_type());
            } while (at(Tok::Comma) && (take(), true));
            expect(Tok::Gt, "to close type arguments");
        }
        return t;
    }

    std::vector<ResourceGroup> parse_resources()
    {
        take(); // Resources
        expect(Tok::Colon, "after 'Resources'");
        std::vector<ResourceGroup> groups;
        int next_id = 1;
        ResourceGroup current;
        auto close_group = [&](const Token& at) {
            if (current.descriptors.empty())
                fail(at, "empty resource group");
            groups.push_back(std::move(current));
            current = {};
        };
        while (!at(Tok::End)) {
            if (at(Tok::Dollar)) {
                const Token& sep = take();
                close_group(sep);
                continue;
            }
            const Token& start = peek();
            ResourceDescriptor d;
            d.id = next_id++;
            d.category = expect_name("as resource category");
            expect(Tok::Comma, "after resource category");
            d.efficiency = parse_quality("efficiency");
            expect(Tok::Comma, "after resource efficiency");
            d.cost_per_unit = parse_quality("cost");
            expect(Tok::Comma, "after resource cost");
            d.extra_quality = parse_quality("quality");
            if (!current.descriptors.empty() && current.category() != d.category)
                fail(start, "resource '" + d.category + "' listed in the group of '" + current.category() +
                                "'; separate categories with a '$' line");
            current.descriptors.push_back(std::move(d));
        }
        if (!current.descriptors.empty())
            groups.push_back(std::move(current));
        return groups;
    }

    std::int64_t parse_quality(const char* what)
    {
        const Token& t = expect(Tok::Int, (std::string("as resource ") + what).c_str());
        return to_int(t);
    }

    std::int64_t to_int(const Token& t) const
    {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc())
            fail(t, "integer literal out of range");
        return v;
    }

    // -- statements ----------------------------------------------------------

    void synchronize()
    {
        int depth = 0;
        while (!at(Tok::End)) {
            if (at(Tok::LBrace))
                ++depth;
            if (at(Tok::RBrace)) {
                if (depth == 0)
                    return;
                --depth;
                take();
                if (depth == 0)
                    return;
                continue;
            }
            if (at(Tok::Semi) && depth == 0) {
                take();
                return;
            }
            take();
        }
    }

    Block parse_block()
    {
        Block b;
        const Token& open = expect(Tok::LBrace, "to open block");
        b.span = open.span;
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            try {
                b.stmts.push_back(parse_stmt());
            } catch (const SyntaxError& e) {
                diags_.push_back(e.diag);
                synchronize();
            }
        }
        expect(Tok::RBrace, "to close block");
        return b;
    }

    Stmt make(const Token& start, Stmt::Node node) { return Stmt{span_from(start), std::move(node)}; }

    Stmt parse_stmt()
    {
        const Token& start = peek();
        if (at_word("if"))
            return parse_if();
        if (at_word("while")) {
            take();
            expect(Tok::LParen, "after 'while'");
            ExprPtr cond = parse_expr();
            expect(Tok::RParen, "after loop condition");
            SourceSpan head = span_from(start);
            Block body = parse_block();
            return Stmt{head, stmt::While{std::move(cond), std::move(body)}};
        }
        if (at_word("await")) {
            take();
            std::string fut = expect_name("after 'await'");
            expect(Tok::Question, "after awaited future");
            expect(Tok::Semi, "after await");
            return make(start, stmt::Await{std::move(fut)});
        }
        if (at_word("cost")) {
            take();
            expect(Tok::LParen, "after 'cost'");
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "after cost duration");
            expect(Tok::Semi, "after cost");
            return make(start, stmt::Cost{std::move(e)});
        }
        if (at_word("release")) {
            take();
            expect(Tok::LParen, "after 'release'");
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "after released value");
            expect(Tok::Semi, "after release");
            return make(start, stmt::Release{std::move(e)});
        }
        if (at_word("return")) {
            take();
            ExprPtr e = parse_expr();
            expect(Tok::Semi, "after return value");
            return make(start, stmt::Return{std::move(e)});
        }
        if (at(Tok::Ident) && is_keyword(peek().text))
            fail(peek(), "unexpected '" + peek().text + "' at start of statement");
        if (!at(Tok::Ident))
            fail(peek(), "expected statement, found " + describe(peek()));

        if (at(Tok::Assign, 1)) {
            Target target{std::nullopt, take().text};
            take(); // =
            return parse_binding(start, std::move(target));
        }
        Type type = parse_type();
        std::string name = expect_name("as variable name");
        if (at(Tok::Semi)) {
            take();
            return make(start, stmt::VarDecl{std::move(type), std::move(name), nullptr});
        }
        expect(Tok::Assign, "or ';' after variable name");
        return parse_binding(start, Target{std::move(type), std::move(name)});
    }

    Stmt parse_if()
    {
        const Token& start = take();
        expect(Tok::LParen, "after 'if'");
        ExprPtr cond = parse_expr();
        expect(Tok::RParen, "after condition");
        SourceSpan head = span_from(start);
        Block then_block = parse_block();
        std::optional<Block> else_block;
        if (at_word("else")) {
            take();
            if (at_word("if")) {
                Block wrapper;
                wrapper.span = peek().span;
                wrapper.stmts.push_back(parse_if());
                else_block = std::move(wrapper);
            } else {
                else_block = parse_block();
            }
        }
        return Stmt{head, stmt::If{std::move(cond), std::move(then_block), std::move(else_block)}};
    }

    // Everything after `target =`.
    Stmt parse_binding(const Token& start, Target target)
    {
        if (at(Tok::Bang) && at(Tok::Ident, 1) && at(Tok::LParen, 2) && !builtin_from_name(peek(1).text)) {
            take();
            stmt::AsyncCall call;
            call.target = std::move(target);
            call.method = expect_name("as method name");
            call.args = parse_args(Tok::LParen, Tok::RParen);
            if (at_word("after")) {
                take();
                while (at(Tok::Ident) && !at_word("dl"))
                    call.after.push_back(expect_name("in 'after' list"));
            }
            expect_word("dl", "before deadline");
            call.deadline = parse_expr();
            expect(Tok::Semi, "after asynchronous call");
            return make(start, std::move(call));
        }
        if (at_word("hold")) {
            take();
            expect(Tok::LParen, "after 'hold'");
            ExprPtr req = parse_expr();
            expect(Tok::RParen, "after hold request");
            expect(Tok::Semi, "after hold");
            return make(start, stmt::Hold{std::move(target), std::move(req)});
        }
        if (at_word("new")) {
            take();
            std::string cls = expect_name("after 'new'");
            expect(Tok::LParen, "after class name");
            expect(Tok::RParen, "after '('; constructors take no arguments");
            expect(Tok::Semi, "after object creation");
            return make(start, stmt::New{std::move(target), std::move(cls)});
        }
        if (at(Tok::Ident) && at(Tok::Dot, 1) && at_word("get", 2)) {
            std::string fut = take().text;
            take();
            take();
            expect(Tok::Semi, "after get");
            return make(start, stmt::Get{std::move(target), std::move(fut)});
        }
        ExprPtr value = parse_expr();
        expect(Tok::Semi, "after expression");
        if (target.decl_type)
            return make(start, stmt::VarDecl{std::move(*target.decl_type), std::move(target.name), std::move(value)});
        return make(start, stmt::Assign{std::move(target.name), std::move(value)});
    }

    std::vector<ExprPtr> parse_args(Tok open, Tok close)
    {
        std::vector<ExprPtr> args;
        expect(open, "to open argument list");
        if (!at(close)) {
            do {
                args.push_back(parse_expr());
            } while (at(Tok::Comma) && (take(), true));
        }
        expect(close, "to close argument list");
        return args;
    }

    // -- expressions ---------------------------------------------------------

    ExprPtr node(const Token& start, Expr::Node n)
    {
        return std::make_unique<const Expr>(Expr{span_from(start), std::move(n)});
    }

    ExprPtr parse_expr() { return parse_binary(0); }

    static int precedence(Tok t)
    {
        switch (t) {
        case Tok::OrOr: return 1;
        case Tok::AndAnd: return 2;
        case Tok::EqEq:
        case Tok::Ne: return 3;
        case Tok::Lt:
        case Tok::Le:
        case Tok::Gt:
        case Tok::Ge: return 4;
        case Tok::Plus:
        case Tok::Minus: return 5;
        case Tok::Star:
        case Tok::Slash: return 6;
        default: return -1;
        }
    }

    static BinaryOp binary_op(Tok t)
    {
        switch (t) {
        case Tok::OrOr: return BinaryOp::Or;
        case Tok::AndAnd: return BinaryOp::And;
        case Tok::EqEq: return BinaryOp::Eq;
        case Tok::Ne: return BinaryOp::Ne;
        case Tok::Lt: return BinaryOp::Lt;
        case Tok::Le: return BinaryOp::Le;
        case Tok::Gt: return BinaryOp::Gt;
        case Tok::Ge: return BinaryOp::Ge;
        case Tok::Plus: return BinaryOp::Add;
        case Tok::Minus: return BinaryOp::Sub;
        case Tok::Star: return BinaryOp::Mul;
        default: return BinaryOp::Div;
        }
    }

    ExprPtr parse_binary(int min_prec)
    {
        const Token& start = peek();
        ExprPtr lhs = parse_unary();
        for (;;) {
            int prec = precedence(peek().kind);
            if (prec < 0 || prec <= min_prec)
                return lhs;
            BinaryOp op = binary_op(take().kind);
            ExprPtr rhs = parse_binary(prec);
            lhs = node(start, expr::Binary{op, std::move(lhs), std::move(rhs)});
        }
    }

    ExprPtr parse_unary()
    {
        const Token& start = peek();
        if (at(Tok::Minus) || at(Tok::Bang)) {
            UnaryOp op = take().kind == Tok::Minus ? UnaryOp::Neg : UnaryOp::Not;
            ExprPtr operand = parse_unary();
            return node(start, expr::Unary{op, std::move(operand)});
        }
        return parse_primary();
    }

    ExprPtr parse_primary()
    {
        const Token& start = peek();
        switch (start.kind) {
        case Tok::Int: {
            std::int64_t v = to_int(take());
            return node(start, expr::IntLit{v});
        }
        case Tok::Placeholder: {
            if (!is_known_placeholder(start.text))
                fail(start, "unknown placeholder '$" + start.text + "'");
            take();
            return node(start, expr::Param{start.text});
        }
        case Tok::LParen: {
            take();
            ExprPtr inner = parse_expr();
            expect(Tok::RParen, "to close parenthesised expression");
            return inner;
        }
        case Tok::Ident: break;
        default: fail(start, "expected expression, found " + describe(start));
        }

        const std::string& word = start.text;
        if (word == "True" || word == "False") {
            take();
            return node(start, expr::BoolLit{word == "True"});
        }
        if (word == "Nil") {
            take();
            return node(start, expr::Nil{});
        }
        if ((word == "list" || word == "set") && at(Tok::LBracket, 1)) {
            bool is_list = word == "list";
            take();
            auto items = parse_args(Tok::LBracket, Tok::RBracket);
            if (is_list)
                return node(start, expr::ListLit{std::move(items)});
            return node(start, expr::SetLit{std::move(items)});
        }
        if (at(Tok::LParen, 1)) {
            auto fn = builtin_from_name(word);
            if (!fn)
                fail(start, "unknown function '" + word + "'; methods are invoked asynchronously with '!'");
            take();
            auto args = parse_args(Tok::LParen, Tok::RParen);
            return node(start, expr::Call{*fn, std::move(args)});
        }
        if (is_keyword(word))
            fail(start, "unexpected '" + word + "' in expression");
        take();
        return node(start, expr::Var{word});
    }
};

} // namespace

ParseResult parse_syntax(std::string_view source)
{
    ParseResult result;
    auto tokens = tokenize(source, result.diagnostics);
    Parser parser(std::move(tokens), result.diagnostics);
    auto program = parser.program();
    if (program && !has_errors(result.diagnostics))
        result.program = std::move(program);
    return result;
}

ParseResult parse(std::string_view source)
{
    ParseResult result = parse_syntax(source);
    if (!result.program)
        return result;
    auto semantic = validate(*result.program);
    result.diagnostics.insert(result.diagnostics.end(), semantic.begin(), semantic.end());
    if (has_errors(result.diagnostics))
        result.program.reset();
    return result;
}

} // namespace rpl::parse
