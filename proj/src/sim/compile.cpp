#include "rpl/sim/compile.hpp"
#include "rpl/sim/error.hpp"

#include <set>

namespace rpl::sim {

using namespace rpl::lang;

const char* to_string(SimErrorKind k)
{
    switch (k) {
    case SimErrorKind::Deadlock: return "Deadlock";
    case SimErrorKind::UnsatisfiableHold: return "UnsatisfiableHold";
    case SimErrorKind::Runtime: return "RuntimeError";
    case SimErrorKind::Timeout: return "Timeout";
    case SimErrorKind::Program: return "ProgramError";
    }
    return "?";
}

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

class MethodCompiler {
public:
    MethodCompiler(MethodCode& out, const std::vector<std::string>& fields, const std::set<std::string>& categories)
        : out_(out), fields_(fields), categories_(categories)
    {
        scopes_.emplace_back();
    }

    int declare(const std::string& name)
    {
        int slot = out_.num_locals++;
        scopes_.back()[name] = slot;
        return slot;
    }

    VarRef resolve(const std::string& name, int line) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end())
                return {VarRef::Where::Local, found->second, {}};
        }
        for (std::size_t i = 0; i < fields_.size(); ++i)
            if (fields_[i] == name)
                return {VarRef::Where::Field, static_cast<int>(i), {}};
        if (categories_.count(name))
            return {VarRef::Where::Category, -1, name};
        throw SimulationError(SimErrorKind::Program, "line " + std::to_string(line) + ": unresolved name '" + name + "'",
                              line);
    }

    void expr(const Expr* e)
    {
        if (!e)
            return;
        std::visit(overloaded{
                       [&](const expr::Var& v) { out_.vars[e] = resolve(v.name, e->span.line); },
                       [&](const expr::Param& p) {
                           throw SimulationError(SimErrorKind::Program,
                                                 "line " + std::to_string(e->span.line) + ": placeholder $" + p.name +
                                                     " was not substituted",
                                                 e->span.line);
                       },
                       [&](const expr::Unary& u) { expr(u.operand.get()); },
                       [&](const expr::Binary& b) {
                           expr(b.lhs.get());
                           expr(b.rhs.get());
                       },
                       [&](const expr::Call& c) {
                           for (const auto& a : c.args)
                               expr(a.get());
                       },
                       [&](const expr::ListLit& l) {
                           for (const auto& a : l.items)
                               expr(a.get());
                       },
                       [&](const expr::SetLit& l) {
                           for (const auto& a : l.items)
                               expr(a.get());
                       },
                       [](const auto&) {},
                   },
                   e->node);
    }

    VarRef target(const Target& t, int line)
    {
        if (t.decl_type)
            return {VarRef::Where::Local, declare(t.name), {}};
        return resolve(t.name, line);
    }

    void block(const Block& b)
    {
        scopes_.emplace_back();
        for (const auto& s : b.stmts)
            stmt(s);
        scopes_.pop_back();
    }

    void stmt(const Stmt& s)
    {
        const int line = s.span.line;
        auto emit = [&](Op op) -> Instr& {
            out_.code.push_back(Instr{op, &s, nullptr, {}, {}, 0, line});
            return out_.code.back();
        };
        std::visit(overloaded{
                       [&](const stmt::VarDecl& d) {
                           expr(d.init.get());
                           int slot = declare(d.name);
                           Instr& i = emit(Op::Decl);
                           i.expr = d.init.get();
                           i.target = {VarRef::Where::Local, slot, {}};
                       },
                       [&](const stmt::Assign& a) {
                           expr(a.value.get());
                           Instr& i = emit(Op::Assign);
                           i.expr = a.value.get();
                           i.target = resolve(a.name, line);
                       },
                       [&](const stmt::AsyncCall& c) {
                           for (const auto& a : c.args)
                               expr(a.get());
                           expr(c.deadline.get());
                           std::vector<VarRef> after;
                           for (const auto& f : c.after)
                               after.push_back(resolve(f, line));
                           VarRef t = target(c.target, line);
                           Instr& i = emit(Op::Async);
                           i.target = t;
                           i.futures = std::move(after);
                       },
                       [&](const stmt::Await& a) { emit(Op::Await).futures = {resolve(a.future, line)}; },
                       [&](const stmt::Get& g) {
                           VarRef f = resolve(g.future, line);
                           VarRef t = target(g.target, line);
                           Instr& i = emit(Op::Get);
                           i.futures = {f};
                           i.target = t;
                       },
                       [&](const stmt::If& f) {
                           expr(f.cond.get());
                           std::size_t branch = out_.code.size();
                           emit(Op::JumpIfFalse).expr = f.cond.get();
                           block(f.then_block);
                           if (f.else_block) {
                               std::size_t skip = out_.code.size();
                               emit(Op::Jump);
                               out_.code[branch].jump = out_.code.size();
                               block(*f.else_block);
                               out_.code[skip].jump = out_.code.size();
                           } else {
                               out_.code[branch].jump = out_.code.size();
                           }
                       },
                       [&](const stmt::While& w) {
                           expr(w.cond.get());
                           std::size_t head = out_.code.size();
                           emit(Op::JumpIfFalse).expr = w.cond.get();
                           block(w.body);
                           emit(Op::Jump).jump = head;
                           out_.code[head].jump = out_.code.size();
                       },
                       [&](const stmt::Cost& c) {
                           expr(c.duration.get());
                           emit(Op::Cost).expr = c.duration.get();
                       },
                       [&](const stmt::Hold& h) {
                           expr(h.requests.get());
                           VarRef t = target(h.target, line);
                           Instr& i = emit(Op::Hold);
                           i.expr = h.requests.get();
                           i.target = t;
                       },
                       [&](const stmt::Release& r) {
                           expr(r.value.get());
                           emit(Op::Release).expr = r.value.get();
                       },
                       [&](const stmt::Return& r) {
                           expr(r.value.get());
                           emit(Op::Return).expr = r.value.get();
                       },
                       [&](const stmt::New& n) { emit(Op::New).target = target(n.target, line); },
                   },
                   s.node);
    }

private:
    MethodCode& out_;
    const std::vector<std::string>& fields_;
    const std::set<std::string>& categories_;
    std::vector<std::map<std::string, int>> scopes_;
};

} // namespace

std::shared_ptr<const CompiledProgram> compile(const Program& program)
{
    auto out = std::make_shared<CompiledProgram>();
    out->program = &program;

    std::set<std::string> categories;
    for (const auto& g : program.resources)
        for (const auto& d : g.descriptors)
            categories.insert(d.category);

    for (const auto& c : program.classes) {
        ClassCode cc;
        cc.decl = &c;
        std::vector<std::string> fields;
        for (const auto& f : c.fields) {
            fields.push_back(f.name);
            cc.field_inits.push_back(f.init.get());
        }
        cc.init.owner = c.name;
        cc.init.name = "<init>";
        MethodCompiler init(cc.init, fields, categories);
        for (const auto& f : c.fields)
            init.expr(f.init.get());

        for (const auto& m : c.methods) {
            MethodCode code;
            code.owner = c.name;
            code.name = m.name;
            MethodCompiler mc(code, fields, categories);
            for (const auto& p : m.params)
                code.param_slots.push_back(mc.declare(p.name));
            mc.block(m.body);
            cc.methods.emplace(m.name, std::move(code));
        }
        out->class_index.emplace(c.name, static_cast<int>(out->classes.size()));
        out->classes.push_back(std::move(cc));
    }

    out->main.owner = "main";
    out->main.name = "main";
    static const std::vector<std::string> no_fields;
    MethodCompiler mc(out->main, no_fields, categories);
    mc.block(program.main);
    return out;
}

} // namespace rpl::sim
