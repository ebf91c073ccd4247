#include "rpl/peak/task_dag.hpp"
#include "rpl/lang/rational.hpp"
#include "rpl/lang/resources.hpp"
#include "rpl/lang/error.hpp"

#include <algorithm>

namespace rpl::peak {

using namespace rpl::lang;

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

struct AbsVal {
    enum class K { Unknown, Null, Const, Bool, Obj, Fut, List, Set, Pair, HeldIds, Category, MinEff };
    K k = K::Unknown;
    Rational num = 0;
    bool flag = false;
    int id = -1;  // class index, node id or hold id
    std::string name;
    std::vector<AbsVal> items;

    static AbsVal unknown() { return {}; }
    static AbsVal constant(Rational r) { AbsVal v; v.k = K::Const; v.num = r; return v; }
    static AbsVal boolean(bool b) { AbsVal v; v.k = K::Bool; v.flag = b; return v; }
    static AbsVal of(K k, int id) { AbsVal v; v.k = k; v.id = id; return v; }
    static AbsVal seq(K k, std::vector<AbsVal> items) { AbsVal v; v.k = k; v.items = std::move(items); return v; }

    bool operator==(const AbsVal& o) const
    {
        return k == o.k && num == o.num && flag == o.flag && id == o.id && name == o.name && items == o.items;
    }
};

using Scope = std::map<std::string, AbsVal, std::less<>>;

struct State {
    std::vector<Scope> scopes;
    std::set<int> before;                            // nodes ended before this point
    std::map<int, std::map<std::string, int>> open;  // hold id -> units per category
    std::vector<std::pair<int, int>> path;
    bool returned = false;
};

std::set<int> intersect(const std::set<int>& a, const std::set<int>& b)
{
    std::set<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

bool has_effects(const Block& b)
{
    for (const auto& s : b.stmts) {
        bool hit = std::visit(overloaded{
                                  [](const stmt::AsyncCall&) { return true; },
                                  [](const stmt::Hold&) { return true; },
                                  [](const stmt::If& f) {
                                      return has_effects(f.then_block) || (f.else_block && has_effects(*f.else_block));
                                  },
                                  [](const stmt::While& w) { return has_effects(w.body); },
                                  [](const auto&) { return false; },
                              },
                              s.node);
        if (hit)
            return true;
    }
    return false;
}

void assigned_names(const Block& b, std::set<std::string>& out)
{
    for (const auto& s : b.stmts)
        std::visit(overloaded{
                       [&](const stmt::Assign& a) { out.insert(a.name); },
                       [&](const stmt::Get& g) { out.insert(g.target.name); },
                       [&](const stmt::New& n) { out.insert(n.target.name); },
                       [&](const stmt::If& f) {
                           assigned_names(f.then_block, out);
                           if (f.else_block)
                               assigned_names(*f.else_block, out);
                       },
                       [&](const stmt::While& w) { assigned_names(w.body, out); },
                       [](const auto&) {},
                   },
                   s.node);
}

class DagBuilder {
public:
    DagBuilder(const Program& p, std::size_t loop_cap) : p_(p), loop_cap_(loop_cap)
    {
        for (const auto& g : p.resources)
            categories_.insert(g.category());
        for (const auto& c : p.classes)
            class_fields_.push_back(field_values(c));
    }

    TaskDag run()
    {
        DagNode main;
        main.id = 0;
        main.label = "main";
        dag_.nodes.push_back(main);
        State s;
        s.scopes.emplace_back();
        Ctx ctx{0, -1};
        exec_block(p_.main, s, ctx);
        finish(0, s);
        return std::move(dag_);
    }

private:
    struct Ctx {
        int node;
        int class_index;
    };

    const Program& p_;
    std::size_t loop_cap_;
    std::set<std::string> categories_;
    std::vector<Scope> class_fields_;
    TaskDag dag_;
    std::vector<std::string> call_stack_;
    std::vector<bool> ended_;
    int branch_counter_ = 0;
    int hold_counter_ = 0;

    [[noreturn]] static void fail(AnalysisErrorKind kind, int line, const std::string& msg)
    {
        throw AnalysisError(kind, "line " + std::to_string(line) + ": " + msg, line);
    }

    // Fields never reassigned keep their initial value; every other field is unknown.
    Scope field_values(const ClassDecl& c)
    {
        std::set<std::string> assigned;
        for (const auto& m : c.methods)
            assigned_names(m.body, assigned);
        Scope fields;
        State s;
        s.scopes.emplace_back();
        for (const auto& f : c.fields) {
            AbsVal v = AbsVal::unknown();
            if (!assigned.count(f.name) && f.init)
                v = eval(*f.init, s, fields);
            fields[f.name] = v;
        }
        return fields;
    }

    const Scope& fields_of(const Ctx& ctx) const
    {
        static const Scope none;
        return ctx.class_index < 0 ? none : class_fields_[static_cast<std::size_t>(ctx.class_index)];
    }

    AbsVal* lookup(State& s, const std::string& name)
    {
        for (auto it = s.scopes.rbegin(); it != s.scopes.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end())
                return &f->second;
        }
        return nullptr;
    }

    AbsVal eval(const Expr& e, State& s, const Scope& fields)
    {
        using K = AbsVal::K;
        const int line = e.span.line;
        return std::visit(
            overloaded{
                [&](const expr::IntLit& n) { return AbsVal::constant(n.value); },
                [&](const expr::BoolLit& b) { return AbsVal::boolean(b.value); },
                [&](const expr::Nil&) { return AbsVal::seq(K::List, {}); },
                [&](const expr::Param& p) -> AbsVal {
                    fail(AnalysisErrorKind::Unsupported, line, "placeholder $" + p.name + " was not substituted");
                },
                [&](const expr::Var& v) -> AbsVal {
                    if (AbsVal* local = lookup(s, v.name))
                        return *local;
                    if (auto f = fields.find(v.name); f != fields.end())
                        return f->second;
                    if (categories_.count(v.name)) {
                        AbsVal c;
                        c.k = K::Category;
                        c.name = v.name;
                        return c;
                    }
                    return AbsVal::unknown();
                },
                [&](const expr::ListLit& l) {
                    std::vector<AbsVal> items;
                    for (const auto& i : l.items)
                        items.push_back(eval(*i, s, fields));
                    return AbsVal::seq(K::List, std::move(items));
                },
                [&](const expr::SetLit& l) {
                    std::vector<AbsVal> items;
                    for (const auto& i : l.items)
                        items.push_back(eval(*i, s, fields));
                    return AbsVal::seq(K::Set, std::move(items));
                },
                [&](const expr::Unary& u) {
                    AbsVal v = eval(*u.operand, s, fields);
                    if (u.op == UnaryOp::Neg && v.k == K::Const)
                        return AbsVal::constant(-v.num);
                    if (u.op == UnaryOp::Not && v.k == K::Bool)
                        return AbsVal::boolean(!v.flag);
                    return AbsVal::unknown();
                },
                [&](const expr::Binary& b) { return binary(b, s, fields); },
                [&](const expr::Call& c) { return call(c, s, fields); },
            },
            e.node);
    }

    AbsVal binary(const expr::Binary& b, State& s, const Scope& fields)
    {
        using K = AbsVal::K;
        AbsVal l = eval(*b.lhs, s, fields);
        if (b.op == BinaryOp::And && l.k == K::Bool && !l.flag)
            return l;
        if (b.op == BinaryOp::Or && l.k == K::Bool && l.flag)
            return l;
        AbsVal r = eval(*b.rhs, s, fields);
        if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
            if (l.k == K::Bool && r.k == K::Bool)
                return r;
            return AbsVal::unknown();
        }
        bool scalar = (l.k == K::Const && r.k == K::Const) || (l.k == K::Bool && r.k == K::Bool);
        if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
            if (!scalar)
                return AbsVal::unknown();
            return AbsVal::boolean((l == r) == (b.op == BinaryOp::Eq));
        }
        if (l.k != K::Const || r.k != K::Const)
            return AbsVal::unknown();
        switch (b.op) {
        case BinaryOp::Add: return AbsVal::constant(l.num + r.num);
        case BinaryOp::Sub: return AbsVal::constant(l.num - r.num);
        case BinaryOp::Mul: return AbsVal::constant(l.num * r.num);
        case BinaryOp::Div:
            if (r.num.numerator() == 0)
                return AbsVal::unknown();
            return AbsVal::constant(l.num / r.num);
        case BinaryOp::Lt: return AbsVal::boolean(l.num < r.num);
        case BinaryOp::Le: return AbsVal::boolean(l.num <= r.num);
        case BinaryOp::Gt: return AbsVal::boolean(l.num > r.num);
        case BinaryOp::Ge: return AbsVal::boolean(l.num >= r.num);
        default: return AbsVal::unknown();
        }
    }

    AbsVal call(const expr::Call& c, State& s, const Scope& fields)
    {
        using K = AbsVal::K;
        std::vector<AbsVal> a;
        for (const auto& arg : c.args)
            a.push_back(eval(*arg, s, fields));
        switch (c.fn) {
        case Builtin::Truncate:
            return a[0].k == K::Const ? AbsVal::constant(truncate(a[0].num)) : AbsVal::unknown();
        case Builtin::Random: return AbsVal::unknown();
        case Builtin::Fst:
        case Builtin::Snd:
            return a[0].k == K::Pair ? a[0].items[c.fn == Builtin::Fst ? 0 : 1] : AbsVal::unknown();
        case Builtin::Pair: return AbsVal::seq(K::Pair, {a[0], a[1]});
        case Builtin::AppendRight:
            if (a[0].k != K::List)
                return AbsVal::unknown();
            a[0].items.push_back(a[1]);
            return a[0];
        case Builtin::Head:
            return a[0].k == K::List && !a[0].items.empty() ? a[0].items.front() : AbsVal::unknown();
        case Builtin::Tail:
            if (a[0].k != K::List || a[0].items.empty())
                return AbsVal::unknown();
            a[0].items.erase(a[0].items.begin());
            return a[0];
        case Builtin::IsEmpty: return a[0].k == K::List ? AbsVal::boolean(a[0].items.empty()) : AbsVal::unknown();
        case Builtin::ResEfficiency: {
            AbsVal v = AbsVal::of(K::MinEff, -1);
            if (a[0].k == K::Const)
                v.num = a[0].num;
            return v;
        }
        }
        return AbsVal::unknown();
    }

    void assign(State& s, const std::string& name, AbsVal v)
    {
        if (AbsVal* slot = lookup(s, name))
            *slot = std::move(v);
        // Fields are summarised per class; writes to them are already accounted for.
    }

    void bind(State& s, const Target& t, AbsVal v)
    {
        if (t.decl_type)
            s.scopes.back()[t.name] = std::move(v);
        else
            assign(s, t.name, std::move(v));
    }

    void join(State& s, const AbsVal& fut)
    {
        if (fut.k != AbsVal::K::Fut || !ended_[static_cast<std::size_t>(fut.id)])
            return;
        const DagNode& n = dag_.nodes[static_cast<std::size_t>(fut.id)];
        s.before.insert(n.id);
        s.before.insert(n.ends_before_end.begin(), n.ends_before_end.end());
    }

    void note_holds(const State& s, int node)
    {
        std::map<std::string, int> total;
        for (const auto& [id, units] : s.open)
            for (const auto& [cat, n] : units)
                total[cat] += n;
        auto& profile = dag_.nodes[static_cast<std::size_t>(node)].hold_profile;
        for (const auto& [cat, n] : total)
            profile[cat] = std::max(profile[cat], n);
    }

    void finish(int node, const State& s)
    {
        DagNode& n = dag_.nodes[static_cast<std::size_t>(node)];
        if (ended_.size() <= static_cast<std::size_t>(node))
            ended_.resize(static_cast<std::size_t>(node) + 1, false);
        if (ended_[static_cast<std::size_t>(node)])
            n.ends_before_end = intersect(n.ends_before_end, s.before);
        else
            n.ends_before_end = s.before;
        ended_[static_cast<std::size_t>(node)] = true;
    }

    void merge_into(State& into, const State& other)
    {
        if (other.returned)
            return;
        if (into.returned) {
            into = other;
            return;
        }
        for (std::size_t i = 0; i < into.scopes.size() && i < other.scopes.size(); ++i)
            for (auto& [name, v] : into.scopes[i]) {
                auto o = other.scopes[i].find(name);
                if (o == other.scopes[i].end() || !(o->second == v))
                    v = AbsVal::unknown();
            }
        into.before = intersect(into.before, other.before);
        for (const auto& [id, units] : other.open)
            into.open.emplace(id, units);
    }

    void exec_block(const Block& b, State& s, const Ctx& ctx)
    {
        s.scopes.emplace_back();
        for (const auto& st : b.stmts) {
            if (s.returned)
                break;
            exec(st, s, ctx);
        }
        s.scopes.pop_back();
    }

    void exec(const Stmt& st, State& s, const Ctx& ctx)
    {
        using K = AbsVal::K;
        const int line = st.span.line;
        const Scope& fields = fields_of(ctx);
        std::visit(
            overloaded{
                [&](const stmt::VarDecl& d) {
                    AbsVal v = AbsVal::unknown();
                    if (d.init)
                        v = eval(*d.init, s, fields);
                    else if (d.type.name == "Int" || d.type.name == "Rat")
                        v = AbsVal::constant(0);
                    else if (d.type.name == "List")
                        v = AbsVal::seq(K::List, {});
                    s.scopes.back()[d.name] = std::move(v);
                },
                [&](const stmt::Assign& a) { assign(s, a.name, eval(*a.value, s, fields)); },
                [&](const stmt::AsyncCall& c) { spawn(c, line, s, ctx); },
                [&](const stmt::Await& a) {
                    if (AbsVal* f = lookup(s, a.future))
                        join(s, *f);
                },
                [&](const stmt::Get& g) {
                    if (AbsVal* f = lookup(s, g.future))
                        join(s, *f);
                    bind(s, g.target, AbsVal::unknown());
                },
                [&](const stmt::If& f) {
                    AbsVal c = eval(*f.cond, s, fields);
                    if (c.k == K::Bool) {
                        if (c.flag)
                            exec_block(f.then_block, s, ctx);
                        else if (f.else_block)
                            exec_block(*f.else_block, s, ctx);
                        return;
                    }
                    int instance = ++branch_counter_;
                    State other = s;
                    s.path.emplace_back(instance, 0);
                    other.path.emplace_back(instance, 1);
                    exec_block(f.then_block, s, ctx);
                    if (f.else_block)
                        exec_block(*f.else_block, other, ctx);
                    s.path.pop_back();
                    other.path.pop_back();
                    merge_into(s, other);
                },
                [&](const stmt::While& w) { loop(w, line, s, ctx); },
                [&](const stmt::Cost&) {},
                [&](const stmt::Hold& h) {
                    AbsVal req = eval(*h.requests, s, fields);
                    if (req.k != K::List)
                        fail(AnalysisErrorKind::Unsupported, line, "hold request is not a statically known list");
                    std::map<std::string, int> units;
                    for (const auto& unit : req.items) {
                        auto cat = std::find_if(unit.items.begin(), unit.items.end(),
                                                [](const AbsVal& q) { return q.k == K::Category; });
                        if (unit.k != K::Set || cat == unit.items.end())
                            fail(AnalysisErrorKind::Unsupported, line, "hold unit without a known category");
                        ++units[cat->name];
                    }
                    int id = ++hold_counter_;
                    s.open[id] = units;
                    note_holds(s, ctx.node);
                    bind(s, h.target, AbsVal::seq(K::Pair, {AbsVal::of(K::HeldIds, id), AbsVal::unknown()}));
                },
                [&](const stmt::Release& r) {
                    AbsVal v = eval(*r.value, s, fields);
                    if (v.k == K::Pair && v.items[0].k == K::HeldIds)
                        s.open.erase(v.items[0].id);
                },
                [&](const stmt::Return& r) {
                    eval(*r.value, s, fields);
                    finish(ctx.node, s);
                    s.returned = true;
                },
                [&](const stmt::New& n) {
                    auto it = std::find_if(p_.classes.begin(), p_.classes.end(),
                                           [&](const ClassDecl& c) { return c.name == n.class_name; });
                    bind(s, n.target, AbsVal::of(K::Obj, static_cast<int>(it - p_.classes.begin())));
                },
            },
            st.node);
    }

    void loop(const stmt::While& w, int line, State& s, const Ctx& ctx)
    {
        for (std::size_t iter = 0;; ++iter) {
            AbsVal c = eval(*w.cond, s, fields_of(ctx));
            if (c.k == AbsVal::K::Bool) {
                if (!c.flag || s.returned)
                    return;
                if (iter >= loop_cap_)
                    fail(AnalysisErrorKind::UnboundedLoop, line,
                         "loop exceeds " + std::to_string(loop_cap_) + " unrolled iterations");
                exec_block(w.body, s, ctx);
                continue;
            }
            if (has_effects(w.body))
                fail(AnalysisErrorKind::UnboundedLoop, line,
                     "cannot bound the iterations of a loop that spawns tasks or holds resources");
            std::set<std::string> names;
            assigned_names(w.body, names);
            for (const auto& n : names)
                assign(s, n, AbsVal::unknown());
            return;
        }
    }

    void spawn(const stmt::AsyncCall& c, int line, State& s, const Ctx& ctx)
    {
        using K = AbsVal::K;
        const Scope& fields = fields_of(ctx);
        std::vector<AbsVal> args;
        for (const auto& a : c.args)
            args.push_back(eval(*a, s, fields));
        eval(*c.deadline, s, fields);
        if (args[0].k != K::Obj)
            fail(AnalysisErrorKind::Unsupported, line, "cannot determine the callee object of !" + c.method);
        const ClassDecl& cls = p_.classes[static_cast<std::size_t>(args[0].id)];
        const MethodDecl* m = cls.find(c.method);
        if (!m)
            fail(AnalysisErrorKind::Unsupported, line, "class " + cls.name + " has no method " + c.method);
        std::string label = cls.name + "." + m->name;
        if (std::find(call_stack_.begin(), call_stack_.end(), label) != call_stack_.end())
            fail(AnalysisErrorKind::UnsupportedRecursion, line, "recursive invocation of " + label);
        if (dag_.nodes.size() >= 100'000)
            fail(AnalysisErrorKind::UnboundedLoop, line, "more than 100000 task instances");

        DagNode node;
        node.id = static_cast<int>(dag_.nodes.size());
        node.label = label;
        node.line = line;
        node.path = s.path;
        node.ends_before_start = s.before;
        for (const auto& name : c.after)
            if (AbsVal* f = lookup(s, name); f && f->k == K::Fut && ended_[static_cast<std::size_t>(f->id)]) {
                const DagNode& dep = dag_.nodes[static_cast<std::size_t>(f->id)];
                node.ends_before_start.insert(dep.id);
                node.ends_before_start.insert(dep.ends_before_end.begin(), dep.ends_before_end.end());
            }
        const int id = node.id;
        State child;
        child.before = node.ends_before_start;
        child.path = s.path;
        child.scopes.emplace_back();
        for (std::size_t i = 0; i < m->params.size(); ++i)
            child.scopes.back()[m->params[i].name] = args[i + 1];
        dag_.nodes.push_back(std::move(node));
        ended_.resize(dag_.nodes.size(), false);

        call_stack_.push_back(label);
        Ctx child_ctx{id, args[0].id};
        exec_block(m->body, child, child_ctx);
        if (!child.returned)
            finish(id, child);
        call_stack_.pop_back();

        bind(s, c.target, AbsVal::of(K::Fut, id));
    }
};

} // namespace

bool TaskDag::ordered(int a, int b) const
{
    return nodes[static_cast<std::size_t>(b)].ends_before_start.count(a) ||
           nodes[static_cast<std::size_t>(a)].ends_before_start.count(b);
}

bool TaskDag::exclusive(int a, int b) const
{
    for (const auto& [inst, arm] : nodes[static_cast<std::size_t>(a)].path)
        for (const auto& [other_inst, other_arm] : nodes[static_cast<std::size_t>(b)].path)
            if (inst == other_inst && arm != other_arm)
                return true;
    return false;
}

TaskDag build_task_dag(const Program& program, std::size_t loop_cap)
{
    return DagBuilder(program, loop_cap).run();
}

namespace {

struct CliqueSearch {
    const std::vector<int>& w;
    const std::vector<std::vector<char>>& adj;
    int best = 0;

    // Greedy colouring: each colour class is an independent set, so a clique
    // takes at most its heaviest member from each class.
    int colour_bound(const std::vector<int>& p) const
    {
        std::vector<std::vector<int>> classes;
        for (int v : p) {
            auto fits = [&](const std::vector<int>& cls) {
                return std::none_of(cls.begin(), cls.end(), [&](int u) { return adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]; });
            };
            auto cls = std::find_if(classes.begin(), classes.end(), fits);
            if (cls == classes.end())
                classes.push_back({v});
            else
                cls->push_back(v);
        }
        int bound = 0;
        for (const auto& cls : classes) {
            int m = 0;
            for (int v : cls)
                m = std::max(m, w[static_cast<std::size_t>(v)]);
            bound += m;
        }
        return bound;
    }

    void expand(int current, std::vector<int> p)
    {
        best = std::max(best, current);
        while (!p.empty()) {
            if (current + colour_bound(p) <= best)
                return;
            int v = p.back();
            p.pop_back();
            std::vector<int> q;
            for (int u : p)
                if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)])
                    q.push_back(u);
            expand(current + w[static_cast<std::size_t>(v)], std::move(q));
        }
    }
};

} // namespace

int max_weight_clique(const std::vector<int>& weights, const std::function<bool(int, int)>& adjacent)
{
    const int n = static_cast<int>(weights.size());
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = adjacent(a, b) ? 1 : 0;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return weights[static_cast<std::size_t>(a)] < weights[static_cast<std::size_t>(b)]; });
    CliqueSearch search{weights, adj};
    search.expand(0, order);
    return search.best;
}

std::map<std::string, int> static_peak_bound(const Program& program, const Profile& profile)
{
    TaskDag dag = build_task_dag(program);
    ResourcePool pool = apply_availability(program.pool(), profile.availability_pct);
    std::map<std::string, int> out;
    for (const auto& category : pool.categories()) {
        std::vector<int> holders, weights;
        for (const auto& n : dag.nodes)
            if (auto it = n.hold_profile.find(category); it != n.hold_profile.end() && it->second > 0) {
                holders.push_back(n.id);
                weights.push_back(it->second);
            }
        int bound = max_weight_clique(weights, [&](int a, int b) {
            return dag.may_overlap(holders[static_cast<std::size_t>(a)], holders[static_cast<std::size_t>(b)]);
        });
        out[category] = std::min(bound, pool.available_count(category));
    }
    return out;
}

} // namespace rpl::peak
