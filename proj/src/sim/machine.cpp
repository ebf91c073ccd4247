#include "rpl/sim/machine.hpp"
#include "rpl/sim/error.hpp"
#include "rpl/sim/matching.hpp"

#include <algorithm>
#include <limits>

namespace rpl::sim {

using namespace rpl::lang;
using lang::to_string;

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void runtime_error(int line, const std::string& msg)
{
    throw SimulationError(SimErrorKind::Runtime, "line " + std::to_string(line) + ": " + msg, line);
}

const Rational& rational(const Value& v, int line, const char* what)
{
    if (const auto* r = v.get_if<Rational>())
        return *r;
    runtime_error(line, std::string(what) + " expects a number, got " + kind_name(v));
}

std::int64_t integer(const Value& v, int line, const char* what)
{
    const Rational& r = rational(v, line, what);
    if (!is_integer(r))
        runtime_error(line, std::string(what) + " expects an integer, got " + to_string(r));
    return r.numerator();
}

bool boolean(const Value& v, int line, const char* what)
{
    if (const auto* b = v.get_if<bool>())
        return *b;
    runtime_error(line, std::string(what) + " expects a Bool, got " + kind_name(v));
}

const ValueList& list(const Value& v, int line, const char* what)
{
    if (!v.is<ListValue>())
        runtime_error(line, std::string(what) + " expects a List, got " + kind_name(v));
    return list_items(v);
}

Value default_value(const Type& t)
{
    if (t.name == "Int" || t.name == "Rat")
        return Value(0);
    if (t.name == "Bool")
        return Value(false);
    if (t.name == "List")
        return make_list({});
    if (t.name == "Set")
        return make_set({});
    return Value();
}

} // namespace

/// Expression evaluator bound to one task's view of the world.
struct Machine::Eval {
    const MethodCode& code;
    const std::vector<Value>& locals;
    const std::vector<Value>& fields;
    const std::vector<std::int64_t>& draws;
    std::size_t next_draw = 0;

    Value operator()(const Expr& e)
    {
        const int line = e.span.line;
        return std::visit(
            overloaded{
                [&](const expr::IntLit& n) -> Value { return Value(n.value); },
                [&](const expr::BoolLit& b) -> Value { return Value(b.value); },
                [&](const expr::Nil&) -> Value { return make_list({}); },
                [&](const expr::Param& p) -> Value { runtime_error(line, "unsubstituted placeholder $" + p.name); },
                [&](const expr::Var&) -> Value {
                    const VarRef& ref = code.vars.at(&e);
                    switch (ref.where) {
                    case VarRef::Where::Local: return locals[static_cast<std::size_t>(ref.index)];
                    case VarRef::Where::Field: return fields[static_cast<std::size_t>(ref.index)];
                    case VarRef::Where::Category: return Value(CategorySymbol{ref.category});
                    }
                    return Value();
                },
                [&](const expr::ListLit& l) -> Value {
                    ValueList items;
                    for (const auto& i : l.items)
                        items.push_back((*this)(*i));
                    return make_list(std::move(items));
                },
                [&](const expr::SetLit& l) -> Value {
                    ValueList items;
                    for (const auto& i : l.items)
                        items.push_back((*this)(*i));
                    return make_set(std::move(items));
                },
                [&](const expr::Unary& u) -> Value {
                    Value v = (*this)(*u.operand);
                    if (u.op == UnaryOp::Neg)
                        return Value(-rational(v, line, "-"));
                    return Value(!boolean(v, line, "!"));
                },
                [&](const expr::Binary& b) -> Value { return binary(b, line); },
                [&](const expr::Call& c) -> Value { return call(c, line); },
            },
            e.node);
    }

    Value binary(const expr::Binary& b, int line)
    {
        if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
            bool l = boolean((*this)(*b.lhs), line, to_string(b.op));
            if (b.op == BinaryOp::And ? !l : l)
                return Value(l);
            return Value(boolean((*this)(*b.rhs), line, to_string(b.op)));
        }
        Value l = (*this)(*b.lhs);
        Value r = (*this)(*b.rhs);
        if (b.op == BinaryOp::Eq)
            return Value(l == r);
        if (b.op == BinaryOp::Ne)
            return Value(!(l == r));
        const char* op = to_string(b.op);
        const Rational& x = rational(l, line, op);
        const Rational& y = rational(r, line, op);
        switch (b.op) {
        case BinaryOp::Add: return Value(x + y);
        case BinaryOp::Sub: return Value(x - y);
        case BinaryOp::Mul: return Value(x * y);
        case BinaryOp::Div:
            if (y.numerator() == 0)
                runtime_error(line, "division by zero");
            return Value(x / y);
        case BinaryOp::Lt: return Value(x < y);
        case BinaryOp::Le: return Value(x <= y);
        case BinaryOp::Gt: return Value(x > y);
        case BinaryOp::Ge: return Value(x >= y);
        default: break;
        }
        runtime_error(line, std::string("unsupported operator ") + op);
    }

    Value call(const expr::Call& c, int line)
    {
        std::vector<Value> args;
        for (const auto& a : c.args)
            args.push_back((*this)(*a));
        const char* fn = to_string(c.fn);
        switch (c.fn) {
        case Builtin::Truncate: return Value(truncate(rational(args[0], line, fn)));
        case Builtin::Random: {
            std::int64_t n = integer(args[0], line, fn);
            if (n < 0)
                runtime_error(line, "random expects a non-negative bound, got " + std::to_string(n));
            if (next_draw >= draws.size())
                throw NeedRandom{n};
            std::int64_t outcome = draws[next_draw++];
            return Value(std::min(outcome, n));
        }
        case Builtin::Fst:
        case Builtin::Snd:
            if (!args[0].is<PairValue>())
                runtime_error(line, std::string(fn) + " expects a Pair, got " + kind_name(args[0]));
            return pair_items(args[0])[c.fn == Builtin::Fst ? 0 : 1];
        case Builtin::Pair: return make_pair(args[0], args[1]);
        case Builtin::AppendRight: {
            ValueList items = list(args[0], line, fn);
            items.push_back(args[1]);
            return make_list(std::move(items));
        }
        case Builtin::Head: {
            const ValueList& items = list(args[0], line, fn);
            if (items.empty())
                runtime_error(line, "head of Nil");
            return items.front();
        }
        case Builtin::Tail: {
            const ValueList& items = list(args[0], line, fn);
            if (items.empty())
                runtime_error(line, "tail of Nil");
            return make_list(ValueList(items.begin() + 1, items.end()));
        }
        case Builtin::IsEmpty: return Value(list(args[0], line, fn).empty());
        case Builtin::ResEfficiency: return Value(Value::Variant(MinEfficiency{integer(args[0], line, fn)}));
        }
        runtime_error(line, std::string("unknown builtin ") + fn);
    }
};

Machine::Machine(std::shared_ptr<const CompiledProgram> program, ResourcePool pool, MachineOptions options)
    : program_(std::move(program)), pool_(std::move(pool)), options_(options)
{
    categories_ = pool_.categories();
    for (const auto& r : pool_.resources)
        category_of_.push_back(static_cast<int>(
            std::find(categories_.begin(), categories_.end(), r.category) - categories_.begin()));
    holder_.assign(pool_.resources.size(), -1);
    held_.assign(categories_.size(), 0);
    peak_ = held_;

    create_actor(-1);
    Task main;
    main.id = 0;
    main.actor = 0;
    main.code = &program_->main;
    main.locals.resize(static_cast<std::size_t>(program_->main.num_locals));
    main.state = TaskState::Ready;
    main.enable_time = 0;
    main.site = {"main", 0};
    futures_.emplace_back();
    tasks_.push_back(std::move(main));
    actors_[0].ready.push_back(0);
}

std::uint32_t Machine::create_actor(int class_index)
{
    Actor a;
    a.id = static_cast<std::uint32_t>(actors_.size());
    a.class_index = class_index;
    actors_.push_back(std::move(a));
    return actors_.back().id;
}

RunStatus Machine::run()
{
    while (true) {
        if (finished_)
            return RunStatus::Finished;
        if (pending_)
            return RunStatus::NeedChoice;
        if (resume_) {
            std::uint32_t id = *resume_;
            resume_.reset();
            start(id);
            continue;
        }
        settle();
        collect_candidates();
        if (pending_ || resume_)
            continue;
        if (!advance_clock()) {
            std::size_t hold_blocked = hold_waiters_.size();
            if (hold_blocked > 0)
                deadlock_reason_ = "resource starvation: " + std::to_string(hold_blocked) +
                                   " task(s) blocked on hold with no task working at time " + std::to_string(now_);
            else
                deadlock_reason_ = "unresolvable futures: every remaining task waits on a future that can never "
                                   "be resolved (time " + std::to_string(now_) + ")";
            return RunStatus::Deadlocked;
        }
    }
}

void Machine::choose(std::size_t option)
{
    const Choice c = *pending_;
    pending_.reset();
    if (c.kind == ChoiceKind::Random) {
        auto outcome = static_cast<std::int64_t>(option);
        tasks_[*resume_].draws.push_back(outcome);
        draw_log_.push_back(outcome);
    } else {
        resume_ = candidates_.at(option);
        candidates_.clear();
    }
}

void Machine::enqueue(Task& t)
{
    t.state = TaskState::Ready;
    actors_[t.actor].ready.push_back(t.id);
}

void Machine::settle()
{
    for (auto& t : tasks_) {
        switch (t.state) {
        case TaskState::Pending:
            if (std::all_of(t.after.begin(), t.after.end(), [&](std::uint32_t f) { return futures_[f].has_value(); })) {
                t.enable_time = now_;
                t.deadline = (options_.anchor == DeadlineAnchor::Enable ? now_ : t.issue_time) + t.dl;
                enqueue(t);
            }
            break;
        case TaskState::AwaitBlocked:
            if (futures_[t.waiting_on])
                enqueue(t);
            break;
        case TaskState::GetBlocked:
            if (futures_[t.waiting_on])
                t.state = TaskState::Active;
            break;
        default: break;
        }
    }
}

void Machine::collect_candidates()
{
    candidates_.clear();
    for (const auto& a : actors_) {
        if (a.active) {
            if (tasks_[*a.active].state == TaskState::Active)
                candidates_.push_back(*a.active);
        } else {
            candidates_.insert(candidates_.end(), a.ready.begin(), a.ready.end());
        }
        if (!options_.explore && !candidates_.empty())
            break;
    }
    if (candidates_.empty())
        return;
    if (candidates_.size() == 1 || (!options_.explore && options_.ready_policy == ReadyPolicy::Fifo)) {
        resume_ = candidates_.front();
        candidates_.clear();
        return;
    }
    pending_ = Choice{ChoiceKind::Schedule, candidates_.size()};
}

bool Machine::advance_clock()
{
    Time next = std::numeric_limits<Time>::max();
    for (const auto& t : tasks_)
        if (t.state == TaskState::Working)
            next = std::min(next, t.work_until);
    if (next == std::numeric_limits<Time>::max())
        return false;
    now_ = next;
    for (auto& t : tasks_)
        if (t.state == TaskState::Working && t.work_until == now_)
            t.state = TaskState::Active;
    return true;
}

void Machine::start(std::uint32_t task_id)
{
    Task& t = tasks_[task_id];
    if (t.state == TaskState::Ready) {
        Actor& a = actors_[t.actor];
        a.ready.erase(std::find(a.ready.begin(), a.ready.end(), task_id));
        a.active = task_id;
        t.state = TaskState::Active;
    }
    run_slice(task_id);
}

void Machine::run_slice(std::uint32_t task_id)
{
    std::uint64_t steps = 0;
    bool yield = false;
    try {
        while (!yield) {
            if (++steps > options_.step_limit) {
                const Task& t = tasks_[task_id];
                int line = t.pc < t.code->code.size() ? t.code->code[t.pc].line : 0;
                runtime_error(line, "step limit exceeded in " + t.code->owner + "." + t.code->name +
                                        " without reaching a scheduling point");
            }
            step(task_id, yield);
        }
    } catch (const NeedRandom& r) {
        pending_ = Choice{ChoiceKind::Random, static_cast<std::size_t>(r.bound) + 1};
        resume_ = task_id;
    }
}

const Value& Machine::load(const Task& t, const VarRef& ref) const
{
    if (ref.where == VarRef::Where::Field)
        return actors_[t.actor].fields[static_cast<std::size_t>(ref.index)];
    return t.locals[static_cast<std::size_t>(ref.index)];
}

void Machine::store(Task& t, const VarRef& ref, Value v)
{
    if (ref.where == VarRef::Where::Field)
        actors_[t.actor].fields[static_cast<std::size_t>(ref.index)] = std::move(v);
    else
        t.locals[static_cast<std::size_t>(ref.index)] = std::move(v);
}

std::uint32_t Machine::future_of(const Task& t, const VarRef& ref, int line) const
{
    const Value& v = load(t, ref);
    if (const auto* f = v.get_if<FutureRef>())
        return f->id;
    runtime_error(line, std::string("expected a future, got ") + kind_name(v));
}

void Machine::finish_task(Task& t, Value value)
{
    futures_[t.future] = std::move(value);
    t.state = TaskState::Done;
    actors_[t.actor].active.reset();
    if (t.deadline >= 0 && now_ > t.deadline)
        ++violations_[t.site];
    t.locals.clear();
    t.locals.shrink_to_fit();
}

bool Machine::try_hold(Task& t, const std::vector<ResourceRequest>& request, Value& out)
{
    auto match = match_request(request, pool_, [&](std::size_t r) {
        return pool_.resources[r].available && holder_[r] < 0;
    });
    if (!match)
        return false;
    ValueList ids;
    Rational per_unit = 0;
    for (std::size_t r : *match) {
        holder_[r] = t.id;
        int c = category_of_[r];
        peak_[static_cast<std::size_t>(c)] = std::max(peak_[static_cast<std::size_t>(c)], ++held_[static_cast<std::size_t>(c)]);
        ids.push_back(Value(static_cast<std::int64_t>(pool_.resources[r].id)));
        per_unit += pool_.resources[r].cost_per_unit;
    }
    out = make_pair(make_list(std::move(ids)), Value(per_unit));
    return true;
}

void Machine::retry_holds()
{
    std::deque<std::uint32_t> still_blocked;
    for (std::uint32_t id : hold_waiters_) {
        Task& t = tasks_[id];
        Value pair;
        if (try_hold(t, t.blocked_request, pair)) {
            store(t, t.code->code[t.pc].target, std::move(pair));
            ++t.pc;
            t.blocked_request.clear();
            enqueue(t);
        } else {
            still_blocked.push_back(id);
        }
    }
    hold_waiters_ = std::move(still_blocked);
}

void Machine::step(std::uint32_t task_id, bool& yield)
{
    Task* t = &tasks_[task_id];
    const MethodCode& code = *t->code;
    if (t->pc >= code.code.size()) {
        if (task_id != 0)
            runtime_error(0, code.owner + "." + code.name + " ended without return");
        t->state = TaskState::Done;
        actors_[0].active.reset();
        finished_ = true;
        yield = true;
        return;
    }
    const Instr& in = code.code[t->pc];
    const int line = in.line;
    Eval eval{code, t->locals, actors_[t->actor].fields, t->draws};
    auto commit = [&] { t->draws.clear(); };

    switch (in.op) {
    case Op::Decl: {
        const auto& d = std::get<stmt::VarDecl>(in.stmt->node);
        Value v = in.expr ? eval(*in.expr) : default_value(d.type);
        commit();
        store(*t, in.target, std::move(v));
        ++t->pc;
        break;
    }
    case Op::Assign: {
        Value v = eval(*in.expr);
        commit();
        store(*t, in.target, std::move(v));
        ++t->pc;
        break;
    }
    case Op::JumpIfFalse: {
        bool c = boolean(eval(*in.expr), line, "condition");
        commit();
        t->pc = c ? t->pc + 1 : in.jump;
        break;
    }
    case Op::Jump: t->pc = in.jump; break;
    case Op::Async: {
        const auto& call = std::get<stmt::AsyncCall>(in.stmt->node);
        std::vector<Value> args;
        for (const auto& a : call.args)
            args.push_back(eval(*a));
        std::int64_t dl = integer(eval(*call.deadline), line, "dl");
        commit();
        if (dl < 0)
            runtime_error(line, "negative deadline " + std::to_string(dl));
        const auto* callee = args[0].get_if<ObjectRef>();
        if (!callee)
            runtime_error(line, std::string("callee of !") + call.method + " is " + kind_name(args[0]) +
                                    ", not an object");
        const Actor& target_actor = actors_[callee->id];
        if (target_actor.class_index < 0)
            runtime_error(line, "the main block has no methods");
        const ClassCode& cc = program_->classes[static_cast<std::size_t>(target_actor.class_index)];
        auto m = cc.methods.find(call.method);
        if (m == cc.methods.end())
            runtime_error(line, "class " + cc.decl->name + " has no method " + call.method);
        if (m->second.param_slots.size() + 1 != args.size())
            runtime_error(line, "arity mismatch calling " + call.method);

        Task child;
        child.id = static_cast<std::uint32_t>(tasks_.size());
        child.actor = callee->id;
        child.code = &m->second;
        child.locals.resize(static_cast<std::size_t>(m->second.num_locals));
        for (std::size_t i = 0; i < m->second.param_slots.size(); ++i)
            child.locals[static_cast<std::size_t>(m->second.param_slots[i])] = args[i + 1];
        for (const auto& f : in.futures)
            child.after.push_back(future_of(*t, f, line));
        child.future = static_cast<std::uint32_t>(futures_.size());
        child.state = TaskState::Pending;
        child.issue_time = now_;
        child.dl = dl;
        child.site = {call.method, line};
        futures_.emplace_back();
        Value fut(Value::Variant(FutureRef{child.future}));
        tasks_.push_back(std::move(child));
        t = &tasks_[task_id];
        store(*t, in.target, std::move(fut));
        ++t->pc;
        break;
    }
    case Op::Await: {
        std::uint32_t f = future_of(*t, in.futures[0], line);
        ++t->pc;
        if (!futures_[f]) {
            t->state = TaskState::AwaitBlocked;
            t->waiting_on = f;
            actors_[t->actor].active.reset();
            yield = true;
        }
        break;
    }
    case Op::Get: {
        std::uint32_t f = future_of(*t, in.futures[0], line);
        if (!futures_[f]) {
            t->state = TaskState::GetBlocked;
            t->waiting_on = f;
            yield = true;
            break;
        }
        store(*t, in.target, *futures_[f]);
        ++t->pc;
        break;
    }
    case Op::Cost: {
        std::int64_t d = truncate(rational(eval(*in.expr), line, "cost"));
        commit();
        if (d < 0)
            runtime_error(line, "negative cost " + std::to_string(d));
        ++t->pc;
        total_work_ += d;
        if (d > 0) {
            t->state = TaskState::Working;
            t->work_until = now_ + d;
            yield = true;
        }
        break;
    }
    case Op::Hold: {
        Value req = eval(*in.expr);
        commit();
        std::vector<ResourceRequest> request;
        for (const Value& unit : list(req, line, "hold")) {
            if (!unit.is<SetValue>())
                runtime_error(line, std::string("hold request units must be sets, got ") + kind_name(unit));
            ResourceRequest r;
            int cats = 0, effs = 0;
            for (const Value& q : *unit.as<SetValue>().items) {
                if (const auto* c = q.get_if<CategorySymbol>()) {
                    r.category = c->name;
                    ++cats;
                } else if (const auto* e = q.get_if<MinEfficiency>()) {
                    r.min_efficiency = e->value;
                    ++effs;
                } else {
                    runtime_error(line, "unexpected " + to_string(q) + " in hold request");
                }
            }
            if (cats != 1 || effs != 1)
                runtime_error(line, "each hold unit needs exactly one category and one ResEfficiency");
            request.push_back(std::move(r));
        }
        if (!match_request(request, pool_, [](std::size_t) { return true; }))
            throw SimulationError(SimErrorKind::UnsatisfiableHold,
                                  "line " + std::to_string(line) + ": no resources in the pool can satisfy " +
                                      to_string(req),
                                  line);
        Value pair;
        if (try_hold(*t, request, pair)) {
            store(*t, in.target, std::move(pair));
            ++t->pc;
        } else {
            t->state = TaskState::HoldBlocked;
            t->blocked_request = std::move(request);
            actors_[t->actor].active.reset();
            hold_waiters_.push_back(task_id);
            yield = true;
        }
        break;
    }
    case Op::Release: {
        Value v = eval(*in.expr);
        commit();
        if (!v.is<PairValue>())
            runtime_error(line, std::string("release expects a Pair, got ") + kind_name(v));
        const auto& [ids, amount] = pair_items(v);
        std::int64_t charge = integer(amount, line, "release amount");
        if (charge < 0)
            runtime_error(line, "negative release amount " + std::to_string(charge));
        for (const Value& id : list(ids, line, "release")) {
            std::int64_t rid = integer(id, line, "resource id");
            auto it = std::find_if(pool_.resources.begin(), pool_.resources.end(),
                                   [&](const auto& r) { return r.id == rid; });
            if (it == pool_.resources.end())
                runtime_error(line, "release of unknown resource " + std::to_string(rid));
            auto r = static_cast<std::size_t>(it - pool_.resources.begin());
            if (holder_[r] < 0)
                runtime_error(line, "release of resource " + std::to_string(rid) + " which is not held");
            holder_[r] = -1;
            --held_[static_cast<std::size_t>(category_of_[r])];
        }
        financial_ += charge;
        ++t->pc;
        retry_holds();
        break;
    }
    case Op::Return: {
        Value v = eval(*in.expr);
        commit();
        finish_task(*t, std::move(v));
        yield = true;
        break;
    }
    case Op::New: {
        const auto& n = std::get<stmt::New>(in.stmt->node);
        auto ci = program_->class_index.find(n.class_name);
        if (ci == program_->class_index.end())
            runtime_error(line, "unknown class " + n.class_name);
        const ClassCode& cc = program_->classes[static_cast<std::size_t>(ci->second)];
        std::vector<Value> fields(cc.field_inits.size());
        static const std::vector<Value> no_locals;
        Eval init{cc.init, no_locals, fields, t->draws};
        for (std::size_t i = 0; i < fields.size(); ++i)
            fields[i] = cc.field_inits[i] ? init(*cc.field_inits[i]) : default_value(cc.decl->fields[i].type);
        commit();
        std::uint32_t id = create_actor(ci->second);
        actors_[id].fields = std::move(fields);
        store(*t, in.target, Value(Value::Variant(ObjectRef{id})));
        ++t->pc;
        break;
    }
    }
}

std::vector<int> Machine::held_resources() const
{
    std::vector<int> out;
    for (std::size_t r = 0; r < holder_.size(); ++r)
        if (holder_[r] >= 0)
            out.push_back(pool_.resources[r].id);
    return out;
}

std::string Machine::state_key() const
{
    std::string k;
    k.reserve(512);
    auto num = [&](long long v) {
        k += std::to_string(v);
        k += ',';
    };
    for (const auto& t : tasks_) {
        if (t.state == TaskState::Done)
            continue;
        k += 'T';
        num(t.id);
        num(t.actor);
        num(static_cast<int>(t.state));
        num(static_cast<long long>(t.pc));
        num(t.state == TaskState::Working ? t.work_until - now_ : 0);
        num(t.waiting_on);
        for (auto f : t.after)
            num(f);
        k += '[';
        for (const auto& v : t.locals) {
            k += to_string(v);
            k += ';';
        }
        k += ']';
        for (auto d : t.draws)
            num(d);
    }
    for (const auto& a : actors_) {
        k += 'A';
        num(a.active ? static_cast<long long>(*a.active) : -1);
        for (auto r : a.ready)
            num(r);
        k += '[';
        for (const auto& v : a.fields) {
            k += to_string(v);
            k += ';';
        }
        k += ']';
    }
    k += 'F';
    for (const auto& f : futures_)
        k += f ? to_string(*f) + ";" : std::string("_;");
    k += 'H';
    for (auto h : holder_)
        num(h);
    k += 'W';
    for (auto w : hold_waiters_)
        num(w);
    k += 'P';
    if (pending_) {
        num(static_cast<int>(pending_->kind));
        for (auto c : candidates_)
            num(c);
    }
    if (resume_)
        num(*resume_);
    return k;
}

} // namespace rpl::sim
