#include "rpl/lang/value.hpp"

#include <sstream>

namespace rpl::lang {

std::string to_string(const Rational& r)
{
    if (r.denominator() == 1)
        return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool same_items(const ValueList& a, const ValueList& b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i]))
            return false;
    return true;
}

} // namespace

bool operator==(const Value& a, const Value& b)
{
    if (a.data.index() != b.data.index())
        return false;
    return std::visit(
        overloaded{
            [&](const ListValue& l) { return same_items(*l.items, *b.as<ListValue>().items); },
            [&](const SetValue& s) { return same_items(*s.items, *b.as<SetValue>().items); },
            [&](const PairValue& p) {
                const auto& q = *b.as<PairValue>().items;
                return (*p.items)[0] == q[0] && (*p.items)[1] == q[1];
            },
            [&](const auto& x) { return x == std::get<std::decay_t<decltype(x)>>(b.data); },
        },
        a.data);
}

Value make_list(ValueList items)
{
    return Value{ListValue{std::make_shared<const ValueList>(std::move(items))}};
}

Value make_set(ValueList items)
{
    return Value{SetValue{std::make_shared<const ValueList>(std::move(items))}};
}

Value make_pair(Value first, Value second)
{
    return Value{PairValue{
        std::make_shared<const std::array<Value, 2>>(std::array<Value, 2>{std::move(first), std::move(second)})}};
}

const ValueList& list_items(const Value& v) { return *v.as<ListValue>().items; }

const std::array<Value, 2>& pair_items(const Value& v) { return *v.as<PairValue>().items; }

std::string to_string(const Value& v)
{
    auto join = [](const char* open, const ValueList& items, const char* close) {
        std::string out = open;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i)
                out += ",";
            out += to_string(items[i]);
        }
        return out + close;
    };
    return std::visit(
        overloaded{
            [](const Null&) { return std::string("null"); },
            [](const Rational& r) { return to_string(r); },
            [](bool b) { return std::string(b ? "True" : "False"); },
            [](const ObjectRef& o) { return "obj#" + std::to_string(o.id); },
            [](const FutureRef& f) { return "fut#" + std::to_string(f.id); },
            [](const CategorySymbol& c) { return c.name; },
            [](const MinEfficiency& e) { return "ResEfficiency(" + std::to_string(e.value) + ")"; },
            [&](const ListValue& l) { return join("list[", *l.items, "]"); },
            [&](const SetValue& s) { return join("set[", *s.items, "]"); },
            [](const PairValue& p) {
                return "Pair(" + to_string((*p.items)[0]) + "," + to_string((*p.items)[1]) + ")";
            },
        },
        v.data);
}

const char* kind_name(const Value& v)
{
    static constexpr const char* names[] = {"Null",     "Int",           "Bool", "Object", "Fut",
                                            "Category", "ResEfficiency", "List", "Set",    "Pair"};
    return names[v.data.index()];
}

} // namespace rpl::lang
