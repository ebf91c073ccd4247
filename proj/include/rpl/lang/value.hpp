#pragma once

#include "rpl/lang/rational.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rpl::lang {

struct Value;
using ValueList = std::vector<Value>;

/// Default content of a declared-but-unassigned variable.
struct Null {
    bool operator==(const Null&) const = default;
};

struct ObjectRef {
    std::uint32_t id = 0;
    bool operator==(const ObjectRef&) const = default;
};

struct FutureRef {
    std::uint32_t id = 0;
    bool operator==(const FutureRef&) const = default;
};

/// A resource category named inside a hold request, e.g. `Driver`.
struct CategorySymbol {
    std::string name;
    bool operator==(const CategorySymbol&) const = default;
};

/// `ResEfficiency(n)`.
struct MinEfficiency {
    std::int64_t value = 0;
    bool operator==(const MinEfficiency&) const = default;
};

struct ListValue {
    std::shared_ptr<const ValueList> items;
};

struct SetValue {
    std::shared_ptr<const ValueList> items;
};

struct PairValue {
    std::shared_ptr<const std::array<Value, 2>> items;
};

/// Runtime value. Composite values share immutable storage, so copies are cheap
/// and values may be handed between threads freely.
struct Value {
    using Variant = std::variant<Null, Rational, bool, ObjectRef, FutureRef, CategorySymbol,
                                 MinEfficiency, ListValue, SetValue, PairValue>;
    Variant data;

    Value() = default;
    Value(Variant v) : data(std::move(v)) {}
    Value(int n) : data(Rational(n)) {}
    Value(std::int64_t n) : data(Rational(n)) {}
    Value(Rational r) : data(r) {}
    Value(bool b) : data(b) {}

    template <class T> bool is() const { return std::holds_alternative<T>(data); }
    template <class T> const T& as() const { return std::get<T>(data); }
    template <class T> const T* get_if() const { return std::get_if<T>(&data); }
};

bool operator==(const Value& a, const Value& b);

Value make_list(ValueList items);
Value make_set(ValueList items);
Value make_pair(Value first, Value second);

const ValueList& list_items(const Value& v);
const std::array<Value, 2>& pair_items(const Value& v);

/// Human-readable rendering, also used to build canonical state keys.
std::string to_string(const Value& v);

/// Name of the held alternative ("Int", "Bool", "List", ...).
const char* kind_name(const Value& v);

} // namespace rpl::lang
