#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fep/ast.hpp"

namespace fep {

using IntArray = std::vector<int64_t>;
using Value = std::variant<int64_t, bool, IntArray>;

inline TypeTag type_of_value(const Value& v) {
    switch (v.index()) {
    case 0: return TypeTag::Int;
    case 1: return TypeTag::Bool;
    default: return TypeTag::IntArray;
    }
}

inline Value default_value(TypeTag t) {
    switch (t) {
    case TypeTag::Bool: return Value{false};
    case TypeTag::IntArray: return Value{IntArray{}};
    default: return Value{int64_t{0}};
    }
}

// Canonical form: valid JSON, identical bytes for equal values, distinct
// bytes for distinct values (ints, bools and int arrays never collide).
inline std::string canonical_serialize(const Value& v) {
    if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    const IntArray& a = std::get<IntArray>(v);
    std::string s = "[";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + "]";
}

// Sorted-key JSON object over pre-serialized values.
inline std::string canonical_object(const std::map<std::string, std::string>& fields) {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, v] : fields) {
        if (!first) s += ",";
        first = false;
        s += "\"" + k + "\":" + v;
    }
    return s + "}";
}

inline bool value_equal(const Value& a, const Value& b) { return a == b; }

}  // namespace fep
