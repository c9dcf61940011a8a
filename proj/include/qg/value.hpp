/* value.hpp -- tagged finite-alphabet values used for goals and responses
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qg {

/*
 * A Value is a small tagged tuple over construction-declared finite
 * alphabets: a tag plus zero or more symbol fields. Goals are immutable
 * Values; responses are optional Values where the absent state is the
 * empty symbol (an incomplete node).
 */
struct Value {
    std::string tag;
    std::vector<std::string> fields;

    bool operator==(const Value&) const = default;

    const std::string& field(std::size_t i) const { return fields.at(i); }

    std::string str() const {
        std::string out = tag;
        if (!fields.empty()) {
            out += '(';
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) out += ',';
                out += fields[i];
            }
            out += ')';
        }
        return out;
    }
};

inline Value val(std::string tag) { return Value{std::move(tag), {}}; }

inline Value val(std::string tag, std::vector<std::string> fields) {
    return Value{std::move(tag), std::move(fields)};
}

using Goal = Value;

// nullopt is the empty symbol: the node has not been answered yet.
using Response = std::optional<Value>;

inline std::string response_str(const Response& r) { return r ? r->str() : "~"; }

} // namespace qg
