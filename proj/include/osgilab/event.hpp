#pragma once

#include <compare>
#include <optional>
#include <string>

namespace osgilab {

enum class Direction { Inc, Out };

/// A protocol event: an expected incoming (INC) or performed outgoing (OUT)
/// method call, optionally carrying one parameter. Inside a parameterized
/// specification the parameter may be the spec's variable; everywhere else it
/// is a concrete name.
struct Event {
    Direction dir = Direction::Inc;
    std::string label;
    std::optional<std::string> param;

    auto operator<=>(const Event&) const = default;
};

inline Event inc(std::string label, std::optional<std::string> param = std::nullopt) {
    return Event{Direction::Inc, std::move(label), std::move(param)};
}

inline Event out(std::string label, std::optional<std::string> param = std::nullopt) {
    return Event{Direction::Out, std::move(label), std::move(param)};
}

std::string to_string(const Event& e);

}  // namespace osgilab
