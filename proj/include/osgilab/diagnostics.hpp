#pragma once

#include <optional>
#include <string>
#include <vector>

namespace osgilab {

enum class Severity { Error, Warning };

/// 1-based position of a token in a source text.
struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 0;

    auto operator<=>(const SourceSpan&) const = default;
};

/// One finding from a parser or from model validation. Parse diagnostics
/// carry a source span; validation diagnostics carry a context path such as
/// "bundle b / object o / method m".
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    std::optional<SourceSpan> span;
    std::string context;

    bool operator==(const Diagnostic&) const = default;
};

inline Diagnostic error_at(SourceSpan span, std::string message) {
    return Diagnostic{Severity::Error, std::move(message), span, {}};
}

inline Diagnostic error_in(std::string context, std::string message) {
    return Diagnostic{Severity::Error, std::move(message), std::nullopt, std::move(context)};
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) {
        if (d.severity == Severity::Error) return true;
    }
    return false;
}

std::string to_string(const Diagnostic& d);

}  // namespace osgilab
