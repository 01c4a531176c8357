#pragma once

#include <optional>
#include <string>
#include <vector>

#include "osgilab/diagnostics.hpp"
#include "osgilab/event.hpp"
#include "osgilab/invariant.hpp"
#include "osgilab/model.hpp"
#include "osgilab/protocol.hpp"

namespace osgilab {

/// Outcome of a parse: a value when the input was syntactically well formed,
/// plus any diagnostics (syntax errors, and for models the merged validation
/// findings). A result is usable only when no error-severity diagnostics
/// remain.
template <typename T>
struct ParseResult {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

// System model text format ("*.osgi"). Layout-insensitive, `#` comments.
//
//   system NAME {
//     init BUNDLE;
//     bundle NAME [(absent)] {
//       activator OBJECT;
//       object NAME [(absent)] {
//         method NAME {
//           locations L0 L1 ...;
//           init L0;
//           edge L0 -> L1 [ACTION, ...];
//         }
//       }
//     }
//     environment { may-add B; may-remove B; }
//   }
//
// Actions: `call METHOD.OBJECT@BUNDLE`, `add B`, `remove B`,
// `create OBJECT@BUNDLE`, `delete OBJECT@BUNDLE`.
ParseResult<SystemDef> parse_model(const std::string& text);
std::string print_model(const SystemDef& def);

// Protocol text format ("*.proto"). Expression form:
//
//   protocol NAME [param VAR] incoming|outgoing { EXPR }
//
// EXPR uses atoms `Label` or `Label<param>`, postfix `*`, infix `.` and `+`
// (precedence `*` > `.` > `+`), parentheses, and `eps` for the empty trace.
// Automaton form:
//
//   protocol-automaton NAME [param VAR] incoming|outgoing {
//     locations free locked<F>;
//     init free;
//     accepting free;
//     trans free -Lock<F>-> locked<F>;
//     acquire Lock; release Unlock; exclusive;
//   }
ParseResult<ProtoSpec> parse_protocol(const std::string& text);
std::string print_protocol(const ProtoSpec& spec);

// Invariant formulas: atoms `bundle(b)`, `object(o,b)`, `active(m,o,b)`,
// `at(m,o,b,l)`; operators `!`, `&&`, `||`, `->` (right-associative, lowest
// precedence).
ParseResult<Formula> parse_invariant(const std::string& text);
std::string print_invariant(const Formula& f);

// Traces: one event per line, `INC:Label`, `OUT:Label`, or with a parameter
// `INC:Label(value)`; blank lines and `#` comments skipped.
ParseResult<std::vector<Event>> parse_trace(const std::string& text);
std::string print_trace(const std::vector<Event>& events);

}  // namespace osgilab
