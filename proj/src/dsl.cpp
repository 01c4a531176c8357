#include "osgilab/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace osgilab {
namespace {

// ---------------------------------------------------------------------------
// Token stream shared by the model, protocol, and invariant grammars.

struct Token {
    enum class Kind { Ident, Sym, End };
    Kind kind = Kind::End;
    std::string text;
    SourceSpan span;
};

struct LexOutput {
    std::vector<Token> tokens;
    std::vector<Diagnostic> diagnostics;
};

LexOutput lex(const std::string& text) {
    LexOutput out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        SourceSpan span{line, col, 1};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                                       text[j] == '_'))
                ++j;
            span.length = static_cast<int>(j - i);
            out.tokens.push_back({Token::Kind::Ident, text.substr(i, j - i), span});
            advance(j - i);
            continue;
        }
        auto sym = [&](std::string s) {
            span.length = static_cast<int>(s.size());
            out.tokens.push_back({Token::Kind::Sym, std::move(s), span});
            advance(span.length);
        };
        switch (c) {
            case '{': case '}': case '(': case ')': case '[': case ']':
            case ';': case ',': case '.': case '@': case '+': case '*':
            case '<': case '>':
                sym(std::string(1, c));
                break;
            case '-':
                if (i + 1 < text.size() && text[i + 1] == '>')
                    sym("->");
                else
                    sym("-");
                break;
            case '!':
                sym("!");
                break;
            case '&':
                if (i + 1 < text.size() && text[i + 1] == '&') {
                    sym("&&");
                } else {
                    out.diagnostics.push_back(error_at(span, "stray '&' (use '&&')"));
                    advance(1);
                }
                break;
            case '|':
                if (i + 1 < text.size() && text[i + 1] == '|') {
                    sym("||");
                } else {
                    out.diagnostics.push_back(error_at(span, "stray '|' (use '||')"));
                    advance(1);
                }
                break;
            default:
                out.diagnostics.push_back(
                    error_at(span, std::string("unexpected character '") + c + "'"));
                advance(1);
        }
    }
    out.tokens.push_back({Token::Kind::End, "", {line, col, 0}});
    return out;
}

struct ParseAbort {};

class TokenStream {
  public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    bool at_ident(const std::string& word) const {
        return peek().kind == Token::Kind::Ident && peek().text == word;
    }
    bool at_any_ident() const { return peek().kind == Token::Kind::Ident; }
    bool at_sym(const std::string& s) const {
        return peek().kind == Token::Kind::Sym && peek().text == s;
    }
    Token take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    Token expect_ident(const std::string& what) {
        if (!at_any_ident()) fail("expected " + what + ", found " + describe(peek()));
        return take();
    }
    void expect_keyword(const std::string& word) {
        if (!at_ident(word)) fail("expected '" + word + "', found " + describe(peek()));
        take();
    }
    void expect_sym(const std::string& s) {
        if (!at_sym(s)) fail("expected '" + s + "', found " + describe(peek()));
        take();
    }
    void expect_end() {
        if (!at_end()) fail("unexpected trailing input: " + describe(peek()));
    }

    [[noreturn]] void fail(const std::string& message) { fail_at(peek().span, message); }
    [[noreturn]] void fail_at(SourceSpan span, const std::string& message) {
        diagnostics.push_back(error_at(span, message));
        throw ParseAbort{};
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case Token::Kind::Ident: return "'" + t.text + "'";
            case Token::Kind::Sym: return "'" + t.text + "'";
            case Token::Kind::End: return "end of input";
        }
        return "?";
    }

    std::vector<Diagnostic> diagnostics;

  private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Model grammar.

class ModelParser {
  public:
    explicit ModelParser(TokenStream& ts) : ts_(ts) {}

    SystemDef parse_system() {
        SystemDef def;
        ts_.expect_keyword("system");
        def.name = ts_.expect_ident("system name").text;
        ts_.expect_sym("{");
        ts_.expect_keyword("init");
        def.init_bundle = ts_.expect_ident("initial bundle name").text;
        ts_.expect_sym(";");
        while (true) {
            if (ts_.at_ident("bundle")) {
                def.bundles.push_back(parse_bundle());
            } else if (ts_.at_ident("environment")) {
                ts_.take();
                ts_.expect_sym("{");
                while (!ts_.at_sym("}")) def.environment.push_back(parse_envop());
                ts_.expect_sym("}");
            } else {
                break;
            }
        }
        ts_.expect_sym("}");
        return def;
    }

  private:
    bool parse_presence() {  // true = present (default)
        if (!ts_.at_sym("(")) return true;
        ts_.take();
        ts_.expect_keyword("absent");
        ts_.expect_sym(")");
        return false;
    }

    BundleDef parse_bundle() {
        BundleDef b;
        ts_.expect_keyword("bundle");
        b.name = ts_.expect_ident("bundle name").text;
        b.initially_present = parse_presence();
        ts_.expect_sym("{");
        ts_.expect_keyword("activator");
        b.activator = ts_.expect_ident("activator object name").text;
        ts_.expect_sym(";");
        while (ts_.at_ident("object")) b.objects.push_back(parse_object());
        ts_.expect_sym("}");
        return b;
    }

    ObjectDef parse_object() {
        ObjectDef o;
        ts_.expect_keyword("object");
        o.name = ts_.expect_ident("object name").text;
        o.initially_present = parse_presence();
        ts_.expect_sym("{");
        while (ts_.at_ident("method")) o.methods.push_back(parse_method());
        ts_.expect_sym("}");
        return o;
    }

    MethodDef parse_method() {
        MethodDef m;
        ts_.expect_keyword("method");
        m.name = ts_.expect_ident("method name").text;
        ts_.expect_sym("{");
        ts_.expect_keyword("locations");
        while (ts_.at_any_ident()) m.locations.push_back(ts_.take().text);
        if (m.locations.empty()) ts_.fail("expected at least one location name");
        ts_.expect_sym(";");
        ts_.expect_keyword("init");
        m.initial = ts_.expect_ident("initial location").text;
        ts_.expect_sym(";");
        while (ts_.at_ident("edge")) m.edges.push_back(parse_edge());
        ts_.expect_sym("}");
        return m;
    }

    Edge parse_edge() {
        Edge e;
        ts_.expect_keyword("edge");
        e.source = ts_.expect_ident("source location").text;
        ts_.expect_sym("->");
        e.target = ts_.expect_ident("target location").text;
        if (ts_.at_sym("[")) {
            ts_.take();
            e.actions.push_back(parse_action());
            while (ts_.at_sym(",")) {
                ts_.take();
                e.actions.push_back(parse_action());
            }
            ts_.expect_sym("]");
        }
        ts_.expect_sym(";");
        return e;
    }

    Action parse_action() {
        Token head = ts_.expect_ident("action keyword");
        if (head.text == "call") {
            Name m = ts_.expect_ident("method name").text;
            ts_.expect_sym(".");
            Name o = ts_.expect_ident("object name").text;
            ts_.expect_sym("@");
            Name b = ts_.expect_ident("bundle name").text;
            return Action::call(std::move(m), std::move(o), std::move(b));
        }
        if (head.text == "add") return Action::add_bundle(ts_.expect_ident("bundle name").text);
        if (head.text == "remove")
            return Action::remove_bundle(ts_.expect_ident("bundle name").text);
        if (head.text == "create" || head.text == "delete") {
            Name o = ts_.expect_ident("object name").text;
            ts_.expect_sym("@");
            Name b = ts_.expect_ident("bundle name").text;
            return head.text == "create" ? Action::create_object(std::move(o), std::move(b))
                                         : Action::delete_object(std::move(o), std::move(b));
        }
        ts_.fail_at(head.span, "unknown action '" + head.text +
                                   "' (expected call, add, remove, create, or delete)");
    }

    Action parse_envop() {
        Token head = ts_.expect_ident("'may-add' or 'may-remove'");
        if (head.text != "may") ts_.fail_at(head.span, "expected 'may-add' or 'may-remove'");
        ts_.expect_sym("-");
        Token kind = ts_.expect_ident("'add' or 'remove'");
        Name b = ts_.expect_ident("bundle name").text;
        ts_.expect_sym(";");
        if (kind.text == "add") return Action::add_bundle(std::move(b));
        if (kind.text == "remove") return Action::remove_bundle(std::move(b));
        ts_.fail_at(kind.span, "expected 'add' or 'remove' after 'may-'");
    }

    TokenStream& ts_;
};

// ---------------------------------------------------------------------------
// Protocol grammar.

class ProtocolParser {
  public:
    explicit ProtocolParser(TokenStream& ts) : ts_(ts) {}

    ProtoSpec parse_spec() {
        ProtoSpec spec;
        ts_.expect_keyword("protocol");
        bool automaton_form = false;
        if (ts_.at_sym("-")) {
            ts_.take();
            ts_.expect_keyword("automaton");
            automaton_form = true;
        }
        spec.name = ts_.expect_ident("protocol name").text;
        if (ts_.at_ident("param")) {
            ts_.take();
            spec.variable = ts_.expect_ident("parameter variable").text;
        }
        Token dir = ts_.expect_ident("'incoming' or 'outgoing'");
        if (dir.text == "incoming")
            direction_ = Direction::Inc;
        else if (dir.text == "outgoing")
            direction_ = Direction::Out;
        else
            ts_.fail_at(dir.span, "expected 'incoming' or 'outgoing'");
        spec.direction = direction_;
        ts_.expect_sym("{");
        if (automaton_form)
            parse_automaton_body(spec);
        else
            spec.body = parse_alt();
        ts_.expect_sym("}");
        finish_resource_checks(spec);
        return spec;
    }

  private:
    // Expression form; precedence * > . > +.
    ProtoExpr parse_alt() {
        ProtoExpr e = parse_cat();
        while (ts_.at_sym("+")) {
            ts_.take();
            e = ProtoExpr::alt(std::move(e), parse_cat());
        }
        return e;
    }
    ProtoExpr parse_cat() {
        ProtoExpr e = parse_star();
        while (ts_.at_sym(".")) {
            ts_.take();
            e = ProtoExpr::concat(std::move(e), parse_star());
        }
        return e;
    }
    ProtoExpr parse_star() {
        ProtoExpr e = parse_primary();
        while (ts_.at_sym("*")) {
            ts_.take();
            e = ProtoExpr::star(std::move(e));
        }
        return e;
    }
    ProtoExpr parse_primary() {
        if (ts_.at_sym("(")) {
            ts_.take();
            ProtoExpr e = parse_alt();
            ts_.expect_sym(")");
            return e;
        }
        Token label = ts_.expect_ident("event label, 'eps', or '('");
        if (label.text == "eps") return ProtoExpr::epsilon();
        Event ev{direction_, label.text, parse_opt_param()};
        return ProtoExpr::atom(std::move(ev));
    }
    std::optional<Name> parse_opt_param() {
        if (!ts_.at_sym("<")) return std::nullopt;
        ts_.take();
        Name p = ts_.expect_ident("parameter").text;
        ts_.expect_sym(">");
        return p;
    }

    // Automaton form. The locations clause must precede init/accepting/trans
    // so every mentioned location can be checked on the spot.
    AutLocation parse_location(bool check_declared) {
        Token base = ts_.expect_ident("location name");
        AutLocation l{base.text, parse_opt_param()};
        if (check_declared &&
            std::find(declared_.begin(), declared_.end(), l) == declared_.end())
            ts_.fail_at(base.span, "undeclared location " + to_string(l));
        return l;
    }

    void parse_automaton_body(ProtoSpec& spec) {
        ProtoAutomaton a;
        bool have_locations = false, have_init = false;
        while (!ts_.at_sym("}")) {
            Token clause = ts_.expect_ident("automaton clause");
            if (clause.text == "locations") {
                while (ts_.at_any_ident()) a.locations.push_back(parse_location(false));
                if (a.locations.empty()) ts_.fail("expected at least one location");
                declared_ = a.locations;
                have_locations = true;
            } else if (clause.text == "init") {
                require_locations(clause, have_locations);
                a.initial = parse_location(true);
                have_init = true;
            } else if (clause.text == "accepting") {
                require_locations(clause, have_locations);
                while (ts_.at_any_ident()) a.accepting.insert(parse_location(true));
            } else if (clause.text == "trans") {
                require_locations(clause, have_locations);
                AutTransition t;
                t.source = parse_location(true);
                ts_.expect_sym("-");
                Token label = ts_.expect_ident("event label");
                if (label.text == "eps")
                    t.event = std::nullopt;
                else
                    t.event = Event{direction_, label.text, parse_opt_param()};
                ts_.expect_sym("->");
                t.target = parse_location(true);
                a.transitions.push_back(std::move(t));
            } else if (clause.text == "acquire" || clause.text == "release") {
                auto& list = clause.text == "acquire" ? acquire_ : release_;
                while (ts_.at_any_ident()) {
                    Token l = ts_.take();
                    list.emplace_back(l.text, l.span);
                }
                if (list.empty()) ts_.fail("expected at least one label");
            } else if (clause.text == "exclusive") {
                spec.exclusive = true;
            } else {
                ts_.fail_at(clause.span, "unknown clause '" + clause.text + "'");
            }
            ts_.expect_sym(";");
        }
        if (!have_init) ts_.fail("automaton needs an 'init' clause");
        spec.body = std::move(a);
    }

    void require_locations(const Token& clause, bool have) {
        if (!have)
            ts_.fail_at(clause.span, "'" + clause.text + "' must come after 'locations'");
    }

    void finish_resource_checks(ProtoSpec& spec) {
        std::set<Name> labels;
        if (spec.is_expression())
            for (const auto& e : alphabet(spec.expression())) labels.insert(e.label);
        if (!spec.is_expression())
            for (const auto& e : alphabet(spec.automaton())) labels.insert(e.label);
        for (const auto& [label, span] : acquire_) {
            if (!labels.count(label))
                ts_.fail_at(span, "acquire label " + label + " not in the protocol alphabet");
            spec.acquire_labels.insert(label);
        }
        for (const auto& [label, span] : release_) {
            if (!labels.count(label))
                ts_.fail_at(span, "release label " + label + " not in the protocol alphabet");
            spec.release_labels.insert(label);
        }
    }

    TokenStream& ts_;
    Direction direction_ = Direction::Inc;
    std::vector<AutLocation> declared_;
    std::vector<std::pair<Name, SourceSpan>> acquire_, release_;
};

// ---------------------------------------------------------------------------
// Invariant grammar: `->` (right-assoc) < `||` < `&&` < `!`.

class InvariantParser {
  public:
    explicit InvariantParser(TokenStream& ts) : ts_(ts) {}

    Formula parse_formula() {
        Formula left = parse_or();
        if (!ts_.at_sym("->")) return left;
        ts_.take();
        return Formula::implication(std::move(left), parse_formula());
    }

  private:
    Formula parse_or() {
        Formula e = parse_and();
        while (ts_.at_sym("||")) {
            ts_.take();
            e = Formula::disjunction(std::move(e), parse_and());
        }
        return e;
    }
    Formula parse_and() {
        Formula e = parse_unary();
        while (ts_.at_sym("&&")) {
            ts_.take();
            e = Formula::conjunction(std::move(e), parse_unary());
        }
        return e;
    }
    Formula parse_unary() {
        if (ts_.at_sym("!")) {
            ts_.take();
            return Formula::negation(parse_unary());
        }
        if (ts_.at_sym("(")) {
            ts_.take();
            Formula e = parse_formula();
            ts_.expect_sym(")");
            return e;
        }
        return parse_atom();
    }
    Formula parse_atom() {
        Token head = ts_.expect_ident("atom (bundle/object/active/at)");
        std::size_t arity;
        if (head.text == "bundle")
            arity = 1;
        else if (head.text == "object")
            arity = 2;
        else if (head.text == "active")
            arity = 3;
        else if (head.text == "at")
            arity = 4;
        else
            ts_.fail_at(head.span, "unknown atom '" + head.text + "'");
        ts_.expect_sym("(");
        std::vector<Name> args;
        args.push_back(ts_.expect_ident("name").text);
        while (ts_.at_sym(",")) {
            ts_.take();
            args.push_back(ts_.expect_ident("name").text);
        }
        ts_.expect_sym(")");
        if (args.size() != arity)
            ts_.fail_at(head.span, head.text + " takes " + std::to_string(arity) +
                                       " argument(s), got " + std::to_string(args.size()));
        switch (arity) {
            case 1: return Formula::bundle_present(args[0]);
            case 2: return Formula::object_present(args[0], args[1]);
            case 3: return Formula::method_active(args[0], args[1], args[2]);
            default: return Formula::at_location(args[0], args[1], args[2], args[3]);
        }
    }

    TokenStream& ts_;
};

template <typename T, typename Fn>
ParseResult<T> run_parser(const std::string& text, Fn parse) {
    LexOutput lx = lex(text);
    if (has_errors(lx.diagnostics)) return {std::nullopt, std::move(lx.diagnostics)};
    TokenStream ts(std::move(lx.tokens));
    try {
        T value = parse(ts);
        ts.expect_end();
        return {std::move(value), std::move(ts.diagnostics)};
    } catch (ParseAbort&) {
        return {std::nullopt, std::move(ts.diagnostics)};
    }
}

}  // namespace

ParseResult<SystemDef> parse_model(const std::string& text) {
    ParseResult<SystemDef> r = run_parser<SystemDef>(
        text, [](TokenStream& ts) { return ModelParser(ts).parse_system(); });
    if (r.value) {
        auto vdiags = validate(*r.value);
        r.diagnostics.insert(r.diagnostics.end(), vdiags.begin(), vdiags.end());
    }
    return r;
}

ParseResult<ProtoSpec> parse_protocol(const std::string& text) {
    return run_parser<ProtoSpec>(text,
                                 [](TokenStream& ts) { return ProtocolParser(ts).parse_spec(); });
}

ParseResult<Formula> parse_invariant(const std::string& text) {
    return run_parser<Formula>(
        text, [](TokenStream& ts) { return InvariantParser(ts).parse_formula(); });
}

// ---------------------------------------------------------------------------
// Traces (line format, parsed without the shared lexer).

ParseResult<std::vector<Event>> parse_trace(const std::string& text) {
    ParseResult<std::vector<Event>> result;
    result.value.emplace();
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        std::size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        SourceSpan span{line_no, 1, static_cast<int>(raw.size())};
        auto bad = [&](const std::string& why) {
            result.diagnostics.push_back(error_at(span, why + ": '" + trim(raw) + "'"));
        };
        auto colon = line.find(':');
        if (colon == std::string::npos) {
            bad("expected INC:Label or OUT:Label");
            continue;
        }
        std::string dir_text = trim(line.substr(0, colon));
        Direction dir;
        if (dir_text == "INC")
            dir = Direction::Inc;
        else if (dir_text == "OUT")
            dir = Direction::Out;
        else {
            bad("direction must be INC or OUT");
            continue;
        }
        std::string rest = trim(line.substr(colon + 1));
        std::optional<std::string> param;
        if (auto open = rest.find('('); open != std::string::npos) {
            if (rest.back() != ')') {
                bad("missing ')'");
                continue;
            }
            param = trim(rest.substr(open + 1, rest.size() - open - 2));
            rest = trim(rest.substr(0, open));
            if (!is_valid_identifier(*param)) {
                bad("parameter must be an identifier");
                continue;
            }
        }
        if (!is_valid_identifier(rest)) {
            bad("label must be an identifier");
            continue;
        }
        result.value->push_back(Event{dir, std::move(rest), std::move(param)});
    }
    if (has_errors(result.diagnostics)) result.value.reset();
    return result;
}

// ---------------------------------------------------------------------------
// Pretty-printers. Each prints the canonical layout its parser reads back,
// so parse(print(x)) == x.

namespace {

std::string print_action(const Action& a) {
    switch (a.kind) {
        case ActionKind::Call: return "call " + a.method + "." + a.object + "@" + a.bundle;
        case ActionKind::AddBundle: return "add " + a.bundle;
        case ActionKind::RemoveBundle: return "remove " + a.bundle;
        case ActionKind::CreateObject: return "create " + a.object + "@" + a.bundle;
        case ActionKind::DeleteObject: return "delete " + a.object + "@" + a.bundle;
    }
    return {};
}

}  // namespace

std::string print_model(const SystemDef& def) {
    std::ostringstream os;
    os << "system " << def.name << " {\n";
    os << "  init " << def.init_bundle << ";\n";
    for (const auto& b : def.bundles) {
        os << "\n  bundle " << b.name << (b.initially_present ? "" : " (absent)") << " {\n";
        os << "    activator " << b.activator << ";\n";
        for (const auto& o : b.objects) {
            os << "    object " << o.name << (o.initially_present ? "" : " (absent)") << " {\n";
            for (const auto& m : o.methods) {
                os << "      method " << m.name << " {\n";
                os << "        locations";
                for (const auto& l : m.locations) os << " " << l;
                os << ";\n        init " << m.initial << ";\n";
                for (const auto& e : m.edges) {
                    os << "        edge " << e.source << " -> " << e.target;
                    if (!e.actions.empty()) {
                        os << " [";
                        for (std::size_t i = 0; i < e.actions.size(); ++i)
                            os << (i ? ", " : "") << print_action(e.actions[i]);
                        os << "]";
                    }
                    os << ";\n";
                }
                os << "      }\n";
            }
            os << "    }\n";
        }
        os << "  }\n";
    }
    if (!def.environment.empty()) {
        os << "\n  environment {\n";
        for (const auto& a : def.environment)
            os << "    may-" << (a.kind == ActionKind::AddBundle ? "add" : "remove") << " "
               << a.bundle << ";\n";
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

namespace {

std::string print_atom_event(const Event& e) {
    return e.param ? e.label + "<" + *e.param + ">" : e.label;
}

// Precedence levels: Alt 0, Concat 1, Star 2, Atom/Epsilon 3. Children are
// rendered at the level that reproduces the tree under the left-associative,
// star-postfix grammar.
std::string print_expr(const ProtoExpr& e, int min_prec) {
    int prec;
    std::string s;
    switch (e.kind) {
        case ProtoExpr::Kind::Epsilon:
            prec = 3;
            s = "eps";
            break;
        case ProtoExpr::Kind::Atom:
            prec = 3;
            s = print_atom_event(e.event);
            break;
        case ProtoExpr::Kind::Alt:
            prec = 0;
            s = print_expr(e.children[0], 0) + " + " + print_expr(e.children[1], 1);
            break;
        case ProtoExpr::Kind::Concat:
            prec = 1;
            s = print_expr(e.children[0], 1) + " . " + print_expr(e.children[1], 2);
            break;
        case ProtoExpr::Kind::Star:
            prec = 2;
            s = print_expr(e.children[0], 2) + "*";
            break;
        default:
            throw std::logic_error("unreachable expression kind");
    }
    return prec < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string print_protocol(const ProtoSpec& spec) {
    std::ostringstream os;
    os << (spec.is_expression() ? "protocol " : "protocol-automaton ") << spec.name;
    if (spec.variable) os << " param " << *spec.variable;
    os << (spec.direction == Direction::Inc ? " incoming" : " outgoing") << " {\n";
    if (spec.is_expression()) {
        os << "  " << print_expr(spec.expression(), 0) << "\n";
    } else {
        const ProtoAutomaton& a = spec.automaton();
        os << "  locations";
        for (const auto& l : a.locations) os << " " << to_string(l);
        os << ";\n  init " << to_string(a.initial) << ";\n  accepting";
        for (const auto& l : a.accepting) os << " " << to_string(l);
        os << ";\n";
        for (const auto& t : a.transitions) {
            os << "  trans " << to_string(t.source) << " -"
               << (t.event ? print_atom_event(*t.event) : "eps") << "-> " << to_string(t.target)
               << ";\n";
        }
        if (!spec.acquire_labels.empty()) {
            os << "  acquire";
            for (const auto& l : spec.acquire_labels) os << " " << l;
            os << ";\n";
        }
        if (!spec.release_labels.empty()) {
            os << "  release";
            for (const auto& l : spec.release_labels) os << " " << l;
            os << ";\n";
        }
        if (spec.exclusive) os << "  exclusive;\n";
    }
    os << "}\n";
    return os.str();
}

namespace {

// Precedence levels: Implies 1 (right-assoc), Or 2, And 3, Not 4, atoms 5.
std::string print_formula(const Formula& f, int min_prec) {
    int prec;
    std::string s;
    switch (f.kind) {
        case Formula::Kind::BundlePresent:
            prec = 5;
            s = "bundle(" + f.bundle + ")";
            break;
        case Formula::Kind::ObjectPresent:
            prec = 5;
            s = "object(" + f.object + ", " + f.bundle + ")";
            break;
        case Formula::Kind::MethodActive:
            prec = 5;
            s = "active(" + f.method + ", " + f.object + ", " + f.bundle + ")";
            break;
        case Formula::Kind::AtLocation:
            prec = 5;
            s = "at(" + f.method + ", " + f.object + ", " + f.bundle + ", " + f.location + ")";
            break;
        case Formula::Kind::Implies:
            prec = 1;
            s = print_formula(f.children[0], 2) + " -> " + print_formula(f.children[1], 1);
            break;
        case Formula::Kind::Or:
            prec = 2;
            s = print_formula(f.children[0], 2) + " || " + print_formula(f.children[1], 3);
            break;
        case Formula::Kind::And:
            prec = 3;
            s = print_formula(f.children[0], 3) + " && " + print_formula(f.children[1], 4);
            break;
        case Formula::Kind::Not:
            prec = 4;
            s = "!" + print_formula(f.children[0], 4);
            break;
        default:
            throw std::logic_error("unreachable formula kind");
    }
    return prec < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string print_invariant(const Formula& f) { return print_formula(f, 0); }

std::string print_trace(const std::vector<Event>& events) {
    std::ostringstream os;
    for (const auto& e : events) os << to_string(e) << "\n";
    return os.str();
}

}  // namespace osgilab
