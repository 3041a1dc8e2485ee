#include "mtsref/textfmt.hpp"

#include <cctype>
#include <sstream>

#include "mtsref/error.hpp"

namespace mtsref {

namespace {

enum class Tok { Name, LBrace, RBrace, LParen, RParen, Comma, Semi, Colon, Equals, Minus, Arrow, Bang, AndAnd, OrOr,
                 Implies, Iff, End };

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
    bool quoted = false;
};

bool isIdentChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skipSpace();
            SourceSpan start = here();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", start});
                return out;
            }
            char c = src_[pos_];
            auto single = [&](Tok k, std::size_t len) {
                std::string text(src_.substr(pos_, len));
                advance(len);
                out.push_back({k, std::move(text), finish(start)});
            };
            if (isIdentChar(c)) {
                std::size_t b = pos_;
                while (pos_ < src_.size() && isIdentChar(src_[pos_])) advance(1);
                out.push_back({Tok::Name, std::string(src_.substr(b, pos_ - b)), finish(start)});
                continue;
            }
            switch (c) {
            case '"': out.push_back(quotedName(start)); break;
            case '{': single(Tok::LBrace, 1); break;
            case '}': single(Tok::RBrace, 1); break;
            case '(': single(Tok::LParen, 1); break;
            case ')': single(Tok::RParen, 1); break;
            case ',': single(Tok::Comma, 1); break;
            case ';': single(Tok::Semi, 1); break;
            case ':': single(Tok::Colon, 1); break;
            case '!': single(Tok::Bang, 1); break;
            case '-':
                if (peek(1) == '>') single(Tok::Arrow, 2);
                else single(Tok::Minus, 1);
                break;
            case '=':
                if (peek(1) == '>') single(Tok::Implies, 2);
                else single(Tok::Equals, 1);
                break;
            case '&':
                if (peek(1) != '&') fail(start, "expected '&&'");
                single(Tok::AndAnd, 2);
                break;
            case '|':
                if (peek(1) != '|') fail(start, "expected '||'");
                single(Tok::OrOr, 2);
                break;
            case '<':
                if (peek(1) != '=' || peek(2) != '>') fail(start, "expected '<=>'");
                single(Tok::Iff, 3);
                break;
            default: fail(start, std::string("unexpected character '") + c + "'");
            }
        }
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
    }

    SourceSpan here() const { return {line_, col_, pos_, pos_}; }
    SourceSpan finish(SourceSpan s) const {
        s.end = pos_;
        return s;
    }

    [[noreturn]] void fail(SourceSpan s, const std::string& msg) const {
        s.end = std::max(s.begin + 1, pos_);
        throw Error(ErrorCode::SyntaxError, msg + " at " + std::to_string(s.line) + ":" + std::to_string(s.column), s);
    }

    void skipSpace() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else {
                break;
            }
        }
    }

    Token quotedName(SourceSpan start) {
        advance(1);
        std::string text;
        for (;;) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') fail(start, "unterminated quoted name");
            char c = src_[pos_];
            if (c == '"') {
                advance(1);
                break;
            }
            if (c == '\\') {
                advance(1);
                if (pos_ >= src_.size()) fail(start, "unterminated quoted name");
                c = src_[pos_];
            }
            text.push_back(c);
            advance(1);
        }
        return {Tok::Name, std::move(text), finish(start), true};
    }
};

const char* tokName(Tok k) {
    switch (k) {
    case Tok::Name: return "name";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Equals: return "'='";
    case Tok::Minus: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::Bang: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Implies: return "'=>'";
    case Tok::Iff: return "'<=>'";
    case Tok::End: return "end of input";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    std::vector<TransitionSystem> systems() {
        std::vector<TransitionSystem> out;
        while (cur().kind != Tok::End) out.push_back(system());
        return out;
    }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;

    const Token& cur() const { return toks_[i_]; }
    const Token& at(std::size_t k) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }

    [[noreturn]] void fail(const Token& t, ErrorCode code, const std::string& msg) const {
        SourceSpan s = t.span;
        if (s.end <= s.begin) s.end = s.begin + 1;
        throw Error(code, msg + " at " + std::to_string(s.line) + ":" + std::to_string(s.column), s);
    }

    const Token& expect(Tok k, const char* what = nullptr) {
        if (cur().kind != k)
            fail(cur(), ErrorCode::SyntaxError,
                 std::string("expected ") + (what ? what : tokName(k)) + ", found " + describe(cur()));
        return toks_[i_++];
    }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::Name) return "'" + t.text + "'";
        return tokName(t.kind);
    }

    bool isKeyword(const char* word) const {
        return cur().kind == Tok::Name && !cur().quoted && cur().text == word;
    }

    void expectKeyword(const char* word) {
        if (!isKeyword(word)) fail(cur(), ErrorCode::SyntaxError, std::string("expected '") + word + "', found " + describe(cur()));
        ++i_;
    }

    void sectionHeader(const char* word) {
        expectKeyword(word);
        expect(Tok::Colon);
    }

    std::vector<Token> nameList() {
        std::vector<Token> names;
        if (cur().kind == Tok::Semi) {
            ++i_;
            return names;
        }
        names.push_back(expect(Tok::Name));
        while (cur().kind == Tok::Comma) {
            ++i_;
            names.push_back(expect(Tok::Name));
        }
        expect(Tok::Semi);
        return names;
    }

    StateId resolveState(const SystemBuilder& b, const Token& t) const {
        auto s = b.findState(t.text);
        if (!s) fail(t, ErrorCode::UndeclaredName, "undeclared state '" + t.text + "'");
        return *s;
    }

    TransitionSystem system() {
        expectKeyword("system");
        const Token& nameTok = expect(Tok::Name, "system name");
        SystemBuilder b(nameTok.text);
        expect(Tok::LBrace);

        if (isKeyword("params") && at(1).kind == Tok::Colon) {
            sectionHeader("params");
            for (const auto& t : nameList()) {
                if (b.findParam(t.text)) fail(t, ErrorCode::DuplicateName, "duplicate parameter '" + t.text + "'");
                b.addParam(t.text);
            }
        }
        sectionHeader("states");
        for (const auto& t : nameList()) {
            if (b.findState(t.text)) fail(t, ErrorCode::DuplicateName, "duplicate state '" + t.text + "'");
            b.addState(t.text);
        }
        if (isKeyword("init") && at(1).kind == Tok::Colon) {
            sectionHeader("init");
            const Token& t = expect(Tok::Name, "initial state");
            b.setInitial(resolveState(b, t));
            expect(Tok::Semi);
        }
        if (isKeyword("trans") && at(1).kind == Tok::Colon) {
            sectionHeader("trans");
            do {
                edge(b);
            } while (cur().kind == Tok::Name && at(1).kind == Tok::Minus);
        }
        std::vector<char> hasPhi(b.stateCount(), 0);
        while (isKeyword("phi")) {
            ++i_;
            const Token& st = expect(Tok::Name, "state name");
            StateId s = resolveState(b, st);
            if (hasPhi[s]) fail(st, ErrorCode::DuplicateName, "second obligation for state '" + st.text + "'");
            hasPhi[s] = 1;
            expect(Tok::Equals);
            Formula phi = iffLevel(b, s);
            expect(Tok::Semi);
            b.setObligation(s, std::move(phi));
        }
        expect(Tok::RBrace, "'}' or a section");
        return std::move(b).build();
    }

    void edge(SystemBuilder& b) {
        const Token& src = expect(Tok::Name, "source state");
        expect(Tok::Minus);
        const Token& act = expect(Tok::Name, "action");
        expect(Tok::Arrow);
        const Token& dst = expect(Tok::Name, "target state");
        expect(Tok::Semi);
        StateId s = resolveState(b, src);
        StateId t = resolveState(b, dst);
        ActionId a = b.addAction(act.text);
        if (b.hasTransition(s, a, t)) fail(src, ErrorCode::DuplicateName, "duplicate transition");
        b.addTransition(s, a, t);
    }

    // <=> (left-assoc)
    Formula iffLevel(const SystemBuilder& b, StateId s) {
        Formula f = impliesLevel(b, s);
        while (cur().kind == Tok::Iff) {
            ++i_;
            f = Formula::iff(f, impliesLevel(b, s));
        }
        return f;
    }

    // => (right-assoc)
    Formula impliesLevel(const SystemBuilder& b, StateId s) {
        Formula f = xorLevel(b, s);
        if (cur().kind == Tok::Implies) {
            ++i_;
            return Formula::implies(f, impliesLevel(b, s));
        }
        return f;
    }

    Formula xorLevel(const SystemBuilder& b, StateId s) {
        Formula f = orLevel(b, s);
        while (isKeyword("xor")) {
            ++i_;
            f = Formula::exclusiveOr(f, orLevel(b, s));
        }
        return f;
    }

    Formula orLevel(const SystemBuilder& b, StateId s) {
        Formula f = andLevel(b, s);
        while (cur().kind == Tok::OrOr) {
            ++i_;
            f = Formula::disj(f, andLevel(b, s));
        }
        return f;
    }

    Formula andLevel(const SystemBuilder& b, StateId s) {
        Formula f = unary(b, s);
        while (cur().kind == Tok::AndAnd) {
            ++i_;
            f = Formula::conj(f, unary(b, s));
        }
        return f;
    }

    Formula unary(const SystemBuilder& b, StateId s) {
        if (cur().kind == Tok::Bang) {
            ++i_;
            return Formula::negation(unary(b, s));
        }
        return primary(b, s);
    }

    Formula primary(const SystemBuilder& b, StateId s) {
        const Token& t = cur();
        if (t.kind == Tok::LParen && at(1).kind == Tok::Name && at(2).kind == Tok::Comma) {
            const Token& open = t;
            i_ += 1;
            const Token& act = expect(Tok::Name);
            expect(Tok::Comma);
            const Token& dst = expect(Tok::Name);
            const Token& close = expect(Tok::RParen);
            Token whole = open;
            whole.span.end = close.span.end;
            StateId target = resolveState(b, dst);
            auto a = b.findAction(act.text);
            if (!a || !b.hasTransition(s, *a, target))
                fail(whole, ErrorCode::AtomWithoutTransition,
                     "atom (" + act.text + "," + dst.text + ") has no matching transition");
            return Formula::trans(*a, target);
        }
        if (t.kind == Tok::LParen) {
            ++i_;
            Formula f = iffLevel(b, s);
            expect(Tok::RParen);
            return f;
        }
        if (t.kind == Tok::Name) {
            if (!t.quoted && t.text == "tt") {
                ++i_;
                return Formula::tt();
            }
            if (!t.quoted && t.text == "ff") {
                ++i_;
                return Formula::ff();
            }
            if (!t.quoted && t.text == "xor") fail(t, ErrorCode::SyntaxError, "unexpected 'xor'");
            auto p = b.findParam(t.text);
            if (!p) fail(t, ErrorCode::UndeclaredName, "undeclared parameter '" + t.text + "'");
            ++i_;
            return Formula::param(*p);
        }
        fail(t, ErrorCode::SyntaxError, "expected a formula, found " + describe(t));
    }
};

// Binding strength of the serialized core connectives.
int strength(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Or: return 1;
    case FormulaKind::And: return 2;
    default: return 3;
    }
}

void writeFormula(std::ostream& os, const TransitionSystem& sys, const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: os << "tt"; return;
    case FormulaKind::Trans:
        os << '(' << formatName(sys.actionName(f.action())) << ',' << formatName(sys.stateName(f.target())) << ')';
        return;
    case FormulaKind::Param: os << formatName(sys.paramName(f.param())); return;
    case FormulaKind::Not:
        if (f.child().isTrue()) {
            os << "ff";
            return;
        }
        os << '!';
        if (strength(f.child()) < 3) {
            os << '(';
            writeFormula(os, sys, f.child());
            os << ')';
        } else {
            writeFormula(os, sys, f.child());
        }
        return;
    case FormulaKind::And:
    case FormulaKind::Or: {
        const int mine = strength(f);
        const bool lp = strength(f.left()) < mine;
        const bool rp = strength(f.right()) <= mine;
        if (lp) os << '(';
        writeFormula(os, sys, f.left());
        if (lp) os << ')';
        os << (f.kind() == FormulaKind::And ? " && " : " || ");
        if (rp) os << '(';
        writeFormula(os, sys, f.right());
        if (rp) os << ')';
        return;
    }
    }
}

}  // namespace

std::vector<TransitionSystem> parseSystems(std::string_view text) {
    Parser p(Lexer(text).run());
    return p.systems();
}

TransitionSystem parseSystem(std::string_view text) {
    auto all = parseSystems(text);
    if (all.size() != 1)
        throw Error(ErrorCode::SyntaxError, "expected exactly one system, found " + std::to_string(all.size()));
    return std::move(all.front());
}

std::string formatName(std::string_view name) {
    bool plain = !name.empty() && name != "tt" && name != "ff" && name != "xor";
    for (char c : name) plain = plain && isIdentChar(c);
    if (plain) return std::string(name);
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string serializeFormula(const TransitionSystem& sys, const Formula& phi) {
    std::ostringstream os;
    writeFormula(os, sys, phi);
    return os.str();
}

std::string serializeSystem(const TransitionSystem& sys) {
    std::ostringstream os;
    auto list = [&](const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : " ") << formatName(names[i]);
        os << ";\n";
    };
    os << "system " << formatName(sys.name()) << " {\n";
    if (sys.paramCount() > 0) {
        os << "  params:";
        list(sys.paramNames());
    }
    os << "  states:";
    list(sys.stateNames());
    if (sys.initial()) os << "  init: " << formatName(sys.stateName(*sys.initial())) << ";\n";
    if (!sys.transitions().empty()) {
        os << "  trans:\n";
        for (const auto& t : sys.transitions())
            os << "    " << formatName(sys.stateName(t.source)) << " -" << formatName(sys.actionName(t.action))
               << "-> " << formatName(sys.stateName(t.target)) << ";\n";
    }
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        if (sys.obligation(s).isTrue()) continue;
        os << "  phi " << formatName(sys.stateName(s)) << " = " << serializeFormula(sys, sys.obligation(s)) << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace mtsref
