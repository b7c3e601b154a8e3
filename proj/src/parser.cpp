#include <cctype>
#include <set>

#include "fx/text.hpp"

namespace fx {

namespace {

enum class Tok { Ident, UIdent, Num, Sym, Keyword, End };

struct Token {
    Tok kind;
    std::string text;
    std::uint64_t num = 0;
    int line = 1, column = 1;
};

const std::set<std::string> kKeywords = {"let",  "in",     "fun",    "rec",       "return", "do",   "handle",
                                         "with", "case",   "inl",    "inr",       "if",     "then", "else",
                                         "letref", "memoise", "true", "false", "operation", "data", "val"};

// longest first
const char* kSymbols[] = {"->", "<-", ":=", "::", "&&", "||", "(", ")", "{", "}", "[", "]", ",", ";",
                          ":",  "=",  "<",  "+",  "-",  "*",  "!",  "|", "_"};

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t{Tok::End, "", 0, line, col};
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Num;
            t.text = src.substr(i, j - i);
            try {
                t.num = std::stoull(t.text);
            } catch (const std::exception&) {
                throw SyntaxError("numeral out of range", line, col);
            }
            advance(j - i);
            out.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || (c == '_' && i + 1 < src.size() &&
                                                            (std::isalnum(static_cast<unsigned char>(src[i + 1])) ||
                                                             src[i + 1] == '_'))) {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            t.text = src.substr(i, j - i);
            if (kKeywords.count(t.text)) t.kind = Tok::Keyword;
            else if (std::isupper(static_cast<unsigned char>(c))) t.kind = Tok::UIdent;
            else t.kind = Tok::Ident;
            advance(j - i);
            out.push_back(t);
            continue;
        }
        bool matched = false;
        for (const char* sym : kSymbols) {
            std::size_t len = std::char_traits<char>::length(sym);
            if (src.compare(i, len, sym) == 0) {
                t.kind = Tok::Sym;
                t.text = sym;
                advance(len);
                out.push_back(t);
                matched = true;
                break;
            }
        }
        if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(Token{Tok::End, "<end of input>", 0, line, col});
    return out;
}

/// An expression elaborated so far: the let-bindings it needs, then a value or a computation.
struct Elab {
    std::vector<std::pair<Var, CompPtr>> binds;
    ValuePtr value;
    CompPtr comp;
};

Elab fromValue(ValuePtr v) { return Elab{{}, std::move(v), nullptr}; }
Elab fromComp(CompPtr m) { return Elab{{}, nullptr, std::move(m)}; }

CompPtr wrapBinds(const std::vector<std::pair<Var, CompPtr>>& binds, CompPtr body) {
    for (auto it = binds.rbegin(); it != binds.rend(); ++it) body = build::let(it->first, it->second, body);
    return body;
}

CompPtr toComp(Elab e) { return wrapBinds(e.binds, e.comp ? e.comp : build::ret(e.value)); }

/// Moves e's bindings into `out` and names its result.
ValuePtr toValue(Elab e, std::vector<std::pair<Var, CompPtr>>& out) {
    for (auto& b : e.binds) out.push_back(std::move(b));
    if (e.value) return e.value;
    Var x = Var::fresh("t");
    out.emplace_back(x, e.comp);
    return build::var(x);
}

struct Pattern {
    Var var;
    TypePtr ann;
    std::optional<std::pair<Var, Var>> pair;
};

class Parser {
public:
    Parser(const std::string& src, Signature sig) : toks_(lex(src)), sig_(std::move(sig)) {}

    Program program() {
        Program p;
        for (;;) {
            if (isKeyword("operation")) {
                next();
                Token name = expectKind(Tok::UIdent, "operation name");
                expectSym(":");
                TypePtr t = type();
                if (t->kind != TypeKind::Arrow) fail("operation type must be an arrow", name);
                if (sig_.count(name.text)) fail("duplicate operation " + name.text, name);
                sig_[name.text] = OpType{t->first, t->second};
            } else if (isKeyword("data")) {
                next();
                Token name = expectKind(Tok::UIdent, "data type name");
                expectSym("=");
                std::vector<std::string> ctors;
                for (;;) {
                    Token c = expectKind(Tok::UIdent, "constructor");
                    ctors.push_back(c.text);
                    if (!isSym("|")) break;
                    next();
                }
                TypePtr t = types::named(name.text, ctors);
                data_[name.text] = t;
                for (std::size_t i = 0; i < ctors.size(); ++i) ctors_[ctors[i]] = {t, i};
                p.data.push_back(t);
            } else {
                break;
            }
        }
        p.body = toComp(expr());
        if (peek().kind != Tok::End) fail("unexpected " + peek().text, peek());
        p.sig = sig_;
        return p;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Signature sig_;
    std::map<std::string, TypePtr> data_;
    std::map<std::string, std::pair<TypePtr, std::size_t>> ctors_;
    std::vector<std::pair<std::string, Var>> scope_;
    std::map<std::string, Var> free_;

    // ------------------------------------------------------------ tokens

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool isSym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
    bool isKeyword(const char* s, std::size_t k = 0) const {
        return peek(k).kind == Tok::Keyword && peek(k).text == s;
    }
    [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw SyntaxError(msg, t.line, t.column); }
    void expectSym(const char* s) {
        if (!isSym(s)) fail(std::string("expected '") + s + "' but found '" + peek().text + "'", peek());
        next();
    }
    void expectKeyword(const char* s) {
        if (!isKeyword(s)) fail(std::string("expected '") + s + "' but found '" + peek().text + "'", peek());
        next();
    }
    Token expectKind(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what + " but found '" + peek().text + "'", peek());
        return next();
    }

    // ------------------------------------------------------------ scope

    Var lookup(const std::string& name) {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->first == name) return it->second;
        auto f = free_.find(name);
        if (f != free_.end()) return f->second;
        Var v = Var::fresh(name);
        free_[name] = v;
        return v;
    }

    template <class F>
    auto scoped(std::vector<Var> vars, F&& f) {
        for (const auto& v : vars)
            if (v.name != "_") scope_.emplace_back(v.name, v);
        std::size_t pushed = 0;
        for (const auto& v : vars) pushed += v.name != "_";
        auto r = f();
        scope_.resize(scope_.size() - pushed);
        return r;
    }

    Var binder() {
        if (isSym("_")) {
            next();
            return Var::fresh("_");
        }
        return Var::fresh(expectKind(Tok::Ident, "identifier").text);
    }

    // ------------------------------------------------------------ types

    TypePtr type() {
        TypePtr a = sumType();
        if (isSym("->")) {
            next();
            return types::arrow(a, type());
        }
        return a;
    }
    TypePtr sumType() {
        TypePtr a = productType();
        if (isSym("+")) {
            next();
            return types::sum(a, sumType());
        }
        return a;
    }
    TypePtr productType() {
        TypePtr a = prefixType();
        if (isSym("*")) {
            next();
            return types::product(a, productType());
        }
        return a;
    }
    TypePtr prefixType() {
        const Token& t = peek();
        if (t.kind == Tok::UIdent && t.text == "Ref") {
            next();
            return types::ref(prefixType());
        }
        if (t.kind == Tok::UIdent && t.text == "List") {
            next();
            return types::list(prefixType());
        }
        return atomType();
    }
    TypePtr atomType() {
        Token t = next();
        if (t.kind == Tok::Sym && t.text == "(") {
            TypePtr a = type();
            expectSym(")");
            return a;
        }
        if (t.kind == Tok::UIdent) {
            if (t.text == "Nat") return types::nat();
            if (t.text == "Unit") return types::unit();
            if (t.text == "Bool") return types::boolean();
            auto it = data_.find(t.text);
            if (it != data_.end()) return it->second;
            fail("unknown type " + t.text, t);
        }
        fail("expected a type but found '" + t.text + "'", t);
    }

    // ------------------------------------------------------------ patterns

    Pattern pattern() {
        if (isSym("(")) {
            if (isSym(")", 1)) {
                next();
                next();
                return Pattern{Var::fresh("_"), types::unit(), std::nullopt};
            }
            next();
            Var a = binder();
            if (isSym(":")) {
                next();
                TypePtr t = type();
                expectSym(")");
                return Pattern{a, t, std::nullopt};
            }
            expectSym(",");
            Var b = binder();
            expectSym(")");
            return Pattern{Var::fresh("p"), nullptr, std::make_pair(a, b)};
        }
        return Pattern{binder(), nullptr, std::nullopt};
    }

    std::vector<Var> patternVars(const Pattern& p) {
        if (p.pair) return {p.pair->first, p.pair->second};
        return {p.var};
    }

    CompPtr underPattern(const Pattern& p, CompPtr body) {
        if (!p.pair) return body;
        return build::split(p.pair->first, p.pair->second, build::var(p.var), body);
    }

    // ------------------------------------------------------------ expressions

    bool startsKeywordForm() const {
        return isKeyword("let") || isKeyword("fun") || isKeyword("rec") || isKeyword("if") || isKeyword("case") ||
               isKeyword("handle") || isKeyword("letref");
    }

    Elab expr() {
        if (startsKeywordForm()) return keywordForm();
        return seq();
    }

    Elab keywordForm() {
        Token t = next();
        const std::string& kw = t.text;
        if (kw == "let") return letForm();
        if (kw == "fun") return funForm();
        if (kw == "rec") return recForm();
        if (kw == "if") {
            std::vector<std::pair<Var, CompPtr>> binds;
            ValuePtr c = toValue(expr(), binds);
            expectKeyword("then");
            CompPtr a = toComp(expr());
            expectKeyword("else");
            CompPtr b = toComp(expr());
            Elab e = fromComp(build::ifThenElse(c, a, b));
            e.binds = std::move(binds);
            return e;
        }
        if (kw == "case") return caseForm();
        if (kw == "handle") return handleForm();
        if (kw == "letref") {
            Var x = binder();
            expectSym("=");
            std::vector<std::pair<Var, CompPtr>> binds;
            ValuePtr init = toValue(expr(), binds);
            expectKeyword("in");
            CompPtr body = scoped({x}, [&] { return toComp(expr()); });
            Elab e = fromComp(build::letref(x, init, body));
            e.binds = std::move(binds);
            return e;
        }
        fail("unexpected " + kw, t);
    }

    Elab letForm() {
        if (isSym("(")) {
            next();
            Var a = binder();
            expectSym(",");
            Var b = binder();
            expectSym(")");
            expectSym("=");
            std::vector<std::pair<Var, CompPtr>> binds;
            ValuePtr v = toValue(expr(), binds);
            expectKeyword("in");
            CompPtr body = scoped({a, b}, [&] { return toComp(expr()); });
            Elab e = fromComp(build::split(a, b, v, body));
            e.binds = std::move(binds);
            return e;
        }
        Var x = binder();
        if (!isSym("<-") && !isSym("=")) fail("expected '<-' or '=' in let", peek());
        next();
        CompPtr bound = toComp(expr());
        expectKeyword("in");
        CompPtr body = scoped({x}, [&] { return toComp(expr()); });
        return fromComp(build::let(x, bound, body));
    }

    Elab funForm() {
        std::vector<Pattern> params;
        while (!isSym("->")) params.push_back(pattern());
        if (params.empty()) fail("fun needs a parameter", peek());
        next();
        std::vector<Var> all;
        for (const auto& p : params)
            for (const auto& v : patternVars(p)) all.push_back(v);
        CompPtr body = scoped(all, [&] { return toComp(expr()); });
        ValuePtr f;
        for (auto it = params.rbegin(); it != params.rend(); ++it) {
            CompPtr inner = underPattern(*it, body);
            f = build::lam(it->var, inner, it->ann);
            body = build::ret(f);
        }
        return fromValue(f);
    }

    Elab recForm() {
        Var self = Var::fresh(expectKind(Tok::Ident, "function name").text);
        Pattern p = pattern();
        TypePtr result;
        if (isSym(":")) {
            next();
            result = sumType();  // an arrow result type needs parentheses
        }
        expectSym("->");
        std::vector<Var> vars = {self};
        for (const auto& v : patternVars(p)) vars.push_back(v);
        CompPtr body = scoped(vars, [&] { return toComp(expr()); });
        return fromValue(build::rec(self, p.var, underPattern(p, body), p.ann, result));
    }

    Elab caseForm() {
        std::vector<std::pair<Var, CompPtr>> binds;
        ValuePtr v = toValue(expr(), binds);
        expectSym("{");
        expectKeyword("inl");
        Pattern pl = pattern();
        expectSym("->");
        CompPtr left = scoped(patternVars(pl), [&] { return underPattern(pl, toComp(expr())); });
        expectSym(";");
        expectKeyword("inr");
        Pattern pr = pattern();
        expectSym("->");
        CompPtr right = scoped(patternVars(pr), [&] { return underPattern(pr, toComp(expr())); });
        expectSym("}");
        Elab e = fromComp(build::caseOf(v, pl.var, left, pr.var, right));
        e.binds = std::move(binds);
        return e;
    }

    Elab handleForm() {
        CompPtr body = toComp(expr());
        expectKeyword("with");
        expectSym("{");
        Handler h;
        bool sawVal = false;
        for (;;) {
            if (isKeyword("val")) {
                Token t = next();
                if (sawVal) fail("handler has two val clauses", t);
                sawVal = true;
                Pattern p = pattern();
                expectSym("->");
                h.valVar = p.var;
                h.valBody = scoped(patternVars(p), [&] { return underPattern(p, toComp(expr())); });
            } else {
                Token op = expectKind(Tok::UIdent, "operation clause");
                if (!sig_.count(op.text)) fail("unknown operation " + op.text, op);
                if (h.find(op.text)) fail("duplicate clause for " + op.text, op);
                Pattern p = pattern();
                Var r = binder();
                expectSym("->");
                std::vector<Var> vars = patternVars(p);
                vars.push_back(r);
                CompPtr b = scoped(vars, [&] { return underPattern(p, toComp(expr())); });
                h.clauses.push_back(OpClause{op.text, p.var, r, b});
            }
            if (isSym("|")) {
                next();
                continue;
            }
            expectSym("}");
            break;
        }
        if (!sawVal) {
            Var x = Var::fresh("x");
            h.valVar = x;
            h.valBody = build::ret(build::var(x));
        }
        return fromComp(build::handle(body, std::make_shared<const Handler>(std::move(h))));
    }

    Elab seq() {
        Elab first = assign();
        // `; inr` closes a case arm instead of sequencing
        if (isSym(";") && !isKeyword("inr", 1)) {
            next();
            CompPtr rest = toComp(expr());
            return fromComp(build::let(Var::fresh("_"), toComp(std::move(first)), rest));
        }
        return first;
    }

    Elab binary(Elab a, Elab b, auto combine) {
        Elab out;
        ValuePtr va = toValue(std::move(a), out.binds);
        ValuePtr vb = toValue(std::move(b), out.binds);
        Elab r = combine(va, vb);
        for (auto& x : r.binds) out.binds.push_back(std::move(x));
        out.value = r.value;
        out.comp = r.comp;
        return out;
    }

    Elab assign() {
        Elab a = orExpr();
        if (isSym(":=")) {
            next();
            Elab b = orExpr();
            return binary(std::move(a), std::move(b),
                          [](ValuePtr r, ValuePtr v) { return fromComp(build::assign(r, v)); });
        }
        return a;
    }

    Elab orExpr() {
        Elab a = andExpr();
        while (isSym("||")) {
            next();
            Elab b = andExpr();
            Elab out;
            ValuePtr va = toValue(std::move(a), out.binds);
            out.comp = build::ifThenElse(va, build::ret(build::boolean(true)), toComp(std::move(b)));
            a = std::move(out);
        }
        return a;
    }

    Elab andExpr() {
        Elab a = cmpExpr();
        while (isSym("&&")) {
            next();
            Elab b = cmpExpr();
            Elab out;
            ValuePtr va = toValue(std::move(a), out.binds);
            out.comp = build::ifThenElse(va, toComp(std::move(b)), build::ret(build::boolean(false)));
            a = std::move(out);
        }
        return a;
    }

    Elab cmpExpr() {
        Elab a = consExpr();
        if (isSym("=")) {
            next();
            Elab b = consExpr();
            return binary(std::move(a), std::move(b), [](ValuePtr x, ValuePtr y) {
                return fromComp(build::app(build::constant(ConstOp::Eq), build::pair(x, y)));
            });
        }
        if (isSym("<")) {
            next();
            Elab b = consExpr();
            // a < b  iff  (b - a) is not zero
            return binary(std::move(a), std::move(b), [](ValuePtr x, ValuePtr y) {
                Var d = Var::fresh("d"), z = Var::fresh("z");
                return fromComp(build::let(
                    d, build::app(build::constant(ConstOp::Minus), build::pair(y, x)),
                    build::let(z, build::app(build::constant(ConstOp::Eq), build::pair(build::var(d), build::num(0))),
                               build::ifThenElse(build::var(z), build::ret(build::boolean(false)),
                                                 build::ret(build::boolean(true))))));
            });
        }
        return a;
    }

    Elab consExpr() {
        Elab a = addExpr();
        if (isSym("::")) {
            next();
            Elab b = consExpr();
            return binary(std::move(a), std::move(b), [](ValuePtr h, ValuePtr t) {
                return fromValue(build::inr(build::pair(h, t), types::list(types::hole())));
            });
        }
        return a;
    }

    Elab addExpr() {
        Elab a = appExpr();
        while (isSym("+") || isSym("-")) {
            ConstOp op = next().text == "+" ? ConstOp::Plus : ConstOp::Minus;
            Elab b = appExpr();
            a = binary(std::move(a), std::move(b), [op](ValuePtr x, ValuePtr y) {
                return fromComp(build::app(build::constant(op), build::pair(x, y)));
            });
        }
        return a;
    }

    bool startsAtom() const {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Ident:
            case Tok::Num: return true;
            case Tok::UIdent: return ctors_.count(t.text) != 0;
            case Tok::Keyword: return t.text == "true" || t.text == "false";
            case Tok::Sym: return t.text == "(" || t.text == "[";
            default: return false;
        }
    }

    Elab appExpr() {
        Elab f = prefixExpr();
        while (startsAtom()) {
            Elab a = atom();
            f = binary(std::move(f), std::move(a), [](ValuePtr x, ValuePtr y) { return fromComp(build::app(x, y)); });
        }
        return f;
    }

    Elab unaryValue(Elab a, auto make) {
        Elab out;
        ValuePtr v = toValue(std::move(a), out.binds);
        Elab r = make(v);
        out.value = r.value;
        out.comp = r.comp;
        return out;
    }

    Elab prefixExpr() {
        if (isSym("!")) {
            next();
            return unaryValue(atom(), [](ValuePtr v) { return fromComp(build::deref(v)); });
        }
        if (isKeyword("do")) {
            next();
            Token op = expectKind(Tok::UIdent, "operation name");
            if (!sig_.count(op.text)) fail("unknown operation " + op.text, op);
            std::string name = op.text;
            return unaryValue(atom(), [name](ValuePtr v) { return fromComp(build::perform(name, v)); });
        }
        if (isKeyword("return")) {
            next();
            return unaryValue(atom(), [](ValuePtr v) { return fromComp(build::ret(v)); });
        }
        if (isKeyword("inl") || isKeyword("inr")) {
            bool left = next().text == "inl";
            return unaryValue(atom(), [left](ValuePtr v) {
                return fromValue(left ? build::inl(v) : build::inr(v));
            });
        }
        if (isKeyword("memoise")) {
            next();
            return unaryValue(atom(), [](ValuePtr v) { return fromComp(build::memoise(v)); });
        }
        return atom();
    }

    ValuePtr ctorValue(std::size_t index, std::size_t count, TypePtr ann) {
        if (count <= 1) return build::unit();
        if (index == 0) return build::inl(build::unit(), ann);
        TypePtr rest = count - 1 >= 2 ? types::underlying(Type{TypeKind::Named, nullptr, nullptr, "",
                                                                std::vector<std::string>(count - 1), 0})
                                      : nullptr;
        return build::inr(ctorValue(index - 1, count - 1, rest), ann);
    }

    Elab atom() {
        if (startsKeywordForm()) return keywordForm();
        Token t = next();
        switch (t.kind) {
            case Tok::Num: return fromValue(build::num(t.num));
            case Tok::Ident: return fromValue(build::var(lookup(t.text)));
            case Tok::UIdent: {
                auto it = ctors_.find(t.text);
                if (it == ctors_.end()) fail("unknown constructor " + t.text, t);
                const auto& [type, index] = it->second;
                return fromValue(ctorValue(index, type->ctors.size(), type));
            }
            case Tok::Keyword:
                if (t.text == "true") return fromValue(build::boolean(true));
                if (t.text == "false") return fromValue(build::boolean(false));
                break;
            case Tok::Sym:
                if (t.text == "(") return parenthesised();
                if (t.text == "[") return listLiteral();
                break;
            default: break;
        }
        fail("unexpected '" + t.text + "'", t);
    }

    Elab parenthesised() {
        if (isSym(")")) {
            next();
            return fromValue(build::unit());
        }
        if ((isSym("+") || isSym("-") || isSym("=")) && isSym(")", 1)) {
            std::string op = next().text;
            next();
            return fromValue(build::constant(op == "+" ? ConstOp::Plus : op == "-" ? ConstOp::Minus : ConstOp::Eq));
        }
        Elab a = expr();
        if (isSym(",")) {
            next();
            Elab b = expr();
            expectSym(")");
            return binary(std::move(a), std::move(b),
                          [](ValuePtr x, ValuePtr y) { return fromValue(build::pair(x, y)); });
        }
        expectSym(")");
        return a;
    }

    Elab listLiteral() {
        Elab out;
        std::vector<ValuePtr> items;
        if (!isSym("]")) {
            for (;;) {
                items.push_back(toValue(expr(), out.binds));
                if (!isSym(",")) break;
                next();
            }
        }
        expectSym("]");
        TypePtr ann = types::list(types::hole());
        ValuePtr acc = build::inl(build::unit(), ann);
        for (auto it = items.rbegin(); it != items.rend(); ++it) acc = build::inr(build::pair(*it, acc), ann);
        out.value = acc;
        return out;
    }
};

}  // namespace

Program parseProgram(const std::string& source) { return Parser(source, {}).program(); }

CompPtr parseTerm(const std::string& source, const Signature& sig) { return Parser(source, sig).program().body; }

}  // namespace fx
