#include "fx/syntax.hpp"

#include <atomic>
#include <functional>

namespace fx {

// ---------------------------------------------------------------- types

namespace types {

namespace {
TypePtr make(TypeKind k, TypePtr a = nullptr, TypePtr b = nullptr) {
    return std::make_shared<const Type>(Type{k, std::move(a), std::move(b), {}, {}, 0});
}
}  // namespace

TypePtr nat() {
    static const TypePtr t = make(TypeKind::Nat);
    return t;
}
TypePtr unit() {
    static const TypePtr t = make(TypeKind::Unit);
    return t;
}
TypePtr boolean() {
    static const TypePtr t = make(TypeKind::Sum, unit(), unit());
    return t;
}
TypePtr arrow(TypePtr a, TypePtr b) { return make(TypeKind::Arrow, std::move(a), std::move(b)); }
TypePtr product(TypePtr a, TypePtr b) { return make(TypeKind::Product, std::move(a), std::move(b)); }
TypePtr sum(TypePtr a, TypePtr b) { return make(TypeKind::Sum, std::move(a), std::move(b)); }
TypePtr ref(TypePtr a) { return make(TypeKind::Ref, std::move(a)); }
TypePtr list(TypePtr a) { return make(TypeKind::List, std::move(a)); }
TypePtr named(std::string name, std::vector<std::string> ctors) {
    return std::make_shared<const Type>(Type{TypeKind::Named, nullptr, nullptr, std::move(name), std::move(ctors), 0});
}
TypePtr meta(std::uint32_t id) {
    return std::make_shared<const Type>(Type{TypeKind::Meta, nullptr, nullptr, {}, {}, id});
}
TypePtr hole() {
    static const TypePtr t = make(TypeKind::Hole);
    return t;
}

TypePtr underlying(const Type& t) {
    std::size_t k = t.ctors.size();
    if (k <= 1) return unit();
    TypePtr acc = unit();
    for (std::size_t i = 1; i < k; ++i) acc = sum(unit(), acc);
    return acc;
}

TypePtr unfold(const Type& t) { return sum(unit(), product(t.first, list(t.first))); }

bool isBool(const Type& t) {
    return t.kind == TypeKind::Sum && t.first->kind == TypeKind::Unit && t.second->kind == TypeKind::Unit;
}

bool equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case TypeKind::Nat:
        case TypeKind::Unit:
        case TypeKind::Hole: return true;
        case TypeKind::Meta: return a->meta == b->meta;
        case TypeKind::Named: return a->name == b->name;
        case TypeKind::Ref:
        case TypeKind::List: return equal(a->first, b->first);
        default: return equal(a->first, b->first) && equal(a->second, b->second);
    }
}

}  // namespace types

namespace {
// 0: arrow, 1: sum, 2: product, 3: prefix/atom
std::string typeString(const TypePtr& t, int prec) {
    if (!t) return "_";
    auto wrap = [&](int p, std::string s) { return p < prec ? "(" + s + ")" : s; };
    switch (t->kind) {
        case TypeKind::Nat: return "Nat";
        case TypeKind::Unit: return "Unit";
        case TypeKind::Hole: return "_";
        case TypeKind::Meta: return "'t" + std::to_string(t->meta);
        case TypeKind::Named: return t->name;
        case TypeKind::Ref: return wrap(3, "Ref " + typeString(t->first, 3));
        case TypeKind::List: return wrap(3, "List " + typeString(t->first, 3));
        case TypeKind::Arrow: return wrap(0, typeString(t->first, 1) + " -> " + typeString(t->second, 0));
        case TypeKind::Sum:
            if (types::isBool(*t)) return "Bool";
            return wrap(1, typeString(t->first, 2) + " + " + typeString(t->second, 1));
        case TypeKind::Product: return wrap(2, typeString(t->first, 3) + " * " + typeString(t->second, 2));
    }
    return "?";
}
}  // namespace

std::string toString(const TypePtr& t) { return typeString(t, 0); }

// ---------------------------------------------------------------- binders

Var Var::fresh(std::string name) {
    static std::atomic<std::uint32_t> counter{1};
    return Var{counter.fetch_add(1), std::move(name)};
}

const OpClause* Handler::find(const std::string& op) const {
    for (const auto& c : clauses)
        if (c.op == op) return &c;
    return nullptr;
}

// ---------------------------------------------------------------- builders

namespace build {

namespace {
ValuePtr mkv(auto node) { return std::make_shared<const Value>(Value{std::move(node)}); }
CompPtr mkc(auto node) { return std::make_shared<const Comp>(Comp{std::move(node)}); }
}  // namespace

ValuePtr var(const Var& x) { return mkv(VVar{x}); }
ValuePtr num(std::uint64_t n) { return mkv(VNum{n}); }
ValuePtr constant(ConstOp op) { return mkv(VConst{op}); }
ValuePtr lam(const Var& x, CompPtr body, TypePtr paramType) {
    return mkv(VLam{x, std::move(paramType), std::move(body)});
}
ValuePtr rec(const Var& f, const Var& x, CompPtr body, TypePtr paramType, TypePtr resultType) {
    return mkv(VRec{f, x, std::move(paramType), std::move(resultType), std::move(body)});
}
ValuePtr unit() {
    static const ValuePtr u = mkv(VUnit{});
    return u;
}
ValuePtr pair(ValuePtr a, ValuePtr b) { return mkv(VPair{std::move(a), std::move(b)}); }
ValuePtr inl(ValuePtr v, TypePtr ann) { return mkv(VInj{true, std::move(v), std::move(ann)}); }
ValuePtr inr(ValuePtr v, TypePtr ann) { return mkv(VInj{false, std::move(v), std::move(ann)}); }
ValuePtr boolean(bool b) {
    static const ValuePtr t = inl(unit(), types::boolean());
    static const ValuePtr f = inr(unit(), types::boolean());
    return b ? t : f;
}
ValuePtr loc(std::uint64_t index) { return mkv(VLoc{index}); }

CompPtr app(ValuePtr f, ValuePtr a) { return mkc(CApp{std::move(f), std::move(a)}); }
CompPtr split(const Var& x, const Var& y, ValuePtr pair, CompPtr body) {
    return mkc(CSplit{x, y, std::move(pair), std::move(body)});
}
CompPtr caseOf(ValuePtr v, const Var& x, CompPtr left, const Var& y, CompPtr right) {
    return mkc(CCase{std::move(v), x, std::move(left), y, std::move(right)});
}
CompPtr ifThenElse(ValuePtr cond, CompPtr thenBranch, CompPtr elseBranch) {
    return caseOf(std::move(cond), Var::fresh("_"), std::move(thenBranch), Var::fresh("_"), std::move(elseBranch));
}
CompPtr ret(ValuePtr v) { return mkc(CReturn{std::move(v)}); }
CompPtr let(const Var& x, CompPtr bound, CompPtr body) { return mkc(CLet{x, std::move(bound), std::move(body)}); }
CompPtr perform(std::string op, ValuePtr arg) { return mkc(CDo{std::move(op), std::move(arg)}); }
CompPtr handle(CompPtr body, HandlerPtr h) { return mkc(CHandle{std::move(body), std::move(h)}); }
CompPtr letref(const Var& x, ValuePtr init, CompPtr body) { return mkc(CLetRef{x, std::move(init), std::move(body)}); }
CompPtr deref(ValuePtr r) { return mkc(CDeref{std::move(r)}); }
CompPtr assign(ValuePtr r, ValuePtr v) { return mkc(CAssign{std::move(r), std::move(v)}); }
CompPtr memoise(ValuePtr thunk) { return mkc(CMemoise{std::move(thunk)}); }

}  // namespace build

// ---------------------------------------------------------------- generic traversals

namespace {

struct NodeTest {
    std::function<bool(const Comp&)> comp;
    std::function<bool(const Value&)> value;
};

bool anyValue(const ValuePtr& v, const NodeTest& t);

bool anyComp(const CompPtr& m, const NodeTest& t) {
    if (!m) return false;
    if (t.comp && t.comp(*m)) return true;
    return std::visit(
        overloaded{
            [&](const CApp& c) { return anyValue(c.fn, t) || anyValue(c.arg, t); },
            [&](const CSplit& c) { return anyValue(c.pair, t) || anyComp(c.body, t); },
            [&](const CCase& c) { return anyValue(c.scrutinee, t) || anyComp(c.left, t) || anyComp(c.right, t); },
            [&](const CReturn& c) { return anyValue(c.value, t); },
            [&](const CLet& c) { return anyComp(c.bound, t) || anyComp(c.body, t); },
            [&](const CDo& c) { return anyValue(c.arg, t); },
            [&](const CHandle& c) {
                if (anyComp(c.body, t) || anyComp(c.handler->valBody, t)) return true;
                for (const auto& cl : c.handler->clauses)
                    if (anyComp(cl.body, t)) return true;
                return false;
            },
            [&](const CLetRef& c) { return anyValue(c.init, t) || anyComp(c.body, t); },
            [&](const CDeref& c) { return anyValue(c.ref, t); },
            [&](const CAssign& c) { return anyValue(c.ref, t) || anyValue(c.value, t); },
            [&](const CMemoise& c) { return anyValue(c.thunk, t); },
        },
        m->node);
}

bool anyValue(const ValuePtr& v, const NodeTest& t) {
    if (!v) return false;
    if (t.value && t.value(*v)) return true;
    return std::visit(overloaded{
                          [&](const VLam& l) { return anyComp(l.body, t); },
                          [&](const VRec& r) { return anyComp(r.body, t); },
                          [&](const VPair& p) { return anyValue(p.first, t) || anyValue(p.second, t); },
                          [&](const VInj& i) { return anyValue(i.payload, t); },
                          [](const auto&) { return false; },
                      },
                      v->node);
}

const NodeTest handlerTest{
    [](const Comp& c) { return std::holds_alternative<CDo>(c.node) || std::holds_alternative<CHandle>(c.node); },
    nullptr};
const NodeTest stateTest{
    [](const Comp& c) {
        return std::holds_alternative<CLetRef>(c.node) || std::holds_alternative<CDeref>(c.node) ||
               std::holds_alternative<CAssign>(c.node);
    },
    [](const Value& v) { return std::holds_alternative<VLoc>(v.node); }};
const NodeTest memoTest{[](const Comp& c) { return std::holds_alternative<CMemoise>(c.node); }, nullptr};

NodeTest handlesTest(const std::string& op) {
    return NodeTest{[op](const Comp& c) {
                        auto h = std::get_if<CHandle>(&c.node);
                        return h && h->handler->find(op) != nullptr;
                    },
                    nullptr};
}

}  // namespace

bool usesHandlers(const CompPtr& m) { return anyComp(m, handlerTest); }
bool usesState(const CompPtr& m) { return anyComp(m, stateTest); }
bool usesMemoise(const CompPtr& m) { return anyComp(m, memoTest); }
bool usesHandlers(const ValuePtr& v) { return anyValue(v, handlerTest); }
bool usesState(const ValuePtr& v) { return anyValue(v, stateTest); }
bool usesMemoise(const ValuePtr& v) { return anyValue(v, memoTest); }
bool handlesOperation(const CompPtr& m, const std::string& op) { return anyComp(m, handlesTest(op)); }
bool handlesOperation(const ValuePtr& v, const std::string& op) { return anyValue(v, handlesTest(op)); }

// ---------------------------------------------------------------- rewriting

namespace {

/// Structure-preserving rewrite; returns the original pointer when nothing changed.
struct Rewriter {
    std::function<ValuePtr(const Value&, const ValuePtr&)> onVar;  // may return null for "unchanged"
    std::function<HandlerPtr(const HandlerPtr&)> onHandler;         // applied after children
    std::function<bool(const Var&)> shadows;                        // binder hides the rewrite

    ValuePtr value(const ValuePtr& v) const {
        return std::visit(
            overloaded{
                [&](const VVar&) -> ValuePtr {
                    ValuePtr r = onVar ? onVar(*v, v) : nullptr;
                    return r ? r : v;
                },
                [&](const VLam& l) -> ValuePtr {
                    if (shadows && shadows(l.param)) return v;
                    CompPtr b = comp(l.body);
                    return b == l.body ? v : build::lam(l.param, b, l.paramType);
                },
                [&](const VRec& r) -> ValuePtr {
                    if (shadows && (shadows(r.self) || shadows(r.param))) return v;
                    CompPtr b = comp(r.body);
                    return b == r.body ? v : build::rec(r.self, r.param, b, r.paramType, r.resultType);
                },
                [&](const VPair& p) -> ValuePtr {
                    ValuePtr a = value(p.first), b = value(p.second);
                    return a == p.first && b == p.second ? v : build::pair(a, b);
                },
                [&](const VInj& i) -> ValuePtr {
                    ValuePtr a = value(i.payload);
                    if (a == i.payload) return v;
                    return i.left ? build::inl(a, i.ann) : build::inr(a, i.ann);
                },
                [&](const auto&) -> ValuePtr { return v; },
            },
            v->node);
    }

    CompPtr under(const Var& x, const CompPtr& m) const { return shadows && shadows(x) ? m : comp(m); }

    CompPtr comp(const CompPtr& m) const {
        return std::visit(
            overloaded{
                [&](const CApp& c) -> CompPtr {
                    ValuePtr f = value(c.fn), a = value(c.arg);
                    return f == c.fn && a == c.arg ? m : build::app(f, a);
                },
                [&](const CSplit& c) -> CompPtr {
                    ValuePtr p = value(c.pair);
                    CompPtr b = (shadows && (shadows(c.first) || shadows(c.second))) ? c.body : comp(c.body);
                    return p == c.pair && b == c.body ? m : build::split(c.first, c.second, p, b);
                },
                [&](const CCase& c) -> CompPtr {
                    ValuePtr s = value(c.scrutinee);
                    CompPtr l = under(c.leftVar, c.left), r = under(c.rightVar, c.right);
                    return s == c.scrutinee && l == c.left && r == c.right ? m
                                                                          : build::caseOf(s, c.leftVar, l, c.rightVar, r);
                },
                [&](const CReturn& c) -> CompPtr {
                    ValuePtr v = value(c.value);
                    return v == c.value ? m : build::ret(v);
                },
                [&](const CLet& c) -> CompPtr {
                    CompPtr a = comp(c.bound), b = under(c.var, c.body);
                    return a == c.bound && b == c.body ? m : build::let(c.var, a, b);
                },
                [&](const CDo& c) -> CompPtr {
                    ValuePtr a = value(c.arg);
                    return a == c.arg ? m : build::perform(c.op, a);
                },
                [&](const CHandle& c) -> CompPtr {
                    CompPtr b = comp(c.body);
                    HandlerPtr h = handler(c.handler);
                    return b == c.body && h == c.handler ? m : build::handle(b, h);
                },
                [&](const CLetRef& c) -> CompPtr {
                    ValuePtr i = value(c.init);
                    CompPtr b = under(c.var, c.body);
                    return i == c.init && b == c.body ? m : build::letref(c.var, i, b);
                },
                [&](const CDeref& c) -> CompPtr {
                    ValuePtr r = value(c.ref);
                    return r == c.ref ? m : build::deref(r);
                },
                [&](const CAssign& c) -> CompPtr {
                    ValuePtr r = value(c.ref), v = value(c.value);
                    return r == c.ref && v == c.value ? m : build::assign(r, v);
                },
                [&](const CMemoise& c) -> CompPtr {
                    ValuePtr t = value(c.thunk);
                    return t == c.thunk ? m : build::memoise(t);
                },
            },
            m->node);
    }

    HandlerPtr handler(const HandlerPtr& h) const {
        bool changed = false;
        Handler out = *h;
        out.valBody = under(h->valVar, h->valBody);
        changed |= out.valBody != h->valBody;
        for (auto& cl : out.clauses) {
            CompPtr b = (shadows && (shadows(cl.param) || shadows(cl.resume))) ? cl.body : comp(cl.body);
            changed |= b != cl.body;
            cl.body = b;
        }
        HandlerPtr result = changed ? std::make_shared<const Handler>(std::move(out)) : h;
        return onHandler ? onHandler(result) : result;
    }
};

}  // namespace

HandlerPtr completeHandler(const HandlerPtr& h, const Signature& sig) {
    std::vector<OpClause> extra;
    for (const auto& [op, type] : sig) {
        if (h->find(op)) continue;
        Var p = Var::fresh("p"), r = Var::fresh("r"), x = Var::fresh("x");
        extra.push_back(OpClause{op, p, r,
                                 build::let(x, build::perform(op, build::var(p)),
                                            build::app(build::var(r), build::var(x)))});
    }
    if (extra.empty()) return h;
    Handler out = *h;
    for (auto& c : extra) out.clauses.push_back(std::move(c));
    return std::make_shared<const Handler>(std::move(out));
}

CompPtr completeAll(const CompPtr& m, const Signature& sig) {
    Rewriter rw;
    rw.onHandler = [&](const HandlerPtr& h) { return completeHandler(h, sig); };
    return rw.comp(m);
}

ValuePtr completeAll(const ValuePtr& v, const Signature& sig) {
    Rewriter rw;
    rw.onHandler = [&](const HandlerPtr& h) { return completeHandler(h, sig); };
    return rw.value(v);
}

CompPtr substitute(const CompPtr& m, const Substitution& s) {
    if (s.empty()) return m;
    Rewriter rw;
    rw.onVar = [&](const Value& v, const ValuePtr&) -> ValuePtr {
        auto it = s.find(std::get<VVar>(v.node).var.id);
        return it == s.end() ? nullptr : it->second;
    };
    rw.shadows = [&](const Var& x) { return s.count(x.id) != 0; };
    return rw.comp(m);
}

ValuePtr substitute(const ValuePtr& v, const Substitution& s) {
    if (s.empty()) return v;
    Rewriter rw;
    rw.onVar = [&](const Value& x, const ValuePtr&) -> ValuePtr {
        auto it = s.find(std::get<VVar>(x.node).var.id);
        return it == s.end() ? nullptr : it->second;
    };
    rw.shadows = [&](const Var& x) { return s.count(x.id) != 0; };
    return rw.value(v);
}

// ---------------------------------------------------------------- alpha-equivalence

namespace {

class AlphaEq {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> bound_;

    bool sameVar(std::uint32_t a, std::uint32_t b) const {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
            if (it->first == a || it->second == b) return it->first == a && it->second == b;
        }
        return a == b;
    }

    template <class F>
    bool with(std::initializer_list<std::pair<Var, Var>> binds, F&& f) {
        for (auto& [a, b] : binds) bound_.emplace_back(a.id, b.id);
        bool r = f();
        bound_.resize(bound_.size() - binds.size());
        return r;
    }

public:
    bool value(const ValuePtr& a, const ValuePtr& b) {
        if (a == b && bound_.empty()) return true;
        if (a->node.index() != b->node.index()) return false;
        return std::visit(
            overloaded{
                [&](const VVar& x) { return sameVar(x.var.id, std::get<VVar>(b->node).var.id); },
                [&](const VNum& x) { return x.n == std::get<VNum>(b->node).n; },
                [&](const VConst& x) { return x.op == std::get<VConst>(b->node).op; },
                [&](const VLam& x) {
                    auto& y = std::get<VLam>(b->node);
                    return with({{x.param, y.param}}, [&] { return comp(x.body, y.body); });
                },
                [&](const VRec& x) {
                    auto& y = std::get<VRec>(b->node);
                    return with({{x.self, y.self}, {x.param, y.param}}, [&] { return comp(x.body, y.body); });
                },
                [&](const VUnit&) { return true; },
                [&](const VPair& x) {
                    auto& y = std::get<VPair>(b->node);
                    return value(x.first, y.first) && value(x.second, y.second);
                },
                [&](const VInj& x) {
                    auto& y = std::get<VInj>(b->node);
                    return x.left == y.left && value(x.payload, y.payload);
                },
                [&](const VLoc& x) { return x.index == std::get<VLoc>(b->node).index; },
            },
            a->node);
    }

    bool comp(const CompPtr& a, const CompPtr& b) {
        if (a == b && bound_.empty()) return true;
        if (a->node.index() != b->node.index()) return false;
        return std::visit(
            overloaded{
                [&](const CApp& x) {
                    auto& y = std::get<CApp>(b->node);
                    return value(x.fn, y.fn) && value(x.arg, y.arg);
                },
                [&](const CSplit& x) {
                    auto& y = std::get<CSplit>(b->node);
                    return value(x.pair, y.pair) &&
                           with({{x.first, y.first}, {x.second, y.second}}, [&] { return comp(x.body, y.body); });
                },
                [&](const CCase& x) {
                    auto& y = std::get<CCase>(b->node);
                    return value(x.scrutinee, y.scrutinee) &&
                           with({{x.leftVar, y.leftVar}}, [&] { return comp(x.left, y.left); }) &&
                           with({{x.rightVar, y.rightVar}}, [&] { return comp(x.right, y.right); });
                },
                [&](const CReturn& x) { return value(x.value, std::get<CReturn>(b->node).value); },
                [&](const CLet& x) {
                    auto& y = std::get<CLet>(b->node);
                    return comp(x.bound, y.bound) && with({{x.var, y.var}}, [&] { return comp(x.body, y.body); });
                },
                [&](const CDo& x) {
                    auto& y = std::get<CDo>(b->node);
                    return x.op == y.op && value(x.arg, y.arg);
                },
                [&](const CHandle& x) {
                    auto& y = std::get<CHandle>(b->node);
                    return comp(x.body, y.body) && handler(*x.handler, *y.handler);
                },
                [&](const CLetRef& x) {
                    auto& y = std::get<CLetRef>(b->node);
                    return value(x.init, y.init) && with({{x.var, y.var}}, [&] { return comp(x.body, y.body); });
                },
                [&](const CDeref& x) { return value(x.ref, std::get<CDeref>(b->node).ref); },
                [&](const CAssign& x) {
                    auto& y = std::get<CAssign>(b->node);
                    return value(x.ref, y.ref) && value(x.value, y.value);
                },
                [&](const CMemoise& x) { return value(x.thunk, std::get<CMemoise>(b->node).thunk); },
            },
            a->node);
    }

    bool handler(const Handler& a, const Handler& b) {
        if (a.clauses.size() != b.clauses.size()) return false;
        if (!with({{a.valVar, b.valVar}}, [&] { return comp(a.valBody, b.valBody); })) return false;
        for (const auto& ca : a.clauses) {
            const OpClause* cb = b.find(ca.op);
            if (!cb) return false;
            if (!with({{ca.param, cb->param}, {ca.resume, cb->resume}}, [&] { return comp(ca.body, cb->body); }))
                return false;
        }
        return true;
    }
};

}  // namespace

bool alphaEqual(const CompPtr& a, const CompPtr& b) { return AlphaEq{}.comp(a, b); }
bool alphaEqual(const ValuePtr& a, const ValuePtr& b) { return AlphaEq{}.value(a, b); }

std::size_t termSize(const CompPtr& m) {
    std::size_t n = 0;
    NodeTest counter{[&](const Comp&) {
                         ++n;
                         return false;
                     },
                     [&](const Value&) {
                         ++n;
                         return false;
                     }};
    anyComp(m, counter);
    return n;
}

namespace {

class FreeVarCollector {
    std::vector<std::uint32_t> bound_;
    std::vector<Var> out_;

    bool isBound(std::uint32_t id) const {
        for (auto b : bound_)
            if (b == id) return true;
        return false;
    }
    void note(const Var& x) {
        if (isBound(x.id)) return;
        for (const auto& v : out_)
            if (v.id == x.id) return;
        out_.push_back(x);
    }
    template <class F>
    void with(std::initializer_list<Var> xs, F&& f) {
        for (const auto& x : xs) bound_.push_back(x.id);
        f();
        bound_.resize(bound_.size() - xs.size());
    }

public:
    std::vector<Var> result() { return std::move(out_); }

    void value(const ValuePtr& v) {
        std::visit(overloaded{
                       [&](const VVar& x) { note(x.var); },
                       [&](const VLam& l) { with({l.param}, [&] { comp(l.body); }); },
                       [&](const VRec& r) { with({r.self, r.param}, [&] { comp(r.body); }); },
                       [&](const VPair& p) {
                           value(p.first);
                           value(p.second);
                       },
                       [&](const VInj& i) { value(i.payload); },
                       [](const auto&) {},
                   },
                   v->node);
    }

    void comp(const CompPtr& m) {
        std::visit(overloaded{
                       [&](const CApp& c) {
                           value(c.fn);
                           value(c.arg);
                       },
                       [&](const CSplit& c) {
                           value(c.pair);
                           with({c.first, c.second}, [&] { comp(c.body); });
                       },
                       [&](const CCase& c) {
                           value(c.scrutinee);
                           with({c.leftVar}, [&] { comp(c.left); });
                           with({c.rightVar}, [&] { comp(c.right); });
                       },
                       [&](const CReturn& c) { value(c.value); },
                       [&](const CLet& c) {
                           comp(c.bound);
                           with({c.var}, [&] { comp(c.body); });
                       },
                       [&](const CDo& c) { value(c.arg); },
                       [&](const CHandle& c) {
                           comp(c.body);
                           with({c.handler->valVar}, [&] { comp(c.handler->valBody); });
                           for (const auto& cl : c.handler->clauses) with({cl.param, cl.resume}, [&] { comp(cl.body); });
                       },
                       [&](const CLetRef& c) {
                           value(c.init);
                           with({c.var}, [&] { comp(c.body); });
                       },
                       [&](const CDeref& c) { value(c.ref); },
                       [&](const CAssign& c) {
                           value(c.ref);
                           value(c.value);
                       },
                       [&](const CMemoise& c) { value(c.thunk); },
                   },
                   m->node);
    }
};

}  // namespace

std::vector<Var> freeVars(const CompPtr& m) {
    FreeVarCollector c;
    c.comp(m);
    return c.result();
}

std::vector<Var> freeVars(const ValuePtr& v) {
    FreeVarCollector c;
    c.value(v);
    return c.result();
}

bool mentions(const CompPtr& m, const Var& x) {
    NodeTest t{nullptr, [&](const Value& v) {
                   auto p = std::get_if<VVar>(&v.node);
                   return p && p->var.id == x.id;
               }};
    return anyComp(m, t);
}

}  // namespace fx
