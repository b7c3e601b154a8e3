#include "fx/machine.hpp"

#include <sstream>

namespace fx::machine {

// ---------------------------------------------------------------- values

namespace mval {
namespace {
MValuePtr make(decltype(MValue::node) n) { return std::make_shared<const MValue>(MValue{std::move(n)}); }
}  // namespace

MValuePtr num(std::uint64_t n) { return make(MNum{n}); }
MValuePtr unit() {
    static const MValuePtr u = make(MUnit{});
    return u;
}
MValuePtr boolean(bool b) {
    static const MValuePtr t = make(MInj{true, unit()});
    static const MValuePtr f = make(MInj{false, unit()});
    return b ? t : f;
}
MValuePtr pair(MValuePtr a, MValuePtr b) { return make(MPair{std::move(a), std::move(b)}); }
MValuePtr inj(bool left, MValuePtr payload) { return make(MInj{left, std::move(payload)}); }

std::optional<bool> asBool(const MValuePtr& v) {
    auto i = std::get_if<MInj>(&v->node);
    if (!i || !std::holds_alternative<MUnit>(i->payload->node)) return std::nullopt;
    return i->left;
}
std::optional<std::uint64_t> asNum(const MValuePtr& v) {
    if (auto n = std::get_if<MNum>(&v->node)) return n->n;
    return std::nullopt;
}
}  // namespace mval

namespace {
MValuePtr make(decltype(MValue::node) n) { return std::make_shared<const MValue>(MValue{std::move(n)}); }
}  // namespace

const char* ruleName(Rule r) {
    switch (r) {
        case Rule::App: return "M-App";
        case Rule::Rec: return "M-Rec";
        case Rule::Const: return "M-Const";
        case Rule::Split: return "M-Split";
        case Rule::CaseL: return "M-CaseL";
        case Rule::CaseR: return "M-CaseR";
        case Rule::Let: return "M-Let";
        case Rule::RetCont: return "M-RetCont";
        case Rule::Handle: return "M-Handle";
        case Rule::RetHandler: return "M-RetHandler";
        case Rule::HandleOp: return "M-Handle-Op";
        case Rule::Resume: return "M-Resume";
        case Rule::LetRef: return "M-LetRef";
        case Rule::Deref: return "M-Deref";
        case Rule::Assign: return "M-Assign";
        case Rule::Memo: return "M-Memo";
        case Rule::MemoForce: return "M-MemoForce";
        case Rule::MemoHit: return "M-MemoHit";
        case Rule::MemoStore: return "M-MemoStore";
    }
    return "?";
}

bool isAdministrative(Rule r, bool identityHandler) {
    return r == Rule::Let || r == Rule::Handle || r == Rule::MemoStore ||
           (r == Rule::RetHandler && identityHandler);
}

// ---------------------------------------------------------------- configurations

bool Config::returning() const { return !comp || std::holds_alternative<CReturn>(comp->node); }

bool Config::atAnswer() const {
    return returning() && pure.empty() && handler && handler->identity() && rest.empty();
}

std::size_t Config::depth() const { return rest.size() + (handler ? 1 : 0); }

Config injectBase(const CompPtr& term) {
    if (usesHandlers(term)) throw BaseMachineUnsupported();
    Config c;
    c.mode = Mode::Base;
    c.comp = term;
    return c;
}

Config injectHandler(const CompPtr& term, const Signature& sig, Env env) {
    Config c;
    c.mode = Mode::Handler;
    c.comp = completeAll(term, sig);
    c.env = std::move(env);
    c.handler = HandlerClosure{};
    return c;
}

namespace {

[[noreturn]] void stuck(const std::string& what) { throw EvalError("machine stuck: " + what); }

class Stepper {
public:
    explicit Stepper(Config& c) : c_(c) {}

    StepOutcome run() {
        if (!c_.comp) return ret(c_.value);
        return std::visit([&](const auto& node) { return on(node); }, c_.comp->node);
    }

    MValuePtr evaluate(const ValuePtr& v) { return eval(v); }

private:
    Config& c_;

    static StepOutcome fired(Rule r) { return StepOutcome{Status::Stepped, r, {}, nullptr}; }

    MValuePtr lookup(const Env& env, const Var& x) {
        ++c_.envOps;
        const MValuePtr* v = env.find(x.id);
        if (!v) stuck("unbound variable " + x.name);
        return *v;
    }
    Env extend(const Env& env, const Var& x, MValuePtr v) {
        ++c_.envOps;
        return env.insert(x.id, std::move(v));
    }

    MValuePtr eval(const ValuePtr& v) {
        return std::visit(
            overloaded{
                [&](const VVar& x) { return lookup(c_.env, x.var); },
                [&](const VNum& n) { return mval::num(n.n); },
                [&](const VConst& k) { return make(MConst{k.op}); },
                [&](const VLam&) { return make(MClosure{c_.env, v}); },
                [&](const VRec&) { return make(MClosure{c_.env, v}); },
                [&](const VUnit&) { return mval::unit(); },
                [&](const VPair& p) {
                    MValuePtr a = eval(p.first);
                    return mval::pair(std::move(a), eval(p.second));
                },
                [&](const VInj& i) {
                    MValuePtr payload = eval(i.payload);
                    if (std::holds_alternative<MUnit>(payload->node)) return mval::boolean(i.left);
                    return mval::inj(i.left, std::move(payload));
                },
                [&](const VLoc& l) { return make(MLoc{l.index}); },
            },
            v->node);
    }

    void setValue(MValuePtr v) {
        c_.comp = nullptr;
        c_.value = std::move(v);
    }
    void setComp(CompPtr m, Env env) {
        c_.comp = std::move(m);
        c_.env = std::move(env);
        c_.value = nullptr;
    }

    void pushHandler(PureCont pure, HandlerClosure h) {
        c_.rest = c_.rest.push(Resumption{c_.pure, *c_.handler});
        c_.pure = std::move(pure);
        c_.handler = std::move(h);
    }
    void popHandler() {
        if (c_.rest.empty()) {
            c_.handler.reset();
            c_.pure = {};
            return;
        }
        const Resumption& next = c_.rest.front();
        c_.pure = next.pure;
        c_.handler = next.handler;
        c_.rest = c_.rest.pop();
    }

    void requireHandlerMode(const char* what) {
        if (c_.mode == Mode::Base) throw BaseMachineUnsupported();
        if (!c_.handler) stuck(what);
    }

    StepOutcome ret(const MValuePtr& v) {
        if (!c_.pure.empty()) {
            PureFrame f = c_.pure.front();
            c_.pure = c_.pure.pop();
            if (f.memoCell) {
                c_.memo = c_.memo.insert(*f.memoCell, v);
                setValue(v);
                return fired(Rule::MemoStore);
            }
            setComp(f.body, extend(f.env, f.var, v));
            return fired(Rule::RetCont);
        }
        if (!c_.handler) return StepOutcome{Status::Value, {}, {}, v};
        HandlerClosure h = *c_.handler;
        popHandler();
        if (h.identity()) {
            setValue(v);
        } else {
            setComp(h.handler->valBody, extend(h.env, h.handler->valVar, v));
        }
        return fired(Rule::RetHandler);
    }

    StepOutcome apply(const MValuePtr& fn, const MValuePtr& arg) {
        return std::visit(
            overloaded{
                [&](const MClosure& f) {
                    if (auto lam = std::get_if<VLam>(&f.fn->node)) {
                        setComp(lam->body, extend(f.env, lam->param, arg));
                        return fired(Rule::App);
                    }
                    const auto& rec = std::get<VRec>(f.fn->node);
                    Env env = extend(f.env, rec.self, fn);
                    setComp(rec.body, extend(env, rec.param, arg));
                    return fired(Rule::Rec);
                },
                [&](const MConst& k) {
                    auto p = std::get_if<MPair>(&arg->node);
                    auto a = p ? mval::asNum(p->first) : std::nullopt;
                    auto b = p ? mval::asNum(p->second) : std::nullopt;
                    if (!a || !b) stuck("constant applied to a non-numeric pair");
                    switch (k.op) {
                        case ConstOp::Plus: setValue(mval::num(*a + *b)); break;
                        case ConstOp::Minus: setValue(mval::num(*a >= *b ? *a - *b : 0)); break;
                        case ConstOp::Eq: setValue(mval::boolean(*a == *b)); break;
                    }
                    return fired(Rule::Const);
                },
                [&](const MResumption& r) {
                    requireHandlerMode("resume without a handler");
                    pushHandler(r.res.pure, r.res.handler);
                    setValue(arg);
                    return fired(Rule::Resume);
                },
                [&](const MMemo& m) {
                    if (const MValuePtr* hit = c_.memo.find(m.cell)) {
                        setValue(*hit);
                        return fired(Rule::MemoHit);
                    }
                    if (!std::holds_alternative<MClosure>(m.thunk->node)) stuck("memoise of a non-closure");
                    c_.pure = c_.pure.push(PureFrame{{}, {}, nullptr, m.cell});
                    apply(m.thunk, arg);
                    return fired(Rule::MemoForce);
                },
                [&](const MProbe&) { return StepOutcome{Status::ProbeApplied, {}, {}, arg}; },
                [&](const auto&) -> StepOutcome { stuck("application of a non-function"); },
            },
            fn->node);
    }

    StepOutcome on(const CApp& a) {
        MValuePtr fn = eval(a.fn);
        return apply(fn, eval(a.arg));
    }
    StepOutcome on(const CSplit& s) {
        MValuePtr v = eval(s.pair);
        auto p = std::get_if<MPair>(&v->node);
        if (!p) stuck("split of a non-pair");
        Env env = extend(c_.env, s.first, p->first);
        setComp(s.body, extend(env, s.second, p->second));
        return fired(Rule::Split);
    }
    StepOutcome on(const CCase& k) {
        MValuePtr v = eval(k.scrutinee);
        auto i = std::get_if<MInj>(&v->node);
        if (!i) stuck("case of a non-injection");
        if (i->left) {
            setComp(k.left, extend(c_.env, k.leftVar, i->payload));
            return fired(Rule::CaseL);
        }
        setComp(k.right, extend(c_.env, k.rightVar, i->payload));
        return fired(Rule::CaseR);
    }
    StepOutcome on(const CReturn& r) { return ret(eval(r.value)); }
    StepOutcome on(const CLet& l) {
        c_.pure = c_.pure.push(PureFrame{c_.env, l.var, l.body, std::nullopt});
        c_.comp = l.bound;
        return fired(Rule::Let);
    }
    StepOutcome on(const CDo& d) {
        requireHandlerMode("operation without a handler");
        MValuePtr arg = eval(d.arg);
        const HandlerClosure& h = *c_.handler;
        if (h.identity()) return StepOutcome{Status::Unhandled, {}, d.op, arg};
        const OpClause* clause = h.handler->find(d.op);
        if (!clause) stuck("handler without a clause for " + d.op);
        MValuePtr r = make(MResumption{Resumption{c_.pure, h}});
        Env env = extend(h.env, clause->param, arg);
        env = extend(env, clause->resume, r);
        CompPtr body = clause->body;
        popHandler();
        setComp(body, std::move(env));
        return fired(Rule::HandleOp);
    }
    StepOutcome on(const CHandle& h) {
        requireHandlerMode("handle without a handler stack");
        pushHandler({}, HandlerClosure{c_.env, h.handler});
        c_.comp = h.body;
        return fired(Rule::Handle);
    }
    StepOutcome on(const CLetRef& l) {
        std::uint64_t loc = c_.nextLoc++;
        c_.store = c_.store.insert(loc, eval(l.init));
        setComp(l.body, extend(c_.env, l.var, make(MLoc{loc})));
        return fired(Rule::LetRef);
    }
    std::uint64_t location(const ValuePtr& ref) {
        MValuePtr v = eval(ref);
        auto l = std::get_if<MLoc>(&v->node);
        if (!l) stuck("reference operation on a non-location");
        if (!c_.store.find(l->index)) throw EvalError("unbound location " + std::to_string(l->index));
        return l->index;
    }
    StepOutcome on(const CDeref& d) {
        setValue(*c_.store.find(location(d.ref)));
        return fired(Rule::Deref);
    }
    StepOutcome on(const CAssign& a) {
        std::uint64_t l = location(a.ref);
        c_.store = c_.store.insert(l, eval(a.value));
        setValue(mval::unit());
        return fired(Rule::Assign);
    }
    StepOutcome on(const CMemoise& m) {
        setValue(make(MMemo{c_.nextMemo++, eval(m.thunk)}));
        return fired(Rule::Memo);
    }
};

}  // namespace

StepOutcome step(Config& cfg) {
    StepOutcome out = Stepper(cfg).run();
    if (out.status == Status::Stepped) ++cfg.tick;
    return out;
}

StepOutcome stepBase(Config& cfg) {
    if (cfg.mode != Mode::Base) throw EvalError("stepBase on a handler-machine configuration");
    return step(cfg);
}

StepOutcome stepHandler(Config& cfg) {
    if (cfg.mode != Mode::Handler) throw EvalError("stepHandler on a base-machine configuration");
    return step(cfg);
}

RunResult drive(Config cfg, std::uint64_t fuel, const TraceFn& trace) {
    std::uint64_t start = cfg.tick;
    for (;;) {
        std::optional<Config> before;
        if (trace) before = cfg;
        if (cfg.tick - start >= fuel) {
            // A final state needs no fuel, so probe for one before giving up.
            Config probe = cfg;
            StepOutcome out = Stepper(probe).run();
            if (out.status == Status::Stepped || out.status == Status::ProbeApplied)
                return RunResult{Final::FuelExhausted, nullptr, {}, nullptr, cfg, cfg.tick, cfg.envOps};
        }
        StepOutcome out = step(cfg);
        switch (out.status) {
            case Status::Stepped:
                if (trace) trace(*before, out.rule);
                break;
            case Status::Value: return RunResult{Final::Value, out.arg, {}, nullptr, cfg, cfg.tick, cfg.envOps};
            case Status::Unhandled:
                return RunResult{Final::Unhandled, nullptr, out.op, out.arg, cfg, cfg.tick, cfg.envOps};
            case Status::ProbeApplied: stuck("probe applied outside tree extraction");
        }
    }
}

RunResult runMachine(const CompPtr& term, const Signature& sig, std::uint64_t fuel, const TraceFn& trace) {
    if (!usesHandlers(term)) return drive(injectBase(term), fuel, trace);
    return drive(injectHandler(term, sig), fuel, trace);
}

MValuePtr evaluateToValue(const CompPtr& term, const Signature& sig, std::uint64_t fuel) {
    RunResult r = drive(injectHandler(term, sig), fuel);
    if (r.final == Final::Unhandled) throw EvalError("unhandled operation " + r.op);
    if (r.final == Final::FuelExhausted) throw EvalError("fuel exhausted");
    return r.value;
}

Config applicationConfig(const MValuePtr& fn, const MValuePtr& arg, Mode mode) {
    Var f = Var::fresh("f"), a = Var::fresh("a");
    Config c;
    c.mode = mode;
    c.comp = build::app(build::var(f), build::var(a));
    c.env = Env{}.insert(f.id, fn).insert(a.id, arg);
    if (mode == Mode::Handler) c.handler = HandlerClosure{};
    return c;
}

MValuePtr returnedValue(Config& cfg) {
    if (!cfg.comp) return cfg.value;
    auto r = std::get_if<CReturn>(&cfg.comp->node);
    if (!r) throw EvalError("configuration is not returning");
    return Stepper(cfg).evaluate(r->value);
}

std::string headForm(const Config& cfg) {
    if (!cfg.comp) return "value";
    return std::visit(
        overloaded{
            [](const CApp&) -> std::string { return "app"; },
            [](const CSplit&) -> std::string { return "split"; },
            [](const CCase&) -> std::string { return "case"; },
            [](const CReturn&) -> std::string { return "return"; },
            [](const CLet&) -> std::string { return "let"; },
            [](const CDo& d) { return "do " + d.op; },
            [](const CHandle&) -> std::string { return "handle"; },
            [](const CLetRef&) -> std::string { return "letref"; },
            [](const CDeref&) -> std::string { return "deref"; },
            [](const CAssign&) -> std::string { return "assign"; },
            [](const CMemoise&) -> std::string { return "memoise"; },
        },
        cfg.comp->node);
}

std::string traceLine(const Config& before, Rule rule) {
    std::ostringstream out;
    out << "tick=" << before.tick + 1 << " rule=" << ruleName(rule) << " comp=" << headForm(before)
        << " depth(κ)=" << before.depth();
    return out.str();
}

// ---------------------------------------------------------------- decompilation

namespace {

ValuePtr decompileIn(const ValuePtr& v, const Env& env);

Substitution envSubstitution(const std::vector<Var>& free, const Env& env) {
    Substitution s;
    for (const Var& x : free)
        if (const MValuePtr* mv = env.find(x.id)) s[x.id] = decompile(*mv);
    return s;
}

CompPtr decompileIn(const CompPtr& m, const Env& env) { return substitute(m, envSubstitution(freeVars(m), env)); }
ValuePtr decompileIn(const ValuePtr& v, const Env& env) { return substitute(v, envSubstitution(freeVars(v), env)); }

CompPtr wrapPure(const PureCont& pure, CompPtr inner) {
    pure.forEach([&](const PureFrame& f) {
        if (f.memoCell) return;
        CompPtr closed = decompileIn(build::ret(build::lam(f.var, f.body)), f.env);
        const auto& lam = std::get<VLam>(std::get<CReturn>(closed->node).value->node);
        inner = build::let(f.var, inner, lam.body);
    });
    return inner;
}

CompPtr wrapHandler(const HandlerClosure& h, CompPtr inner) {
    if (h.identity()) return inner;
    CompPtr closed = decompileIn(build::handle(build::ret(build::unit()), h.handler), h.env);
    return build::handle(std::move(inner), std::get<CHandle>(closed->node).handler);
}

}  // namespace

ValuePtr decompile(const MValuePtr& v) {
    return std::visit(
        overloaded{
            [](const MNum& n) { return build::num(n.n); },
            [](const MConst& k) { return build::constant(k.op); },
            [](const MUnit&) { return build::unit(); },
            [](const MPair& p) { return build::pair(decompile(p.first), decompile(p.second)); },
            [](const MInj& i) {
                ValuePtr payload = decompile(i.payload);
                return i.left ? build::inl(payload) : build::inr(payload);
            },
            [](const MClosure& c) { return decompileIn(c.fn, c.env); },
            [](const MLoc& l) { return build::loc(l.index); },
            [](const MResumption& r) {
                Var y = Var::fresh("y");
                return build::lam(y, wrapHandler(r.res.handler, wrapPure(r.res.pure, build::ret(build::var(y)))));
            },
            [](const MMemo& m) { return decompile(m.thunk); },
            [](const MProbe& p) { return build::var(p.var); },
        },
        v->node);
}

CompPtr decompile(const Config& cfg) {
    CompPtr m = cfg.comp ? decompileIn(cfg.comp, cfg.env) : build::ret(decompile(cfg.value));
    m = wrapPure(cfg.pure, std::move(m));
    if (cfg.handler) m = wrapHandler(*cfg.handler, std::move(m));
    cfg.rest.forEach([&](const Resumption& r) { m = wrapHandler(r.handler, wrapPure(r.pure, std::move(m))); });
    return m;
}

smallstep::Store decompileStore(const Config& cfg) {
    smallstep::Store s;
    cfg.store.forEach([&](const std::uint64_t& l, const MValuePtr& v) { s[l] = decompile(v); });
    return s;
}

}  // namespace fx::machine
