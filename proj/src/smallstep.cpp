#include "fx/smallstep.hpp"

namespace fx::smallstep {

namespace {

struct Redex {
    enum Kind { Reduced, Returned, Performed } kind;
    CompPtr term;       // Reduced: the reduct
    ValuePtr value;     // Returned
    const CDo* op = nullptr;  // Performed: the innermost invocation
};

[[noreturn]] void stuck(const std::string& what) { throw EvalError("stuck term: " + what); }

std::uint64_t asNum(const ValuePtr& v) {
    auto n = std::get_if<VNum>(&v->node);
    if (!n) stuck("expected a numeral");
    return n->n;
}

/// E[return y] for the pure context E around the innermost `do`.
CompPtr plug(const CompPtr& m, const ValuePtr& hole) {
    if (std::holds_alternative<CDo>(m->node)) return build::ret(hole);
    const auto& l = std::get<CLet>(m->node);
    return build::let(l.var, plug(l.bound, hole), l.body);
}

Redex reduce(const CompPtr& m, StateConfig& st) {
    auto reduced = [](CompPtr t) { return Redex{Redex::Reduced, std::move(t), nullptr, nullptr}; };
    return std::visit(
        overloaded{
            [&](const CReturn& c) { return Redex{Redex::Returned, nullptr, c.value, nullptr}; },
            [&](const CDo& c) { return Redex{Redex::Performed, nullptr, nullptr, &c}; },
            [&](const CApp& c) -> Redex {
                return std::visit(
                    overloaded{
                        [&](const VLam& f) { return reduced(substitute(f.body, {{f.param.id, c.arg}})); },
                        [&](const VRec& f) {
                            return reduced(substitute(f.body, {{f.self.id, c.fn}, {f.param.id, c.arg}}));
                        },
                        [&](const VConst& k) { return reduced(build::ret(applyConstant(k.op, c.arg))); },
                        [&](const auto&) -> Redex { stuck("application of a non-function"); },
                    },
                    c.fn->node);
            },
            [&](const CSplit& c) -> Redex {
                auto p = std::get_if<VPair>(&c.pair->node);
                if (!p) stuck("split of a non-pair");
                return reduced(substitute(c.body, {{c.first.id, p->first}, {c.second.id, p->second}}));
            },
            [&](const CCase& c) -> Redex {
                auto i = std::get_if<VInj>(&c.scrutinee->node);
                if (!i) stuck("case of a non-injection");
                if (i->left) return reduced(substitute(c.left, {{c.leftVar.id, i->payload}}));
                return reduced(substitute(c.right, {{c.rightVar.id, i->payload}}));
            },
            [&](const CLet& c) -> Redex {
                Redex r = reduce(c.bound, st);
                switch (r.kind) {
                    case Redex::Reduced: return reduced(build::let(c.var, r.term, c.body));
                    case Redex::Returned: return reduced(substitute(c.body, {{c.var.id, r.value}}));
                    case Redex::Performed: return r;
                }
                stuck("let");
            },
            [&](const CHandle& c) -> Redex {
                Redex r = reduce(c.body, st);
                const Handler& h = *c.handler;
                switch (r.kind) {
                    case Redex::Reduced: return reduced(build::handle(r.term, c.handler));
                    case Redex::Returned: return reduced(substitute(h.valBody, {{h.valVar.id, r.value}}));
                    case Redex::Performed: {
                        const OpClause* clause = h.find(r.op->op);
                        if (!clause) stuck("handler without a clause for " + r.op->op);
                        Var y = Var::fresh("y");
                        ValuePtr resumption =
                            build::lam(y, build::handle(plug(c.body, build::var(y)), c.handler));
                        return reduced(
                            substitute(clause->body, {{clause->param.id, r.op->arg}, {clause->resume.id, resumption}}));
                    }
                }
                stuck("handle");
            },
            [&](const CLetRef& c) -> Redex {
                std::uint64_t l = st.locCounter++;
                st.store[l] = c.init;
                return reduced(substitute(c.body, {{c.var.id, build::loc(l)}}));
            },
            [&](const CDeref& c) -> Redex {
                auto l = std::get_if<VLoc>(&c.ref->node);
                if (!l) stuck("dereference of a non-location");
                auto it = st.store.find(l->index);
                if (it == st.store.end()) throw EvalError("unbound location " + std::to_string(l->index));
                return reduced(build::ret(it->second));
            },
            [&](const CAssign& c) -> Redex {
                auto l = std::get_if<VLoc>(&c.ref->node);
                if (!l) stuck("assignment to a non-location");
                if (!st.store.count(l->index)) throw EvalError("unbound location " + std::to_string(l->index));
                st.store[l->index] = c.value;
                return reduced(build::ret(build::unit()));
            },
            [&](const CMemoise& c) { return reduced(build::ret(c.thunk)); },
        },
        m->node);
}

}  // namespace

ValuePtr applyConstant(ConstOp op, const ValuePtr& arg) {
    auto p = std::get_if<VPair>(&arg->node);
    if (!p) stuck("constant applied to a non-pair");
    std::uint64_t a = asNum(p->first), b = asNum(p->second);
    switch (op) {
        case ConstOp::Plus: return build::num(a + b);
        case ConstOp::Minus: return build::num(a >= b ? a - b : 0);
        case ConstOp::Eq: return build::boolean(a == b);
    }
    stuck("unknown constant");
}

std::variant<StateConfig, Normal> step(const StateConfig& cfg, const Signature&) {
    StateConfig next = cfg;
    Redex r = reduce(cfg.term, next);
    if (r.kind != Redex::Reduced) return Normal{};
    next.term = r.term;
    return next;
}

EvalResult evaluate(const CompPtr& term, const Signature& sig, std::uint64_t fuel,
                    const std::function<void(const StateConfig&)>& onStep) {
    EvalResult res{Outcome::FuelExhausted, StateConfig{completeAll(term, sig), 0, {}}, nullptr, {}, nullptr, 0};
    for (;;) {
        Redex r = reduce(res.final.term, res.final);
        if (r.kind == Redex::Returned) {
            res.outcome = Outcome::Value;
            res.value = r.value;
            return res;
        }
        if (r.kind == Redex::Performed) {
            res.outcome = Outcome::Unhandled;
            res.op = r.op->op;
            res.opArg = r.op->arg;
            return res;
        }
        if (res.steps >= fuel) {
            res.outcome = Outcome::FuelExhausted;
            return res;
        }
        res.final.term = r.term;
        ++res.steps;
        if (onStep) onStep(res.final);
    }
}

}  // namespace fx::smallstep
