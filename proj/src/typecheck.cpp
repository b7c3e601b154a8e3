#include "fx/typecheck.hpp"

namespace fx {

namespace {

class Checker {
public:
    explicit Checker(const Signature& sig) : sig_(sig) {}

    TypePtr value(const TypeEnv& env, const ValuePtr& v) {
        return std::visit(
            overloaded{
                [&](const VVar& x) -> TypePtr {
                    const TypePtr* t = env.find(x.var.id);
                    if (!t) throw TypeError("unbound variable " + x.var.name);
                    return *t;
                },
                [&](const VNum&) { return types::nat(); },
                [&](const VConst& c) {
                    TypePtr args = types::product(types::nat(), types::nat());
                    return types::arrow(args, c.op == ConstOp::Eq ? types::boolean() : types::nat());
                },
                [&](const VLam& l) {
                    TypePtr a = l.paramType ? instantiate(l.paramType) : fresh();
                    Frame f(this, "fun " + l.param.name);
                    TypePtr b = comp(env.insert(l.param.id, a), l.body);
                    return types::arrow(a, b);
                },
                [&](const VRec& r) {
                    TypePtr a = r.paramType ? instantiate(r.paramType) : fresh();
                    TypePtr b = r.resultType ? instantiate(r.resultType) : fresh();
                    TypePtr ft = types::arrow(a, b);
                    Frame f(this, "rec " + r.self.name);
                    TypePtr body = comp(env.insert(r.self.id, ft).insert(r.param.id, a), r.body);
                    unify(b, body, "result of " + r.self.name);
                    return ft;
                },
                [&](const VUnit&) { return types::unit(); },
                [&](const VPair& p) { return types::product(value(env, p.first), value(env, p.second)); },
                [&](const VInj& i) -> TypePtr {
                    TypePtr whole = i.ann ? instantiate(i.ann) : types::sum(fresh(), fresh());
                    TypePtr l = fresh(), r = fresh();
                    unify(types::sum(l, r), whole, i.left ? "inl" : "inr");
                    unify(i.left ? l : r, value(env, i.payload), i.left ? "payload of inl" : "payload of inr");
                    return whole;
                },
                [&](const VLoc& l) -> TypePtr {
                    auto it = locations_.find(l.index);
                    if (it == locations_.end()) it = locations_.emplace(l.index, fresh()).first;
                    return types::ref(it->second);
                },
            },
            v->node);
    }

    TypePtr comp(const TypeEnv& env, const CompPtr& m) {
        return std::visit(
            overloaded{
                [&](const CApp& c) {
                    TypePtr f = value(env, c.fn);
                    TypePtr a = fresh(), r = fresh();
                    unify(types::arrow(a, r), f, "function position");
                    unify(a, value(env, c.arg), "argument");
                    return r;
                },
                [&](const CSplit& c) {
                    TypePtr a = fresh(), b = fresh();
                    unify(types::product(a, b), value(env, c.pair), "split");
                    return comp(env.insert(c.first.id, a).insert(c.second.id, b), c.body);
                },
                [&](const CCase& c) {
                    TypePtr a = fresh(), b = fresh();
                    unify(types::sum(a, b), value(env, c.scrutinee), "case scrutinee");
                    TypePtr l = comp(env.insert(c.leftVar.id, a), c.left);
                    TypePtr r = comp(env.insert(c.rightVar.id, b), c.right);
                    unify(l, r, "case branches");
                    return l;
                },
                [&](const CReturn& c) { return value(env, c.value); },
                [&](const CLet& c) {
                    TypePtr a;
                    {
                        Frame f(this, "let " + c.var.name);
                        a = comp(env, c.bound);
                    }
                    return comp(env.insert(c.var.id, a), c.body);
                },
                [&](const CDo& c) {
                    auto it = sig_.find(c.op);
                    if (it == sig_.end()) throw TypeError("unknown operation " + c.op);
                    unify(instantiate(it->second.arg), value(env, c.arg), "argument of " + c.op);
                    return instantiate(it->second.result);
                },
                [&](const CHandle& c) {
                    TypePtr body;
                    {
                        Frame f(this, "handled computation");
                        body = comp(env, c.body);
                    }
                    const Handler& h = *c.handler;
                    Frame f(this, "handler");
                    TypePtr result = comp(env.insert(h.valVar.id, body), h.valBody);
                    for (const auto& cl : h.clauses) {
                        auto it = sig_.find(cl.op);
                        if (it == sig_.end()) throw TypeError("unknown operation " + cl.op);
                        TypePtr a = instantiate(it->second.arg), b = instantiate(it->second.result);
                        TypeEnv inner = env.insert(cl.param.id, a).insert(cl.resume.id, types::arrow(b, result));
                        unify(result, comp(inner, cl.body), "clause " + cl.op);
                    }
                    return result;
                },
                [&](const CLetRef& c) {
                    TypePtr a = value(env, c.init);
                    return comp(env.insert(c.var.id, types::ref(a)), c.body);
                },
                [&](const CDeref& c) {
                    TypePtr a = fresh();
                    unify(types::ref(a), value(env, c.ref), "dereference");
                    return a;
                },
                [&](const CAssign& c) {
                    TypePtr a = fresh();
                    unify(types::ref(a), value(env, c.ref), "assignment target");
                    unify(a, value(env, c.value), "assigned value");
                    return types::unit();
                },
                [&](const CMemoise& c) {
                    TypePtr a = fresh();
                    TypePtr t = types::arrow(types::unit(), a);
                    unify(t, value(env, c.thunk), "memoise");
                    return t;
                },
            },
            m->node);
    }

    void checkStore(const std::map<std::uint64_t, ValuePtr>& store) {
        for (const auto& [l, v] : store) {
            TypePtr t = value({}, build::loc(l));
            unify(t->first, value({}, v), "store location " + std::to_string(l));
        }
    }

    /// Fully resolved type; unconstrained variables become Unit.
    TypePtr zonk(const TypePtr& t, bool defaulting = true) {
        TypePtr r = resolve(t);
        switch (r->kind) {
            case TypeKind::Meta: return defaulting ? types::unit() : r;
            case TypeKind::Arrow: return types::arrow(zonk(r->first, defaulting), zonk(r->second, defaulting));
            case TypeKind::Product: return types::product(zonk(r->first, defaulting), zonk(r->second, defaulting));
            case TypeKind::Sum: return types::sum(zonk(r->first, defaulting), zonk(r->second, defaulting));
            case TypeKind::Ref: return types::ref(zonk(r->first, defaulting));
            case TypeKind::List: return types::list(zonk(r->first, defaulting));
            default: return r;
        }
    }

    void unify(const TypePtr& expected, const TypePtr& actual, const std::string& where) {
        if (!unifyRec(expected, actual)) {
            std::string path;
            for (const auto& p : path_) path += p + " > ";
            throw TypeError("type mismatch in " + path + where + ": expected " + toString(zonk(expected, false)) +
                            ", got " + toString(zonk(actual, false)));
        }
    }

    bool unifyRec(const TypePtr& x, const TypePtr& y) {
        TypePtr a = resolve(x), b = resolve(y);
        if (a == b) return true;
        if (a->kind == TypeKind::Meta) return bind(a->meta, b);
        if (b->kind == TypeKind::Meta) return bind(b->meta, a);
        if (a->kind == b->kind) {
            switch (a->kind) {
                case TypeKind::Nat:
                case TypeKind::Unit: return true;
                case TypeKind::Named:
                    return a->name == b->name || unifyRec(types::underlying(*a), types::underlying(*b));
                case TypeKind::Ref:
                case TypeKind::List: return unifyRec(a->first, b->first);
                case TypeKind::Arrow:
                case TypeKind::Product:
                case TypeKind::Sum: return unifyRec(a->first, b->first) && unifyRec(a->second, b->second);
                default: return false;
            }
        }
        if (a->kind == TypeKind::Named) return unifyRec(types::underlying(*a), b);
        if (b->kind == TypeKind::Named) return unifyRec(a, types::underlying(*b));
        if (a->kind == TypeKind::List && b->kind == TypeKind::Sum) return unifyRec(types::unfold(*a), b);
        if (b->kind == TypeKind::List && a->kind == TypeKind::Sum) return unifyRec(a, types::unfold(*b));
        return false;
    }

private:
    struct Frame {
        Checker* c;
        Frame(Checker* c, std::string label) : c(c) { c->path_.push_back(std::move(label)); }
        ~Frame() { c->path_.pop_back(); }
    };

    const Signature& sig_;
    std::vector<TypePtr> metas_;
    std::map<std::uint64_t, TypePtr> locations_;
    std::vector<std::string> path_;

    TypePtr fresh() {
        metas_.push_back(nullptr);
        return types::meta(static_cast<std::uint32_t>(metas_.size() - 1));
    }

    TypePtr resolve(TypePtr t) const {
        while (t->kind == TypeKind::Meta && metas_[t->meta]) t = metas_[t->meta];
        return t;
    }

    bool occurs(std::uint32_t m, const TypePtr& t) const {
        TypePtr r = resolve(t);
        if (r->kind == TypeKind::Meta) return r->meta == m;
        return (r->first && occurs(m, r->first)) || (r->second && occurs(m, r->second));
    }

    bool bind(std::uint32_t m, const TypePtr& t) {
        if (occurs(m, t)) return false;
        metas_[m] = t;
        return true;
    }

    TypePtr instantiate(const TypePtr& t) {
        if (!t) return fresh();
        switch (t->kind) {
            case TypeKind::Hole: return fresh();
            case TypeKind::Arrow: return types::arrow(instantiate(t->first), instantiate(t->second));
            case TypeKind::Product: return types::product(instantiate(t->first), instantiate(t->second));
            case TypeKind::Sum: return types::sum(instantiate(t->first), instantiate(t->second));
            case TypeKind::Ref: return types::ref(instantiate(t->first));
            case TypeKind::List: return types::list(instantiate(t->first));
            default: return t;
        }
    }
};

}  // namespace

TypePtr typecheck(const TypeEnv& env, const CompPtr& term, const Signature& sig) {
    Checker c(sig);
    return c.zonk(c.comp(env, term));
}

TypePtr typecheckValue(const TypeEnv& env, const ValuePtr& value, const Signature& sig) {
    Checker c(sig);
    return c.zonk(c.value(env, value));
}

TypePtr typecheck(const Program& program) { return typecheck({}, program.body, program.sig); }

TypePtr typecheckRuntime(const CompPtr& term, const Signature& sig, const std::map<std::uint64_t, ValuePtr>& store) {
    Checker c(sig);
    TypePtr t = c.comp({}, term);
    c.checkStore(store);
    return c.zonk(t);
}

bool sameType(const TypePtr& a, const TypePtr& b) {
    Signature none;
    Checker c(none);
    return c.unifyRec(a, b);
}

}  // namespace fx
