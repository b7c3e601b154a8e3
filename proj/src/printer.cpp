#include <cctype>
#include <set>
#include <sstream>

#include "fx/text.hpp"

namespace fx {

namespace {

const std::set<std::string> kReserved = {"let",  "in",     "fun",    "rec",     "return", "do",        "handle",
                                         "with", "case",   "inl",    "inr",     "if",     "then",      "else",
                                         "letref", "memoise", "true", "false", "operation", "data", "val"};

bool validIdent(const std::string& s) {
    if (s.empty() || !(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return s != "_";
}

class Printer {
public:
    explicit Printer(const std::vector<Var>& free) {
        for (const auto& v : free) {
            reserved_.insert(v.name);
            names_[v.id] = v.name;
        }
    }

    void comp(const CompPtr& m, std::ostream& os) {
        std::visit(overloaded{
                       [&](const CApp& c) {
                           atom(c.fn, os);
                           os << ' ';
                           atom(c.arg, os);
                       },
                       [&](const CSplit& c) {
                           std::ostringstream pair;
                           value(c.pair, pair);
                           std::string a = bind(c.first, c.body), b = bind(c.second, c.body);
                           os << "let (" << a << ", " << b << ") = " << pair.str() << " in ";
                           comp(c.body, os);
                           unbind(c.second);
                           unbind(c.first);
                       },
                       [&](const CCase& c) {
                           os << "case ";
                           value(c.scrutinee, os);
                           os << " {inl ";
                           os << bind(c.leftVar, c.left) << " -> ";
                           comp(c.left, os);
                           unbind(c.leftVar);
                           os << "; inr " << bind(c.rightVar, c.right) << " -> ";
                           comp(c.right, os);
                           unbind(c.rightVar);
                           os << '}';
                       },
                       [&](const CReturn& c) {
                           os << "return ";
                           atom(c.value, os);
                       },
                       [&](const CLet& c) {
                           os << "let ";
                           std::ostringstream bound;
                           comp(c.bound, bound);
                           os << bind(c.var, c.body) << " <- " << bound.str() << " in ";
                           comp(c.body, os);
                           unbind(c.var);
                       },
                       [&](const CDo& c) {
                           os << "do " << c.op << ' ';
                           atom(c.arg, os);
                       },
                       [&](const CHandle& c) {
                           os << "handle ";
                           comp(c.body, os);
                           os << " with {val " << bind(c.handler->valVar, c.handler->valBody) << " -> ";
                           comp(c.handler->valBody, os);
                           unbind(c.handler->valVar);
                           for (const auto& cl : c.handler->clauses) {
                               os << " | " << cl.op << ' ' << bind(cl.param, cl.body) << ' ' << bind(cl.resume, cl.body)
                                  << " -> ";
                               comp(cl.body, os);
                               unbind(cl.resume);
                               unbind(cl.param);
                           }
                           os << '}';
                       },
                       [&](const CLetRef& c) {
                           std::ostringstream init;
                           value(c.init, init);
                           os << "letref " << bind(c.var, c.body) << " = " << init.str() << " in ";
                           comp(c.body, os);
                           unbind(c.var);
                       },
                       [&](const CDeref& c) {
                           os << '!';
                           atom(c.ref, os);
                       },
                       [&](const CAssign& c) {
                           atom(c.ref, os);
                           os << " := ";
                           atom(c.value, os);
                       },
                       [&](const CMemoise& c) {
                           os << "memoise ";
                           atom(c.thunk, os);
                       },
                   },
                   m->node);
    }

    void value(const ValuePtr& v, std::ostream& os) {
        std::visit(overloaded{
                       [&](const VVar& x) { os << nameOf(x.var); },
                       [&](const VNum& n) { os << n.n; },
                       [&](const VConst& c) {
                           os << (c.op == ConstOp::Plus ? "(+)" : c.op == ConstOp::Minus ? "(-)" : "(=)");
                       },
                       [&](const VLam& l) {
                           os << "fun ";
                           bool annotated = l.paramType && l.paramType->kind != TypeKind::Hole;
                           std::string x = bind(l.param, l.body, annotated);
                           if (annotated)
                               os << '(' << x << " : " << toString(l.paramType) << ')';
                           else
                               os << x;
                           os << " -> ";
                           comp(l.body, os);
                           unbind(l.param);
                       },
                       [&](const VRec& r) {
                           std::string f = bind(r.self, r.body, true);
                           std::string x = bind(r.param, r.body, true);
                           os << "rec " << f << ' ';
                           if (r.paramType && r.paramType->kind != TypeKind::Hole)
                               os << '(' << x << " : " << toString(r.paramType) << ')';
                           else
                               os << x;
                           if (r.resultType && r.resultType->kind != TypeKind::Hole)
                               os << " : " << (r.resultType->kind == TypeKind::Arrow
                                                   ? "(" + toString(r.resultType) + ")"
                                                   : toString(r.resultType));
                           os << " -> ";
                           comp(r.body, os);
                           unbind(r.param);
                           unbind(r.self);
                       },
                       [&](const VUnit&) { os << "()"; },
                       [&](const VPair& p) {
                           os << '(';
                           value(p.first, os);
                           os << ", ";
                           value(p.second, os);
                           os << ')';
                       },
                       [&](const VInj& i) {
                           if (i.ann && types::isBool(*i.ann) && std::holds_alternative<VUnit>(i.payload->node)) {
                               os << (i.left ? "true" : "false");
                               return;
                           }
                           os << (i.left ? "inl " : "inr ");
                           atom(i.payload, os);
                       },
                       [&](const VLoc& l) { os << "<loc " << l.index << '>'; },
                   },
                   v->node);
    }

    void atom(const ValuePtr& v, std::ostream& os) {
        bool simple = std::visit(overloaded{
                                     [](const VLam&) { return false; },
                                     [](const VRec&) { return false; },
                                     [](const VInj& i) {
                                         return i.ann && types::isBool(*i.ann) &&
                                                std::holds_alternative<VUnit>(i.payload->node);
                                     },
                                     [](const auto&) { return true; },
                                 },
                                 v->node);
        if (!simple) os << '(';
        value(v, os);
        if (!simple) os << ')';
    }

private:
    std::map<std::uint32_t, std::string> names_;
    std::map<std::string, int> inScope_;
    std::set<std::string> reserved_;

    std::string nameOf(const Var& x) {
        auto it = names_.find(x.id);
        return it != names_.end() ? it->second : x.name;
    }

    bool taken(const std::string& s) const {
        auto it = inScope_.find(s);
        return (it != inScope_.end() && it->second > 0) || reserved_.count(s) || kReserved.count(s);
    }

    std::string bind(const Var& x, const CompPtr& body, bool forceName = false) {
        std::string base = x.name;
        if (base == "_" && !forceName && !mentions(body, x)) {
            names_[x.id] = "_";
            return "_";
        }
        if (!validIdent(base)) base = "v";
        std::string cand = base;
        for (int k = 1; taken(cand); ++k) cand = base + std::to_string(k);
        ++inScope_[cand];
        names_[x.id] = cand;
        return cand;
    }

    void unbind(const Var& x) {
        auto it = names_.find(x.id);
        if (it == names_.end()) return;
        if (it->second != "_") --inScope_[it->second];
    }
};

}  // namespace

std::string print(const CompPtr& m) {
    Printer p(freeVars(m));
    std::ostringstream os;
    p.comp(m, os);
    return os.str();
}

std::string print(const ValuePtr& v) {
    Printer p(freeVars(v));
    std::ostringstream os;
    p.value(v, os);
    return os.str();
}

std::string printAt(const ValuePtr& v, const TypePtr& type) {
    if (!type) return print(v);
    const Type& t = *type;
    if (types::isBool(t)) {
        if (const auto* inj = std::get_if<VInj>(&v->node)) return inj->left ? "true" : "false";
    }
    switch (t.kind) {
        case TypeKind::List: {
            std::string out = "[";
            ValuePtr cur = v;
            for (bool first = true;; first = false) {
                const auto* inj = std::get_if<VInj>(&cur->node);
                if (!inj) return print(v);
                if (inj->left) return out + "]";
                const auto* cell = std::get_if<VPair>(&inj->payload->node);
                if (!cell) return print(v);
                out += (first ? "" : ", ") + printAt(cell->first, t.first);
                cur = cell->second;
            }
        }
        case TypeKind::Named: {
            ValuePtr cur = v;
            for (std::size_t i = 0; i + 1 < t.ctors.size(); ++i) {
                const auto* inj = std::get_if<VInj>(&cur->node);
                if (!inj) return print(v);
                if (inj->left) return t.ctors[i];
                cur = inj->payload;
            }
            return t.ctors.empty() ? print(v) : t.ctors.back();
        }
        case TypeKind::Product:
            if (const auto* p = std::get_if<VPair>(&v->node))
                return "(" + printAt(p->first, t.first) + ", " + printAt(p->second, t.second) + ")";
            break;
        case TypeKind::Sum:
            if (const auto* inj = std::get_if<VInj>(&v->node))
                return std::string(inj->left ? "inl " : "inr ") + "(" +
                       printAt(inj->payload, inj->left ? t.first : t.second) + ")";
            break;
        default: break;
    }
    return print(v);
}

std::string print(const Program& prog) {
    std::ostringstream os;
    for (const auto& d : prog.data) {
        os << "data " << d->name << " =";
        for (std::size_t i = 0; i < d->ctors.size(); ++i) os << (i ? " | " : " ") << d->ctors[i];
        os << '\n';
    }
    for (const auto& [op, t] : prog.sig) os << "operation " << op << " : " << toString(types::arrow(t.arg, t.result)) << '\n';
    os << print(prog.body) << '\n';
    return os.str();
}

}  // namespace fx
