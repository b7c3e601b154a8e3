#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fx {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------- errors

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line(line), column(column) {}
    int line, column;
};

class TypeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An interpreter invariant was violated (stuck term, ill-formed configuration).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- types

enum class TypeKind { Nat, Unit, Arrow, Product, Sum, Ref, List, Named, Meta, Hole };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
    TypeKind kind;
    TypePtr first;   // Arrow domain, Product/Sum left, Ref/List element
    TypePtr second;  // Arrow codomain, Product/Sum right
    std::string name;                 // Named
    std::vector<std::string> ctors;   // Named: nullary constructors in order
    std::uint32_t meta = 0;           // Meta
};

namespace types {
TypePtr nat();
TypePtr unit();
TypePtr boolean();
TypePtr arrow(TypePtr a, TypePtr b);
TypePtr product(TypePtr a, TypePtr b);
TypePtr sum(TypePtr a, TypePtr b);
TypePtr ref(TypePtr a);
TypePtr list(TypePtr a);
TypePtr named(std::string name, std::vector<std::string> ctors);
TypePtr meta(std::uint32_t id);
TypePtr hole();

/// Unit for one constructor, otherwise Unit + (rest).
TypePtr underlying(const Type& named);
/// Unit + (A * List A)
TypePtr unfold(const Type& list);

bool isBool(const Type& t);
bool equal(const TypePtr& a, const TypePtr& b);
}  // namespace types

std::string toString(const TypePtr& t);

// ---------------------------------------------------------------- binders

/// A binder: unique id plus the name it was written with.
struct Var {
    std::uint32_t id = 0;
    std::string name;

    static Var fresh(std::string name);
    friend bool operator==(const Var& a, const Var& b) { return a.id == b.id; }
    friend bool operator<(const Var& a, const Var& b) { return a.id < b.id; }
};

// ---------------------------------------------------------------- terms

enum class ConstOp { Plus, Minus, Eq };

struct Value;
struct Comp;
struct Handler;
using ValuePtr = std::shared_ptr<const Value>;
using CompPtr = std::shared_ptr<const Comp>;
using HandlerPtr = std::shared_ptr<const Handler>;

struct VVar { Var var; };
struct VNum { std::uint64_t n; };
struct VConst { ConstOp op; };
struct VLam { Var param; TypePtr paramType; CompPtr body; };
struct VRec { Var self; Var param; TypePtr paramType; TypePtr resultType; CompPtr body; };
struct VUnit {};
struct VPair { ValuePtr first, second; };
/// inl/inr; `ann` optionally names the whole sum type (Bool, a list, a data type).
struct VInj { bool left; ValuePtr payload; TypePtr ann; };
struct VLoc { std::uint64_t index; };

struct Value {
    std::variant<VVar, VNum, VConst, VLam, VRec, VUnit, VPair, VInj, VLoc> node;
};

struct CApp { ValuePtr fn, arg; };
struct CSplit { Var first, second; ValuePtr pair; CompPtr body; };
struct CCase { ValuePtr scrutinee; Var leftVar; CompPtr left; Var rightVar; CompPtr right; };
struct CReturn { ValuePtr value; };
struct CLet { Var var; CompPtr bound; CompPtr body; };
struct CDo { std::string op; ValuePtr arg; };
struct CHandle { CompPtr body; HandlerPtr handler; };
struct CLetRef { Var var; ValuePtr init; CompPtr body; };
struct CDeref { ValuePtr ref; };
struct CAssign { ValuePtr ref; ValuePtr value; };
struct CMemoise { ValuePtr thunk; };

struct Comp {
    std::variant<CApp, CSplit, CCase, CReturn, CLet, CDo, CHandle, CLetRef, CDeref, CAssign, CMemoise> node;
};

struct OpClause {
    std::string op;
    Var param;
    Var resume;
    CompPtr body;
};

struct Handler {
    Var valVar;
    CompPtr valBody;
    std::vector<OpClause> clauses;

    const OpClause* find(const std::string& op) const;
};

struct OpType {
    TypePtr arg;
    TypePtr result;
};

using Signature = std::map<std::string, OpType>;

struct Program {
    Signature sig;
    std::vector<TypePtr> data;
    CompPtr body;
};

// ---------------------------------------------------------------- builders

namespace build {
ValuePtr var(const Var& x);
ValuePtr num(std::uint64_t n);
ValuePtr constant(ConstOp op);
ValuePtr lam(const Var& x, CompPtr body, TypePtr paramType = nullptr);
ValuePtr rec(const Var& f, const Var& x, CompPtr body, TypePtr paramType = nullptr, TypePtr resultType = nullptr);
ValuePtr unit();
ValuePtr pair(ValuePtr a, ValuePtr b);
ValuePtr inl(ValuePtr v, TypePtr ann = nullptr);
ValuePtr inr(ValuePtr v, TypePtr ann = nullptr);
ValuePtr boolean(bool b);
ValuePtr loc(std::uint64_t index);

CompPtr app(ValuePtr f, ValuePtr a);
CompPtr split(const Var& x, const Var& y, ValuePtr pair, CompPtr body);
CompPtr caseOf(ValuePtr v, const Var& x, CompPtr left, const Var& y, CompPtr right);
CompPtr ifThenElse(ValuePtr cond, CompPtr thenBranch, CompPtr elseBranch);
CompPtr ret(ValuePtr v);
CompPtr let(const Var& x, CompPtr bound, CompPtr body);
CompPtr perform(std::string op, ValuePtr arg);
CompPtr handle(CompPtr body, HandlerPtr h);
CompPtr letref(const Var& x, ValuePtr init, CompPtr body);
CompPtr deref(ValuePtr r);
CompPtr assign(ValuePtr r, ValuePtr v);
CompPtr memoise(ValuePtr thunk);
}  // namespace build

// ---------------------------------------------------------------- utilities

/// Adds a forwarding clause {l p r -> let x <- do l p in r x} for each operation of sig the handler lacks.
HandlerPtr completeHandler(const HandlerPtr& h, const Signature& sig);
/// completeHandler applied to every handler in the term.
CompPtr completeAll(const CompPtr& m, const Signature& sig);
ValuePtr completeAll(const ValuePtr& v, const Signature& sig);

bool usesHandlers(const CompPtr& m);   // any do/handle
bool usesState(const CompPtr& m);      // any letref/!/:= or location
bool usesMemoise(const CompPtr& m);
bool usesHandlers(const ValuePtr& v);
bool usesState(const ValuePtr& v);
bool usesMemoise(const ValuePtr& v);
/// True when some handler in the term has a clause for op.
bool handlesOperation(const CompPtr& m, const std::string& op);
bool handlesOperation(const ValuePtr& v, const std::string& op);

/// Capture-free substitution of closed values for variables.
using Substitution = std::map<std::uint32_t, ValuePtr>;
CompPtr substitute(const CompPtr& m, const Substitution& s);
ValuePtr substitute(const ValuePtr& v, const Substitution& s);

/// Alpha-equivalence; type annotations are ignored.
bool alphaEqual(const CompPtr& a, const CompPtr& b);
bool alphaEqual(const ValuePtr& a, const ValuePtr& b);

std::size_t termSize(const CompPtr& m);

/// Free variables in order of first occurrence.
std::vector<Var> freeVars(const CompPtr& m);
std::vector<Var> freeVars(const ValuePtr& v);
bool mentions(const CompPtr& m, const Var& x);

}  // namespace fx
