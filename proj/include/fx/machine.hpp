#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "fx/persistent.hpp"
#include "fx/smallstep.hpp"
#include "fx/syntax.hpp"

namespace fx::machine {

struct MValue;
using MValuePtr = std::shared_ptr<const MValue>;
using Env = PersistentMap<std::uint32_t, MValuePtr>;

/// `let x <- [] in body` closed over env, or a marker that stores the returned value in a memo cell.
struct PureFrame {
    Env env;
    Var var;
    CompPtr body;
    std::optional<std::uint64_t> memoCell;
};
using PureCont = PersistentList<PureFrame>;

/// A handler closed over its environment. A null handler is the identity handler.
struct HandlerClosure {
    Env env;
    HandlerPtr handler;
    bool identity() const { return !handler; }
};

struct Resumption {
    PureCont pure;
    HandlerClosure handler;
};
using GenCont = PersistentList<Resumption>;

struct MNum { std::uint64_t n; };
struct MConst { ConstOp op; };
struct MUnit {};
struct MPair { MValuePtr first, second; };
struct MInj { bool left; MValuePtr payload; };
struct MClosure { Env env; ValuePtr fn; };  // fn is a VLam or VRec
struct MLoc { std::uint64_t index; };
struct MResumption { Resumption res; };
struct MMemo { std::uint64_t cell; MValuePtr thunk; };
/// The distinguished free variable used to probe predicates.
struct MProbe { Var var; };

struct MValue {
    std::variant<MNum, MConst, MUnit, MPair, MInj, MClosure, MLoc, MResumption, MMemo, MProbe> node;
};

namespace mval {
MValuePtr num(std::uint64_t n);
MValuePtr unit();
MValuePtr boolean(bool b);
MValuePtr pair(MValuePtr a, MValuePtr b);
MValuePtr inj(bool left, MValuePtr payload);
std::optional<bool> asBool(const MValuePtr& v);
std::optional<std::uint64_t> asNum(const MValuePtr& v);
}  // namespace mval

enum class Mode { Base, Handler };

enum class Rule {
    App, Rec, Const, Split, CaseL, CaseR, Let, RetCont,
    Handle, RetHandler, HandleOp, Resume,
    LetRef, Deref, Assign,
    Memo, MemoForce, MemoHit, MemoStore,
};
const char* ruleName(Rule r);
/// Rules under which decompilation is invariant.
bool isAdministrative(Rule r, bool identityHandler);

/// Control is either a computation under env, or an already computed value being returned.
struct Config {
    Mode mode = Mode::Handler;
    CompPtr comp;
    Env env;
    MValuePtr value;
    PureCont pure;
    std::optional<HandlerClosure> handler;  // empty once the bottom handler has returned
    GenCont rest;
    PersistentMap<std::uint64_t, MValuePtr> store;
    std::uint64_t nextLoc = 0;
    PersistentMap<std::uint64_t, MValuePtr> memo;
    std::uint64_t nextMemo = 0;
    std::uint64_t tick = 0;
    std::uint64_t envOps = 0;

    bool returning() const;
    /// Returning with nothing above the bottom identity handler.
    bool atAnswer() const;
    std::size_t depth() const;
};

struct BaseMachineUnsupported : EvalError {
    BaseMachineUnsupported() : EvalError("the base machine does not support do/handle") {}
};

Config injectBase(const CompPtr& term);
/// ⟨M | env | κ0⟩; handlers in the term are completed against sig.
Config injectHandler(const CompPtr& term, const Signature& sig, Env env = {});

enum class Status { Stepped, Value, Unhandled, ProbeApplied };

struct StepOutcome {
    Status status;
    Rule rule{};       // Stepped
    std::string op;    // Unhandled
    MValuePtr arg;     // Unhandled: operation argument; ProbeApplied: probe argument
};

/// Fires one transition in place. Probe applications and final states leave cfg untouched.
StepOutcome step(Config& cfg);
StepOutcome stepBase(Config& cfg);
StepOutcome stepHandler(Config& cfg);

inline constexpr std::uint64_t kDefaultFuel = 100'000'000;

enum class Final { Value, Unhandled, FuelExhausted };

struct RunResult {
    Final final;
    MValuePtr value;
    std::string op;
    MValuePtr opArg;
    Config config;
    std::uint64_t ticks = 0;
    std::uint64_t envOps = 0;
};

using TraceFn = std::function<void(const Config& before, Rule rule)>;

/// Base machine for handler-free terms, handler machine otherwise.
RunResult runMachine(const CompPtr& term, const Signature& sig, std::uint64_t fuel = kDefaultFuel,
                     const TraceFn& trace = nullptr);
RunResult drive(Config cfg, std::uint64_t fuel, const TraceFn& trace = nullptr);

/// Evaluates a closed term to a machine value on the handler machine; tick counts are discarded.
MValuePtr evaluateToValue(const CompPtr& term, const Signature& sig, std::uint64_t fuel = kDefaultFuel);
/// ⟨f a | γ | κ⟩ with tick 0, where γ binds f and a; κ is κ0 in handler mode and empty in base mode.
Config applicationConfig(const MValuePtr& fn, const MValuePtr& arg, Mode mode);
/// Evaluates the value being returned by a returning configuration.
MValuePtr returnedValue(Config& cfg);

/// One trace line: `tick=N rule=M-X comp=<head> depth(κ)=K`.
std::string traceLine(const Config& before, Rule rule);
std::string headForm(const Config& cfg);

struct StepReport {
    std::string implName;
    std::string predName;
    unsigned n = 0;
    std::string result;
    std::uint64_t ticks = 0;
    std::uint64_t envOps = 0;
};

ValuePtr decompile(const MValuePtr& v);
CompPtr decompile(const Config& cfg);
/// Runtime store as terms, for comparison with the small-step store.
smallstep::Store decompileStore(const Config& cfg);

}  // namespace fx::machine
