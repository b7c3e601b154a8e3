#pragma once

#include <functional>
#include <optional>

#include "fx/machine.hpp"

namespace fx::countlib {

enum class Level { Base, Handlers, BaseMemo, State };
/// Predicates a counter is correct on, ordered by inclusion.
enum class InputClass { NStandard, AtMostOnce, General };
enum class Kind { Predicate, Counter, Searcher, Point, Example };

std::string levelName(Level l);
std::string className(InputClass c);
std::string kindName(Kind k);

struct ProgramDescriptor {
    std::string name;
    std::string summary;
    Level level;
    InputClass inputClass;  // counters: what they accept; predicates: the class they belong to
    Kind kind;
    bool parameterised;
    std::function<Program(unsigned n)> build;
    /// Number of indices of the search space at parameter n.
    std::function<unsigned(unsigned n)> arity = [](unsigned n) { return n; };
};

/// Every named program, in display order.
const std::vector<ProgramDescriptor>& catalog();
/// Throws EvalError for unknown names.
const ProgramDescriptor& find(const std::string& name);
/// The points, predicates and the toss example.
std::vector<ProgramDescriptor> examplePrograms();

bool accepts(InputClass counter, InputClass predicate);
/// Checks the syntactic restrictions of the level (no do/handle in Base, and so on).
bool conformsTo(const Program& p, Level l);

// Builders. Each returns a parsed, unchecked program whose body evaluates to the named value.
Program mkPoint(int which);      // q0, q1, q2
Program mkConstant(int which);   // T0, T1, T2
Program mkIdentity(int which);   // I0, I1, I2
Program mkOdd(unsigned n);       // fold xor false (map q [0..n-1])
Program mkOddFused(unsigned n);  // a single loop with an accumulator
Program mkBottom();
Program mkToss();
Program mkNaiveCount(unsigned n);
Program mkBestshot(unsigned n);
Program mkLazyCount(unsigned n);
Program mkEffCount();
Program mkEffCountRepeated(unsigned n);
Program mkEffCountMissing(unsigned n);
Program mkEffSearch(unsigned n, bool hughes = true);
Program mkBergerCount(unsigned n, bool memo = true);
enum class Queens { Eager, FailFast };
Program mkQueensPredicate(unsigned n, Queens variant);

/// Hughes lists over element type elem: nil, singleton, concat, toConsList bound in order,
/// followed by body.
std::string hughesPrelude(const std::string& elem);

/// Host-side backtracking count of n-queens solutions.
std::uint64_t queensSolutions(unsigned n);

/// `fun i -> if i = 0 then b0 else ... else false`.
Program pointTerm(const std::vector<bool>& bits);

struct CountOutcome {
    machine::RunResult run;
    std::optional<std::uint64_t> count;     // a Nat, or the list length for searchers
    std::vector<machine::MValuePtr> items;  // list elements, when the result is a list
};

/// Evaluates both programs to values untimed, then times `counter pred` from tick 0.
CountOutcome runCounter(const Program& counter, const Program& pred, std::uint64_t fuel = machine::kDefaultFuel);
CountOutcome runCounter(const machine::MValuePtr& counter, const machine::MValuePtr& pred, bool handlers,
                        std::uint64_t fuel = machine::kDefaultFuel);

/// The semantic point with the given bits, as a closure over a list; indices beyond the bits read false.
machine::MValuePtr pointValue(const std::vector<bool>& bits);
/// `pred point` on the base machine; nullopt unless it returns a boolean within fuel.
std::optional<bool> applyPredicate(const machine::MValuePtr& pred, const machine::MValuePtr& point,
                                   std::uint64_t fuel = machine::kDefaultFuel);
/// Number of points of B^arity the predicate accepts, by applying it to each. Throws EvalError
/// when some application does not return a boolean.
std::uint64_t bruteForceCount(const machine::MValuePtr& pred, unsigned arity);

/// Decodes an object-language list.
std::optional<std::vector<machine::MValuePtr>> listItems(const machine::MValuePtr& v);

}  // namespace fx::countlib
