#include "doctest.h"

#include "fx/countlib.hpp"
#include "fx/smallstep.hpp"
#include "fx/text.hpp"
#include "fx/trees.hpp"
#include "fx/typecheck.hpp"

using namespace fx;
using namespace fx::countlib;
using namespace fx::machine;

namespace {

Program checked(Program p) {
    typecheck(p);
    return p;
}

std::uint64_t countWith(const Program& counter, const Program& pred) {
    CountOutcome r = runCounter(checked(counter), checked(pred));
    REQUIRE(r.run.final == Final::Value);
    REQUIRE(r.count.has_value());
    return *r.count;
}

std::uint64_t ticksOf(const Program& counter, const Program& pred) {
    CountOutcome r = runCounter(counter, pred);
    REQUIRE(r.run.final == Final::Value);
    return r.run.ticks;
}

std::optional<bool> applyTo(const Program& pred, const Program& point, std::uint64_t fuel = kDefaultFuel) {
    CountOutcome r = runCounter(pred, point, fuel);
    if (r.run.final != Final::Value) return std::nullopt;
    return mval::asBool(r.run.value);
}

const char* kPredicateType = "(Nat -> Bool) -> Bool";
const char* kCounterType = "((Nat -> Bool) -> Bool) -> Nat";

}  // namespace

TEST_CASE("every catalog entry typechecks at its role's type and level") {
    for (const auto& d : catalog()) {
        for (unsigned n : {1u, 2u, 3u, 5u, 12u}) {
            if (!d.parameterised && n > 1) break;
            if (d.name.rfind("queens", 0) == 0 && n > 5) continue;
            CAPTURE(d.name);
            CAPTURE(n);
            Program p = d.build(n);
            std::string type = toString(typecheck(p));
            if (d.kind == Kind::Predicate) CHECK(type == kPredicateType);
            if (d.kind == Kind::Counter) CHECK(type == kCounterType);
            if (d.kind == Kind::Searcher) CHECK(type == "((Nat -> Bool) -> Bool) -> List (Nat -> Bool)");
            if (d.kind == Kind::Point) CHECK(type == "Nat -> Bool");
            CHECK(conformsTo(p, d.level));
        }
    }
    CHECK_THROWS_AS(find("nope"), EvalError);
}

TEST_CASE("points and example predicates") {
    Program odd2 = checked(mkOdd(2));
    CHECK(applyTo(odd2, mkPoint(0)) == false);
    CHECK(applyTo(odd2, mkPoint(1)) == true);
    CHECK(applyTo(mkIdentity(0), mkPoint(1)) == true);

    // q1 is true exactly at 0
    for (unsigned i = 0; i < 5; ++i) {
        CountOutcome r = runCounter(mkPoint(1), checked(parseProgram(std::to_string(i))));
        REQUIRE(r.run.final == Final::Value);
        CHECK(mval::asBool(r.run.value) == (i == 0));
    }
    CountOutcome spin = runCounter(mkPoint(2), parseProgram("2"), 10000);
    CHECK(spin.run.final == Final::FuelExhausted);
}

TEST_CASE("toss enumerates both outcomes") {
    Program p = mkToss();
    TypePtr type = typecheck(p);
    RunResult r = runMachine(p.body, p.sig);
    REQUIRE(r.final == Final::Value);
    CHECK(printAt(decompile(r.value), type) == "[Heads, Tails]");
}

TEST_CASE("naive and lazy counting") {
    CHECK(countWith(mkNaiveCount(2), mkOdd(2)) == 2);
    CHECK(countWith(mkNaiveCount(3), mkConstant(0)) == 8);
    CHECK(countWith(mkLazyCount(2), mkOdd(2)) == 2);
    Program never = checked(parseProgram("fun (q : Nat -> Bool) -> false"));
    CHECK(countWith(mkLazyCount(4), never) == 0);
    CHECK(ticksOf(mkLazyCount(2), never) == ticksOf(mkLazyCount(9), never));
    for (unsigned n = 2; n <= 6; ++n)
        CHECK(ticksOf(mkNaiveCount(n), mkOddFused(n)) >= n * (1u << n));
}

TEST_CASE("bestshot finds an odd point") {
    Program odd2 = checked(mkOdd(2));
    MValuePtr shot = runCounter(mkBestshot(2), odd2).run.value;
    MValuePtr pred = evaluateToValue(odd2.body, odd2.sig);
    CountOutcome r = runCounter(pred, shot, false);
    REQUIRE(r.run.final == Final::Value);
    CHECK(mval::asBool(r.run.value) == true);
}

TEST_CASE("effcount") {
    for (unsigned n = 1; n <= 6; ++n) CHECK(countWith(mkEffCount(), mkOddFused(n)) == (1u << (n - 1)));
    CHECK(countWith(mkEffCount(), mkOdd(4)) == 8);
    CHECK(countWith(mkEffCount(), mkConstant(0)) == 1);
}

TEST_CASE("effcount ticks follow the closed form") {
    for (unsigned n = 1; n <= 6; ++n) {
        Program pred = checked(mkOddFused(n));
        trees::DecisionTree t = trees::extractTree(pred.body, pred.sig);
        REQUIRE(trees::classify(t, n).cls == trees::Class::NStandard);
        CHECK(ticksOf(mkEffCount(), pred) == t.totalSteps() + 11 * (1u << n) - 6);
    }
}

TEST_CASE("effcount with remembered answers") {
    CHECK(countWith(mkEffCountRepeated(1), mkIdentity(2)) == 1);
    CHECK(countWith(mkEffCountRepeated(2), mkConstant(2)) == 4);
    CHECK(countWith(mkEffCountRepeated(2), mkConstant(1)) == 4);
    CHECK(countWith(mkEffCountRepeated(2), mkIdentity(2)) == 2);
    for (unsigned n = 1; n <= 7; ++n) CHECK(countWith(mkEffCountRepeated(n), mkOddFused(n)) == (1u << (n - 1)));
}

TEST_CASE("effcount with missing queries") {
    CHECK(countWith(mkEffCountMissing(3), mkConstant(0)) == 8);
    CHECK(countWith(mkEffCountMissing(2), mkIdentity(0)) == 2);
    for (unsigned n = 1; n <= 6; ++n) CHECK(countWith(mkEffCountMissing(n), mkOddFused(n)) == (1u << (n - 1)));
}

TEST_CASE("effsearch returns satisfying points") {
    for (bool hughes : {true, false}) {
        CAPTURE(hughes);
        Program odd2 = checked(mkOdd(2));
        CountOutcome r = runCounter(checked(mkEffSearch(2, hughes)), odd2);
        REQUIRE(r.run.final == Final::Value);
        REQUIRE(r.items.size() == 2);
        MValuePtr pred = evaluateToValue(odd2.body, odd2.sig);
        for (const auto& point : r.items) {
            CountOutcome a = runCounter(pred, point, false);
            REQUIRE(a.run.final == Final::Value);
            CHECK(mval::asBool(a.run.value) == true);
        }
    }
    std::uint64_t viaHughes = ticksOf(mkEffSearch(6, true), mkOddFused(6));
    std::uint64_t viaAppend = ticksOf(mkEffSearch(6, false), mkOddFused(6));
    CHECK(viaHughes <= viaAppend);
}

TEST_CASE("Hughes lists concatenate in order") {
    std::string src = hughesPrelude("Nat") +
                      "let a <- concat (singleton 1) (singleton 2) in let b <- concat a (singleton 3) in"
                      " let c <- concat nil b in toConsList c";
    Program p = parseProgram(src);
    TypePtr type = typecheck(p);
    RunResult r = runMachine(p.body, p.sig);
    REQUIRE(r.final == Final::Value);
    CHECK(printAt(decompile(r.value), type) == "[1, 2, 3]");
}

TEST_CASE("Berger count") {
    Program never = parseProgram("fun (q : Nat -> Bool) -> false");
    CHECK(countWith(mkBergerCount(3), never) == 0);
    for (unsigned n = 1; n <= 5; ++n) {
        CHECK(countWith(mkBergerCount(n), mkOddFused(n)) == (1u << (n - 1)));
        CHECK(countWith(mkBergerCount(n, false), mkOddFused(n)) == (1u << (n - 1)));
    }
    CHECK(countWith(mkBergerCount(2), mkIdentity(2)) == 2);
    CHECK(countWith(mkBergerCount(3), mkConstant(0)) == 8);
}

TEST_CASE("queens") {
    CHECK(queensSolutions(4) == 2);
    CHECK(queensSolutions(5) == 10);
    CHECK(queensSolutions(8) == 92);
    Program fast4 = checked(mkQueensPredicate(4, Queens::FailFast));
    CHECK(countWith(mkEffCountMissing(16), fast4) == 2);
    CHECK(countWith(mkEffSearch(16), fast4) == 2);
    CHECK(countWith(mkBergerCount(16), fast4) == 2);

    Program eager2 = checked(mkQueensPredicate(2, Queens::Eager));
    trees::DecisionTree t = trees::extractTree(eager2.body, eager2.sig);
    CHECK(trees::classify(t, 4).cls == trees::Class::NStandard);
    CHECK(t.leaves() == 16);
    CHECK(countWith(mkEffCount(), eager2) == 0);
    CHECK(countWith(mkEffCount(), mkQueensPredicate(1, Queens::Eager)) == 1);
}

TEST_CASE("queens solutions found by effcount-missing agree with the oracle for n = 5") {
    CHECK(countWith(mkEffCountMissing(25), mkQueensPredicate(5, Queens::FailFast)) == 10);
}

TEST_CASE("point terms") {
    Program p = checked(pointTerm({true, false, true}));
    for (unsigned i = 0; i < 4; ++i) {
        CountOutcome r = runCounter(p, parseProgram(std::to_string(i)));
        CHECK(mval::asBool(r.run.value) == (i == 0 || i == 2));
    }
}

TEST_CASE("Hughes-list concatenation distributes as append") {
    std::mt19937_64 rng(41);
    auto randomList = [&](std::vector<int>& items) {
        // a random association of concatenations over singletons
        std::function<std::string(std::size_t, std::size_t)> build = [&](std::size_t lo, std::size_t hi) -> std::string {
            if (lo == hi) return "nil";
            if (hi - lo == 1) return "(singleton " + std::to_string(items[lo]) + ")";
            std::size_t mid = lo + 1 + rng() % (hi - lo - 1);
            return "(concat " + build(lo, mid) + " " + build(mid, hi) + ")";
        };
        items.resize(rng() % 6);
        for (auto& x : items) x = static_cast<int>(rng() % 10);
        return build(0, items.size());
    };
    for (int i = 0; i < 100; ++i) {
        std::vector<int> a, b;
        std::string f = randomList(a), g = randomList(b);
        std::string src = hughesPrelude("Nat") + "let f <- " + f + " in let g <- " + g +
                          " in let fg <- concat f g in toConsList fg";
        Program p = parseProgram(src);
        TypePtr type = typecheck(p);
        RunResult r = runMachine(p.body, p.sig);
        REQUIRE(r.final == Final::Value);
        std::string expected = "[";
        std::vector<int> all = a;
        all.insert(all.end(), b.begin(), b.end());
        for (std::size_t k = 0; k < all.size(); ++k) expected += (k ? ", " : "") + std::to_string(all[k]);
        CHECK(printAt(decompile(r.value), type) == expected + "]");
    }
}
