#include "doctest.h"

#include "fx/smallstep.hpp"
#include "fx/text.hpp"
#include "fx/typecheck.hpp"

using namespace fx;
using namespace fx::smallstep;

namespace {

const char* kToss = R"(
operation Branch : Unit -> Bool
data Toss = Heads | Tails
let append = rec app (xs : List Toss) -> fun (ys : List Toss) ->
  case xs {inl _ -> ys; inr c -> let (h, t) = c in let r <- app t ys in h :: r} in
let toss = fun _ -> if do Branch () then Heads else Tails in
handle toss () with {val x -> [x] | Branch _ r -> append (r true) (r false)}
)";

EvalResult run(const std::string& src, std::uint64_t fuel = 100000) {
    Program p = parseProgram(src);
    typecheck(p);
    return evaluate(p.body, p.sig, fuel);
}

}  // namespace

TEST_CASE("beta step") {
    Var x = Var::fresh("x");
    CompPtr m = build::app(build::lam(x, build::ret(build::var(x))), build::unit());
    auto r = step(StateConfig{m}, {});
    REQUIRE(std::holds_alternative<StateConfig>(r));
    CHECK(alphaEqual(std::get<StateConfig>(r).term, build::ret(build::unit())));
    CHECK(std::holds_alternative<Normal>(step(std::get<StateConfig>(r), {})));
}

TEST_CASE("return clause fires on a returned value") {
    Program p = parseProgram("operation Branch : Unit -> Bool\n"
                             "handle return true with {val x -> if x then 1 else 0 | Branch _ r -> r true}");
    auto r = step(StateConfig{p.body}, p.sig);
    REQUIRE(std::holds_alternative<StateConfig>(r));
    CompPtr expected = parseTerm("if true then 1 else 0");
    CHECK(alphaEqual(std::get<StateConfig>(r).term, expected));
}

TEST_CASE("single-cell update") {
    EvalResult r = run("letref x = 0 in x := 1; !x");
    REQUIRE(r.outcome == Outcome::Value);
    CHECK(alphaEqual(build::ret(r.value), build::ret(build::num(1))));
    REQUIRE(r.final.store.size() == 1);
    CHECK(alphaEqual(build::ret(r.final.store.at(0)), build::ret(build::num(1))));
    CHECK(r.final.locCounter == 1);
}

TEST_CASE("coin toss enumerates both outcomes") {
    EvalResult r = run(kToss);
    REQUIRE(r.outcome == Outcome::Value);
    Program expected = parseProgram("data Toss = Heads | Tails\n [Heads, Tails]");
    auto v = std::get<CReturn>(expected.body->node).value;
    CHECK(print(build::ret(r.value)) == print(build::ret(v)));
    CHECK(alphaEqual(build::ret(r.value), build::ret(v)));
}

TEST_CASE("divergence exhausts fuel") {
    EvalResult r = run("(rec f i -> f i) ()", 10000);
    CHECK(r.outcome == Outcome::FuelExhausted);
    CHECK(r.steps == 10000);
}

TEST_CASE("unhandled operation is a normal form") {
    EvalResult r = run("operation Branch : Unit -> Bool\n let b <- do Branch () in if b then 1 else 2");
    REQUIRE(r.outcome == Outcome::Unhandled);
    CHECK(r.op == "Branch");
}

TEST_CASE("innermost handler wins") {
    EvalResult r = run("operation Branch : Unit -> Bool\n"
                       "handle (handle (if do Branch () then 1 else 2) with {val x -> x | Branch _ r -> r true})"
                       " with {val x -> x | Branch _ r -> r false}");
    REQUIRE(r.outcome == Outcome::Value);
    CHECK(alphaEqual(build::ret(r.value), build::ret(build::num(1))));
}

TEST_CASE("forwarding reaches the outer handler") {
    EvalResult r = run("operation Branch : Unit -> Bool\n"
                       "handle (handle (if do Branch () then 1 else 2) with {val x -> x + 10})"
                       " with {val x -> x | Branch _ r -> r false}");
    REQUIRE(r.outcome == Outcome::Value);
    CHECK(alphaEqual(build::ret(r.value), build::ret(build::num(12))));
}

TEST_CASE("step preserves types and grows the store monotonically") {
    Program p = parseProgram("letref c = 0 in let f = fun k -> c := !c + k in f 2; f 3; !c");
    TypePtr t = typecheck(p);
    StateConfig cfg{p.body};
    for (int i = 0; i < 200; ++i) {
        auto r = step(cfg, p.sig);
        if (std::holds_alternative<Normal>(r)) break;
        StateConfig next = std::get<StateConfig>(r);
        CHECK(next.locCounter >= cfg.locCounter);
        CHECK(next.store.size() == next.locCounter);
        CHECK(sameType(typecheckRuntime(next.term, p.sig, next.store), t));
        cfg = next;
    }
    CHECK(std::holds_alternative<Normal>(step(cfg, p.sig)));
}

TEST_CASE("constants") {
    CHECK(alphaEqual(build::ret(applyConstant(ConstOp::Minus, build::pair(build::num(2), build::num(5)))),
                     build::ret(build::num(0))));
    CHECK(alphaEqual(build::ret(applyConstant(ConstOp::Eq, build::pair(build::num(2), build::num(2)))),
                     build::ret(build::boolean(true))));
}
