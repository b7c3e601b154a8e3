#include "doctest.h"

#include "fx/machine.hpp"
#include "fx/simulation.hpp"
#include "fx/text.hpp"
#include "fx/typecheck.hpp"

using namespace fx;
using namespace fx::machine;

namespace {

const char* kToss = R"(
operation Branch : Unit -> Bool
data Toss = Heads | Tails
let append = rec app (xs : List Toss) -> fun (ys : List Toss) ->
  case xs {inl _ -> ys; inr c -> let (h, t) = c in let r <- app t ys in h :: r} in
let toss = fun _ -> if do Branch () then Heads else Tails in
handle toss () with {val x -> [x] | Branch _ r -> append (r true) (r false)}
)";

const char* kBranch = "operation Branch : Unit -> Bool\n";

Program checked(const std::string& src) {
    Program p = parseProgram(src);
    typecheck(p);
    return p;
}

std::uint64_t numeral(const MValuePtr& v) {
    auto n = mval::asNum(v);
    REQUIRE(n.has_value());
    return *n;
}

}  // namespace

TEST_CASE("injection") {
    CompPtr five = build::ret(build::num(5));
    Config c = injectBase(five);
    CHECK(c.comp == five);
    CHECK(c.pure.empty());
    CHECK(c.tick == 0);
    CHECK(alphaEqual(decompile(c), five));
    CHECK_THROWS_AS(injectBase(checked(std::string(kBranch) + "do Branch ()").body), BaseMachineUnsupported);
}

TEST_CASE("base rules: let, return to frame, constant") {
    Config c = injectBase(parseTerm("let x <- return 1 in x + x"));
    StepOutcome s = stepBase(c);
    CHECK(s.rule == Rule::Let);
    CHECK(c.pure.size() == 1);
    s = stepBase(c);
    CHECK(s.rule == Rule::RetCont);
    CHECK(c.pure.empty());
    s = stepBase(c);
    CHECK(s.rule == Rule::Const);
    s = stepBase(c);
    REQUIRE(s.status == Status::Value);
    CHECK(numeral(s.arg) == 2);
    CHECK(c.tick == 3);
}

TEST_CASE("handler rules") {
    Program p = checked(std::string(kBranch) +
                        "handle (if do Branch () then 1 else 2) with {val x -> x | Branch _ r -> r true}");
    Config c = injectHandler(p.body, p.sig);
    CHECK(c.depth() == 1);
    CHECK(step(c).rule == Rule::Handle);
    CHECK(c.depth() == 2);
    CHECK(step(c).rule == Rule::Let);
    std::size_t pureBefore = c.pure.size();
    CHECK(step(c).rule == Rule::HandleOp);
    CHECK(c.depth() == 1);
    const MValuePtr* r = nullptr;
    c.env.forEach([&](const std::uint32_t&, const MValuePtr& v) {
        if (std::holds_alternative<MResumption>(v->node)) r = &v;
    });
    REQUIRE(r != nullptr);
    CHECK(std::get<MResumption>((*r)->node).res.pure.size() == pureBefore);
    CHECK(step(c).rule == Rule::Resume);
    CHECK(c.depth() == 2);
    CHECK(c.returning());
    RunResult res = drive(c, 1000);
    REQUIRE(res.final == Final::Value);
    CHECK(numeral(res.value) == 1);
}

TEST_CASE("toss under the enumerating handler") {
    Program p = checked(kToss);
    RunResult r = runMachine(p.body, p.sig);
    REQUIRE(r.final == Final::Value);
    CHECK(r.ticks > 0);
    Program expected = checked("data Toss = Heads | Tails\n [Heads, Tails]");
    CHECK(alphaEqual(build::ret(decompile(r.value)), expected.body));
}

TEST_CASE("final states") {
    Program p = checked(std::string(kBranch) + "let b <- do Branch () in if b then 1 else 2");
    RunResult r = runMachine(p.body, p.sig);
    CHECK(r.final == Final::Unhandled);
    CHECK(r.op == "Branch");
    CHECK(runMachine(parseTerm("(rec f i -> f i) ()"), {}, 5000).final == Final::FuelExhausted);
}

TEST_CASE("multi-shot resumptions do not interfere") {
    Program p = checked(std::string(kBranch) +
                        "handle (let a <- do Branch () in let b <- do Branch () in"
                        " (if a then 1 else 0) + (if b then 10 else 0))"
                        " with {val x -> x | Branch _ r -> r true + (r false + r true)}");
    RunResult r = runMachine(p.body, p.sig);
    REQUIRE(r.final == Final::Value);
    // a=t: 11 + (1 + 11) = 23; a=f: 10 + (0 + 10) = 20; a=t again: 23
    CHECK(numeral(r.value) == 23 + 20 + 23);
}

TEST_CASE("resumption capture cost is independent of continuation depth") {
    auto capture = [](int depth) {
        std::string body = "do Branch ()";
        for (int i = 0; i < depth; ++i) body = "let x" + std::to_string(i) + " <- " + body + " in x" + std::to_string(i);
        Program p = checked(std::string(kBranch) + "handle (" + body + ") with {val x -> x | Branch _ r -> return true}");
        Config c = injectHandler(p.body, p.sig);
        for (;;) {
            std::uint64_t ops = c.envOps;
            StepOutcome s = step(c);
            if (s.rule == Rule::HandleOp) return c.envOps - ops;
        }
    };
    CHECK(capture(1) == capture(50));
}

TEST_CASE("memoise evaluates the body once") {
    Program p = checked("letref c = 0 in let f <- memoise (fun _ -> c := !c + 1; [true]) in"
                        " let a <- f () in let b <- f () in !c");
    RunResult r = runMachine(p.body, p.sig);
    REQUIRE(r.final == Final::Value);
    CHECK(numeral(r.value) == 1);

    Program q = checked("let f <- memoise (fun _ -> return []) in f ()");
    RunResult e = runMachine(q.body, q.sig);
    REQUIRE(e.final == Final::Value);
    CHECK(alphaEqual(build::ret(decompile(e.value)), checked("return []").body));
}

TEST_CASE("store is shared with resumptions") {
    Program p = checked(std::string(kBranch) +
                        "letref c = 0 in handle (let b <- do Branch () in c := !c + 1; !c)"
                        " with {val x -> x | Branch _ r -> r true + r false}");
    RunResult r = runMachine(p.body, p.sig);
    REQUIRE(r.final == Final::Value);
    CHECK(numeral(r.value) == 1 + 2);
}

TEST_CASE("trace lines") {
    std::vector<std::string> lines;
    Program p = checked(std::string(kBranch) + "handle do Branch () with {val x -> x | Branch _ r -> r true}");
    runMachine(p.body, p.sig, 100, [&](const Config& before, Rule rule) { lines.push_back(traceLine(before, rule)); });
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "tick=1 rule=M-Handle comp=handle depth(κ)=1");
    CHECK(lines[1] == "tick=2 rule=M-Handle-Op comp=do Branch depth(κ)=2");
}

TEST_CASE("machine simulates the small-step semantics") {
    const std::string sources[] = {
        "let x <- return 1 in x + x",
        "let (a, b) = (3, 4) in if a = b then a else b - a",
        "(rec f n -> if n = 0 then 0 else let m <- f (n - 1) in m + 2) 5",
        "letref x = 0 in x := 1; !x",
        "letref c = 0 in let f <- memoise (fun _ -> c := !c + 1; !c) in let a <- f () in let b <- f () in a + b",
        kToss,
        std::string(kBranch) + "handle (handle (if do Branch () then 1 else 2) with {val x -> x + 10})"
                               " with {val x -> x | Branch _ r -> r false}",
        std::string(kBranch) + "let b <- do Branch () in if b then 1 else 2",
        std::string(kBranch) + "letref c = 0 in handle (let b <- do Branch () in c := !c + 1; !c)"
                               " with {val x -> x | Branch _ r -> r true + r false}",
    };
    for (const auto& src : sources) {
        CAPTURE(src);
        Program p = checked(src);
        SimulationReport rep = simulate(p.body, p.sig, 100000);
        CHECK_MESSAGE(rep.ok, rep.failure);
        CHECK(rep.final != Final::FuelExhausted);
        CHECK(rep.transitions >= rep.betaSteps);
        CHECK(rep.administrative > 0);
    }
}
