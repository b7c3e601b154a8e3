#include "doctest.h"

#include "fx/text.hpp"
#include "fx/typecheck.hpp"

using namespace fx;

namespace {

Signature branchSig() { return {{"Branch", OpType{types::unit(), types::boolean()}}}; }

TypePtr typeOf(const std::string& src) { return typecheck(parseProgram(src)); }

}  // namespace

TEST_CASE("literal return") {
    CompPtr m = parseTerm("return 0");
    CHECK(alphaEqual(m, build::ret(build::num(0))));
}

TEST_CASE("direct-style application is let-normalised left to right") {
    CompPtr m = parseTerm("fun f h w g -> f (h w) + g ()");
    Var f = Var::fresh("f"), h = Var::fresh("h"), w = Var::fresh("w"), g = Var::fresh("g");
    Var x = Var::fresh("x"), y = Var::fresh("y"), z = Var::fresh("z");
    using namespace build;
    CompPtr body = let(x, app(var(h), var(w)),
                       let(y, app(var(f), var(x)),
                           let(z, app(var(g), unit()), app(constant(ConstOp::Plus), pair(var(y), var(z))))));
    CompPtr expected =
        ret(lam(f, ret(lam(h, ret(lam(w, ret(lam(g, body))))))));
    CHECK(alphaEqual(m, expected));
}

TEST_CASE("if desugars to a case on Unit + Unit") {
    CompPtr m = parseTerm("fun b -> if b then 1 else 2");
    auto lam = std::get<VLam>(std::get<CReturn>(m->node).value->node);
    auto* c = std::get_if<CCase>(&lam.body->node);
    REQUIRE(c != nullptr);
    CHECK(alphaEqual(c->left, build::ret(build::num(1))));
    CHECK(alphaEqual(c->right, build::ret(build::num(2))));
    CHECK(toString(typecheck({}, m, {})) == "Bool -> Nat");
}

TEST_CASE("sequencing, booleans and lists") {
    CHECK(toString(typeOf("true && false || true")) == "Bool");
    CHECK(toString(typeOf("[1, 2, 3]")) == "List Nat");
    CHECK(toString(typeOf("1 :: []")) == "List Nat");
    CHECK(toString(typeOf("letref x = 0 in x := 1; !x")) == "Nat");
    CHECK(toString(typeOf("fun (x : Nat) -> x < 3")) == "Nat -> Bool");
}

TEST_CASE("case arms separated by ; inr") {
    CompPtr m = parseTerm("fun v -> case v {inl a -> a; 1; inr b -> 2}");
    CHECK(toString(typecheck({}, m, {})) == "Bool -> Nat");
}

TEST_CASE("typing of the unit and of do") {
    CHECK(toString(typecheck({}, parseTerm("return ()"), {})) == "Unit");
    CHECK(toString(typecheck({}, parseTerm("do Branch ()", branchSig()), branchSig())) == "Bool");
    CHECK(toString(typeOf("operation Branch : Unit -> Bool\n do Branch ()")) == "Bool");
}

TEST_CASE("type errors name the offending position") {
    CHECK_THROWS_AS(typeOf("1 + true"), TypeError);
    CHECK_THROWS_WITH_AS(typeOf("y"), "unbound variable y", TypeError);
    CHECK_THROWS_AS(typeOf("operation Branch : Unit -> Bool\n do Branch 3"), TypeError);
    CHECK_THROWS_AS(typeOf("(fun x -> x x) (fun x -> x x)"), TypeError);
    try {
        typeOf("fun (x : Nat) -> x ()");
        FAIL("expected a type error");
    } catch (const TypeError& e) {
        std::string msg = e.what();
        CHECK(msg.find("expected") != std::string::npos);
        CHECK(msg.find("fun x") != std::string::npos);
    }
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parseProgram("let x <- 1 in\n  x +");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
    }
    CHECK_THROWS_AS(parseProgram("do Missing ()"), SyntaxError);
    CHECK_THROWS_AS(parseProgram("handle 1 with {val x -> x | Nope p r -> r p}"), SyntaxError);
}

TEST_CASE("data declarations") {
    Program p = parseProgram("data Toss = Heads | Tails\n [Heads, Tails]");
    CHECK(toString(typecheck(p)) == "List Toss");
    CHECK(toString(typeOf("data C = R | G | B\n fun (c : C) -> case c {inl _ -> 0; inr _ -> 1}")) == "C -> Nat");
}

TEST_CASE("completeHandler") {
    Program p = parseProgram("operation Branch : Unit -> Bool\n handle do Branch () with {val x -> x}");
    const auto& h = std::get<CHandle>(p.body->node).handler;
    REQUIRE(h->clauses.empty());

    SUBCASE("adds a forwarding clause") {
        HandlerPtr done = completeHandler(h, p.sig);
        REQUIRE(done->clauses.size() == 1);
        const OpClause& c = done->clauses[0];
        CHECK(c.op == "Branch");
        Var x = Var::fresh("x");
        CompPtr expected = build::let(x, build::perform("Branch", build::var(c.param)),
                                      build::app(build::var(c.resume), build::var(x)));
        CHECK(alphaEqual(c.body, expected));
        CHECK(completeHandler(done, p.sig) == done);
    }
    SUBCASE("total handler unchanged") {
        HandlerPtr done = completeHandler(h, p.sig);
        CHECK(completeHandler(done, p.sig) == done);
    }
    SUBCASE("empty signature unchanged") { CHECK(completeHandler(h, {}) == h); }
}

TEST_CASE("printer output parses back to an alpha-equivalent term") {
    const char* sources[] = {
        "fun x -> fun x -> x",
        "fun f -> let x <- f 1 in let x <- f x in x + x",
        "let (a, b) = (1, true) in if b then a else 0",
        "operation Branch : Unit -> Bool\n handle (if do Branch () then 1 else 2) with {val x -> x | Branch _ r -> r true + r false}",
        "letref c = 0 in c := 4; !c",
        "rec f (n : Nat) : Nat -> if n = 0 then 0 else f (n - 1)",
        "memoise (fun _ -> [true, false])",
        "(+) (1, 2)",
    };
    for (const char* src : sources) {
        Program p = parseProgram(src);
        std::string printed = print(p);
        CAPTURE(printed);
        Program q = parseProgram(printed);
        CHECK(alphaEqual(p.body, q.body));
    }
}

TEST_CASE("printer avoids capture of free names") {
    Var y = Var::fresh("y");
    Var inner = Var::fresh("y");
    CompPtr m = build::ret(build::lam(inner, build::app(build::var(inner), build::var(y))));
    std::string s = print(m);
    CHECK(s.find("fun y ->") == std::string::npos);
}

TEST_CASE("substitution stops at rebinding") {
    Var x = Var::fresh("x");
    CompPtr body = build::ret(build::lam(x, build::ret(build::var(x))));
    CompPtr out = substitute(body, {{x.id, build::num(1)}});
    CHECK(out == body);
}
