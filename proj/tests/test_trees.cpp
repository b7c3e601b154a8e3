#include "doctest.h"

#include "fx/text.hpp"
#include "fx/trees.hpp"
#include "fx/typecheck.hpp"

using namespace fx;
using namespace fx::trees;

namespace {

DecisionTree treeOf(const std::string& src, ExtractOptions opts = {}) {
    Program p = parseProgram(src);
    typecheck(p);
    return extractTree(p.body, p.sig, opts);
}

const char* kOdd3 =
    "fun (q : Nat -> Bool) -> let a <- q 0 in let b <- q 1 in let c <- q 2 in"
    " let x <- (if a then (if b then false else true) else b) in if x then (if c then false else true) else c";

}  // namespace

TEST_CASE("I0 tree") {
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> q 0");
    CHECK(toText(t, false) == "ε ?0\nt !true\nf !false\n");
    CHECK(classify(t, 1).cls == Class::NStandard);
    CHECK(t.at({})->steps == 1);
}

TEST_CASE("T0 tree") {
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> true");
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.at({})->label == Label::reply(true));
    CHECK(classify(t, 0).cls == Class::NStandard);
    CHECK(evalTree(t, {}) == true);
}

TEST_CASE("I2 repeats a query") {
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> q 0 && q 0");
    CHECK(t.at({true})->label == Label::ask(0));
    Classification c = classify(t, 1);
    CHECK(c.cls == Class::NPredicate);
    CHECK(c.reason == "not n-standard (repeated query 0)");
    CHECK(!queriesAtMostOnce(t));
}

TEST_CASE("T1 is classified by the definition") {
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> q 1; q 0; true");
    CHECK(classify(t, 2).cls == Class::NStandard);
}

TEST_CASE("empty and partial trees") {
    CHECK(classify(DecisionTree{}, 1).cls == Class::Neither);
    ExtractOptions opts;
    opts.fuel = 2000;
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> if q 0 then (rec f i -> f i) () else false", opts);
    CHECK(t.partial());
    CHECK(classify(t, 1).cls == Class::Neither);
}

TEST_CASE("odd tree, counting and evaluation") {
    DecisionTree t = treeOf(kOdd3);
    CHECK(t.nodes.size() == 15);
    CHECK(classify(t, 3).cls == Class::NStandard);
    CHECK(countTree(t, 3) == 4);
    CHECK(countPoints(t, 3) == 4);
    CHECK(evalTree(t, {true, false, false}) == true);
    CHECK(evalTree(t, {true, true, false}) == false);
}

TEST_CASE("tree to predicate round trip") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        DecisionTree t = randomStandardTree(5, rng);
        REQUIRE(classify(t, 5).cls == Class::NStandard);
        CompPtr p = treeToPredicate(t);
        CHECK(!usesHandlers(p));
        CHECK(toString(typecheck({}, p, {})) == "(Nat -> Bool) -> Bool");
        DecisionTree back = extractTree(p, {});
        CHECK(sameUntimed(t, back));
    }
    DecisionTree i0 = treeOf("fun (q : Nat -> Bool) -> q 0");
    CHECK(sameUntimed(extractTree(treeToPredicate(i0), {}), i0));
}

TEST_CASE("flipping a leaf") {
    DecisionTree i0 = treeOf("fun (q : Nat -> Bool) -> q 0");
    DecisionTree f = flipLeaf(i0, {true});
    CHECK(countTree(f, 1) == 0);
    CHECK(sameUntimed(flipLeaf(f, {true}), i0));
    CHECK_THROWS_AS(flipLeaf(i0, {}), EvalError);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        DecisionTree t = randomStandardTree(6, rng);
        auto leaves = answerAddresses(t);
        REQUIRE(leaves.size() == 64);
        const Addr& leaf = leaves[rng() % leaves.size()];
        std::int64_t a = countTree(t, 6), b = countTree(flipLeaf(t, leaf), 6);
        CHECK(std::abs(a - b) == 1);
    }
}

TEST_CASE("random standard trees have the expected shape") {
    std::mt19937_64 rng(3);
    DecisionTree t = randomStandardTree(8, rng);
    CHECK(t.nodes.size() == (1u << 9) - 1);
    CHECK(t.leaves() == 256);
    std::uint64_t brute = 0;
    Point p(8);
    for (unsigned bits = 0; bits < 256; ++bits) {
        for (unsigned i = 0; i < 8; ++i) p[i] = (bits >> i) & 1;
        brute += evalTree(t, p);
    }
    CHECK(countTree(t, 8) == brute);
}

TEST_CASE("decorated extraction records configurations") {
    ExtractOptions opts;
    opts.decorate = true;
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> q 0", opts);
    for (const auto& [addr, node] : t.nodes) CHECK(node.config != nullptr);
    CHECK(t.at({true})->config->atAnswer());
}

TEST_CASE("dot output") {
    DecisionTree t = treeOf("fun (q : Nat -> Bool) -> q 0");
    std::string dot = toDot(t, true);
    CHECK(dot.find("shape=circle, label=\"?0\"") != std::string::npos);
    CHECK(dot.find("shape=box, label=\"!true\"") != std::string::npos);
}
