#pragma once

#include <map>
#include <random>

#include "fx/machine.hpp"

namespace fx::trees {

using Addr = std::vector<bool>;

/// Shorter addresses first; within a length, true before false.
struct AddrOrder {
    bool operator()(const Addr& a, const Addr& b) const;
};

struct Label {
    bool query;
    std::uint64_t index = 0;  // query
    bool answer = false;      // answer

    static Label ask(std::uint64_t k) { return Label{true, k, false}; }
    static Label reply(bool b) { return Label{false, 0, b}; }
    friend bool operator==(const Label& a, const Label& b) {
        return a.query == b.query && (a.query ? a.index == b.index : a.answer == b.answer);
    }
};

struct TreeNode {
    Label label;
    std::uint64_t steps = 0;  // ticks along the edge into this node
    std::shared_ptr<const machine::Config> config;
};

struct DecisionTree {
    std::map<Addr, TreeNode, AddrOrder> nodes;
    /// Addresses below which extraction diverged, got stuck, or hit the depth bound.
    std::vector<Addr> undefinedAt;
    bool depthBoundHit = false;

    const TreeNode* at(const Addr& a) const;
    bool partial() const { return depthBoundHit || !undefinedAt.empty(); }
    std::size_t leaves() const;
    std::uint64_t totalSteps() const;
};

/// Same labels at the same addresses; steps and decorations are ignored.
bool sameUntimed(const DecisionTree& a, const DecisionTree& b);

struct ExtractOptions {
    std::uint64_t fuel = 10'000'000;  // per edge
    std::size_t depthBound = 64;
    bool decorate = false;
};

/// Probes the predicate value with the distinguished variable and records queries and answers.
DecisionTree extractTree(const machine::MValuePtr& pred, const ExtractOptions& opts = {});
/// As above for a closed term evaluating to a predicate; handlers are completed against sig.
DecisionTree extractTree(const CompPtr& predTerm, const Signature& sig, const ExtractOptions& opts = {});

enum class Class { NStandard, NPredicate, Neither };

struct Classification {
    Class cls;
    std::string reason;  // empty for NStandard
};

Classification classify(const DecisionTree& tree, unsigned n);
/// Every query index appears at most once along each path.
bool queriesAtMostOnce(const DecisionTree& tree);

using Point = std::vector<bool>;

/// Follows the path chosen by the point; throws when it falls off the tree.
bool evalTree(const DecisionTree& tree, const Point& point);
/// Number of !true leaves; the tree must be n-standard.
std::uint64_t countTree(const DecisionTree& tree, unsigned n);
/// Number of points of B^n accepted by the tree, by enumeration.
std::uint64_t countPoints(const DecisionTree& tree, unsigned n);

/// `return fun q -> ...` mirroring the tree with nested conditionals; uses no handlers.
CompPtr treeToPredicate(const DecisionTree& tree);
/// Negates the answer at leaf.
DecisionTree flipLeaf(const DecisionTree& tree, const Addr& leaf);

/// Full binary tree of depth n querying each index once per path in a random order.
DecisionTree randomStandardTree(unsigned n, std::mt19937_64& rng);
std::vector<Addr> answerAddresses(const DecisionTree& tree);

std::string addrString(const Addr& a);
std::string labelString(const Label& l);
std::string toText(const DecisionTree& tree, bool timed);
std::string toDot(const DecisionTree& tree, bool timed);

}  // namespace fx::trees
