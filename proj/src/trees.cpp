#include "fx/trees.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace fx::trees {

using namespace machine;

bool AddrOrder::operator()(const Addr& a, const Addr& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i];
    return false;
}

const TreeNode* DecisionTree::at(const Addr& a) const {
    auto it = nodes.find(a);
    return it == nodes.end() ? nullptr : &it->second;
}

std::size_t DecisionTree::leaves() const {
    std::size_t n = 0;
    for (const auto& [a, node] : nodes) n += node.label.query ? 0 : 1;
    return n;
}

std::uint64_t DecisionTree::totalSteps() const {
    std::uint64_t s = 0;
    for (const auto& [a, node] : nodes) s += node.steps;
    return s;
}

bool sameUntimed(const DecisionTree& a, const DecisionTree& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    for (const auto& [addr, node] : a.nodes) {
        const TreeNode* other = b.at(addr);
        if (!other || !(other->label == node.label)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- extraction

DecisionTree extractTree(const MValuePtr& pred, const ExtractOptions& opts) {
    DecisionTree tree;
    MValuePtr probe = std::make_shared<const MValue>(MValue{MProbe{Var::fresh("q")}});
    std::vector<std::pair<Addr, Config>> work;
    work.emplace_back(Addr{}, applicationConfig(pred, probe, Mode::Handler));

    while (!work.empty()) {
        auto [addr, cfg] = std::move(work.back());
        work.pop_back();
        const std::uint64_t begin = cfg.tick;
        auto record = [&](Label label) {
            TreeNode node{label, cfg.tick - begin, nullptr};
            if (opts.decorate) node.config = std::make_shared<const Config>(cfg);
            tree.nodes.emplace(addr, std::move(node));
        };
        for (;;) {
            if (cfg.atAnswer()) {
                auto b = mval::asBool(returnedValue(cfg));
                if (b) record(Label::reply(*b));
                else tree.undefinedAt.push_back(addr);
                break;
            }
            if (cfg.tick - begin >= opts.fuel) {
                tree.undefinedAt.push_back(addr);
                break;
            }
            StepOutcome s = step(cfg);
            if (s.status == Status::Stepped) continue;
            if (s.status != Status::ProbeApplied) {
                tree.undefinedAt.push_back(addr);
                break;
            }
            auto k = mval::asNum(s.arg);
            if (!k) {
                tree.undefinedAt.push_back(addr);
                break;
            }
            record(Label::ask(*k));
            if (addr.size() >= opts.depthBound) {
                tree.depthBoundHit = true;
                break;
            }
            for (bool b : {false, true}) {
                Config child = cfg;
                child.comp = nullptr;
                child.value = mval::boolean(b);
                Addr next = addr;
                next.push_back(b);
                work.emplace_back(std::move(next), std::move(child));
            }
            break;
        }
    }
    return tree;
}

DecisionTree extractTree(const CompPtr& predTerm, const Signature& sig, const ExtractOptions& opts) {
    return extractTree(evaluateToValue(predTerm, sig), opts);
}

// ---------------------------------------------------------------- classification

Classification classify(const DecisionTree& tree, unsigned n) {
    if (!tree.at({})) return {Class::Neither, "no root"};
    if (tree.depthBoundHit) return {Class::Neither, "depth bound exceeded"};
    if (!tree.undefinedAt.empty())
        return {Class::Neither, "undefined below " + addrString(tree.undefinedAt.front())};
    for (const auto& [addr, node] : tree.nodes) {
        if (!node.label.query) continue;
        if (node.label.index >= n)
            return {Class::Neither, "query ?" + std::to_string(node.label.index) + " out of range"};
        for (bool b : {true, false}) {
            Addr child = addr;
            child.push_back(b);
            if (!tree.at(child)) return {Class::Neither, "query at " + addrString(addr) + " lacks a child"};
        }
    }
    for (const auto& [addr, node] : tree.nodes) {
        if (!node.label.query) continue;
        std::set<std::uint64_t> seen;
        Addr prefix;
        for (bool b : addr) {
            seen.insert(tree.at(prefix)->label.index);
            prefix.push_back(b);
        }
        if (seen.count(node.label.index))
            return {Class::NPredicate, "not n-standard (repeated query " + std::to_string(node.label.index) + ")"};
    }
    for (const auto& [addr, node] : tree.nodes)
        if (!node.label.query && addr.size() != n)
            return {Class::NPredicate, "not n-standard (answer at depth " + std::to_string(addr.size()) + ")"};
    return {Class::NStandard, ""};
}

bool queriesAtMostOnce(const DecisionTree& tree) {
    Classification c = classify(tree, ~0u);
    return c.cls == Class::NStandard || (c.cls == Class::NPredicate && c.reason.find("repeated") == std::string::npos);
}

bool evalTree(const DecisionTree& tree, const Point& point) {
    Addr addr;
    for (;;) {
        const TreeNode* node = tree.at(addr);
        if (!node) throw EvalError("path leaves the tree at " + addrString(addr));
        if (!node->label.query) return node->label.answer;
        if (node->label.index >= point.size()) throw EvalError("query beyond the point");
        addr.push_back(point[node->label.index]);
    }
}

std::uint64_t countTree(const DecisionTree& tree, unsigned n) {
    Classification c = classify(tree, n);
    if (c.cls != Class::NStandard) throw EvalError("countTree needs an n-standard tree: " + c.reason);
    std::uint64_t count = 0;
    for (const auto& [addr, node] : tree.nodes) count += !node.label.query && node.label.answer;
    return count;
}

std::uint64_t countPoints(const DecisionTree& tree, unsigned n) {
    std::uint64_t count = 0;
    Point p(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        for (unsigned i = 0; i < n; ++i) p[i] = (bits >> i) & 1;
        count += evalTree(tree, p);
    }
    return count;
}

// ---------------------------------------------------------------- construction

CompPtr treeToPredicate(const DecisionTree& tree) {
    Var q = Var::fresh("q");
    std::function<CompPtr(const Addr&)> go = [&](const Addr& addr) -> CompPtr {
        const TreeNode* node = tree.at(addr);
        if (!node) throw EvalError("tree has no node at " + addrString(addr));
        if (!node->label.query) return build::ret(build::boolean(node->label.answer));
        Addr yes = addr, no = addr;
        yes.push_back(true);
        no.push_back(false);
        Var b = Var::fresh("b");
        return build::let(b, build::app(build::var(q), build::num(node->label.index)),
                          build::ifThenElse(build::var(b), go(yes), go(no)));
    };
    return build::ret(build::lam(q, go({}), types::arrow(types::nat(), types::boolean())));
}

DecisionTree flipLeaf(const DecisionTree& tree, const Addr& leaf) {
    DecisionTree out = tree;
    auto it = out.nodes.find(leaf);
    if (it == out.nodes.end() || it->second.label.query) throw EvalError("no answer at " + addrString(leaf));
    it->second.label.answer = !it->second.label.answer;
    it->second.config = nullptr;
    return out;
}

DecisionTree randomStandardTree(unsigned n, std::mt19937_64& rng) {
    DecisionTree tree;
    std::function<void(Addr&, std::vector<std::uint64_t>&)> grow = [&](Addr& addr, std::vector<std::uint64_t>& left) {
        if (left.empty()) {
            tree.nodes.emplace(addr, TreeNode{Label::reply(rng() & 1), 0, nullptr});
            return;
        }
        std::size_t pick = std::uniform_int_distribution<std::size_t>(0, left.size() - 1)(rng);
        std::uint64_t k = left[pick];
        tree.nodes.emplace(addr, TreeNode{Label::ask(k), 0, nullptr});
        left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
        for (bool b : {true, false}) {
            addr.push_back(b);
            grow(addr, left);
            addr.pop_back();
        }
        left.insert(left.begin() + static_cast<std::ptrdiff_t>(pick), k);
    };
    Addr root;
    std::vector<std::uint64_t> indices(n);
    for (unsigned i = 0; i < n; ++i) indices[i] = i;
    grow(root, indices);
    return tree;
}

std::vector<Addr> answerAddresses(const DecisionTree& tree) {
    std::vector<Addr> out;
    for (const auto& [addr, node] : tree.nodes)
        if (!node.label.query) out.push_back(addr);
    return out;
}

// ---------------------------------------------------------------- output

std::string addrString(const Addr& a) {
    if (a.empty()) return "ε";
    std::string s;
    for (bool b : a) s += b ? 't' : 'f';
    return s;
}

std::string labelString(const Label& l) {
    if (l.query) return "?" + std::to_string(l.index);
    return l.answer ? "!true" : "!false";
}

std::string toText(const DecisionTree& tree, bool timed) {
    std::ostringstream out;
    for (const auto& [addr, node] : tree.nodes) {
        out << addrString(addr) << ' ' << labelString(node.label);
        if (timed) out << ' ' << node.steps;
        out << '\n';
    }
    return out.str();
}

std::string toDot(const DecisionTree& tree, bool timed) {
    std::ostringstream out;
    auto id = [](const Addr& a) { return "n" + (a.empty() ? std::string("_") : addrString(a)); };
    out << "digraph tree {\n  start [shape=point];\n";
    for (const auto& [addr, node] : tree.nodes) {
        out << "  " << id(addr) << " [shape=" << (node.label.query ? "circle" : "box") << ", label=\""
            << labelString(node.label) << "\"];\n";
        std::string from = "start";
        std::string edge;
        if (!addr.empty()) {
            Addr parent(addr.begin(), addr.end() - 1);
            from = id(parent);
            edge = addr.back() ? "true" : "false";
        }
        if (timed) edge += (edge.empty() ? "" : " ") + std::to_string(node.steps);
        out << "  " << from << " -> " << id(addr);
        if (!edge.empty()) out << " [label=\"" << edge << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace fx::trees
