#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fx/acceptance.hpp"
#include "fx/countlib.hpp"
#include "fx/smallstep.hpp"
#include "fx/text.hpp"
#include "fx/trees.hpp"
#include "fx/typecheck.hpp"

using namespace fx;
using namespace fx::countlib;

namespace {

enum Exit { kOk = 0, kError = 1, kUnhandled = 2, kFuel = 3 };

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EvalError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cmdCheck(const std::string& file) {
    Program p = parseProgram(slurp(file));
    std::cout << toString(typecheck(p)) << '\n';
    return kOk;
}

int cmdRun(const std::string& file, const std::string& semantics, std::uint64_t fuel, bool trace) {
    Program p = parseProgram(slurp(file));
    TypePtr type = typecheck(p);
    if (semantics == "smallstep") {
        std::function<void(const smallstep::StateConfig&)> onStep;
        if (trace) onStep = [](const smallstep::StateConfig& c) { std::cerr << print(c.term) << '\n'; };
        smallstep::EvalResult r = smallstep::evaluate(p.body, p.sig, fuel, onStep);
        switch (r.outcome) {
            case smallstep::Outcome::Value:
                std::cout << printAt(r.value, type) << "\nsteps " << r.steps << '\n';
                return kOk;
            case smallstep::Outcome::Unhandled:
                std::cout << "unhandled operation " << r.op << ' ' << print(r.opArg) << "\nsteps " << r.steps << '\n';
                return kUnhandled;
            case smallstep::Outcome::FuelExhausted:
                std::cout << "out of fuel after " << r.steps << " steps\n";
                return kFuel;
        }
    }
    machine::TraceFn onStep = [](const machine::Config& before, machine::Rule rule) {
        std::cerr << machine::traceLine(before, rule) << '\n';
    };
    machine::RunResult r = machine::runMachine(p.body, p.sig, fuel, trace ? onStep : nullptr);
    switch (r.final) {
        case machine::Final::Value:
            std::cout << printAt(machine::decompile(r.value), type) << "\nticks " << r.ticks << '\n';
            return kOk;
        case machine::Final::Unhandled:
            std::cout << "unhandled operation " << r.op << ' ' << print(machine::decompile(r.opArg)) << "\nticks "
                      << r.ticks << '\n';
            return kUnhandled;
        case machine::Final::FuelExhausted:
            std::cout << "out of fuel after " << r.ticks << " ticks\n";
            return kFuel;
    }
    return kError;
}

std::string classificationLine(const trees::Classification& c, unsigned n) {
    switch (c.cls) {
        case trees::Class::NStandard: return std::to_string(n) + "-standard";
        case trees::Class::NPredicate: return c.reason;
        case trees::Class::Neither: return "not an n-predicate: " + c.reason;
    }
    return "";
}

int cmdTree(const std::string& predName, unsigned n, const std::string& format, bool timed, std::uint64_t fuel) {
    const ProgramDescriptor& d = find(predName);
    Program p = d.build(n);
    typecheck(p);
    trees::ExtractOptions opts;
    opts.fuel = fuel;
    trees::DecisionTree t = trees::extractTree(p.body, p.sig, opts);
    if (t.partial()) std::cerr << "warning: extraction stopped early; the tree is partial\n";
    const std::string cls = classificationLine(trees::classify(t, d.arity(n)), d.arity(n));
    if (format == "dot") std::cout << trees::toDot(t, timed) << "// " << cls << '\n';
    else std::cout << trees::toText(t, timed) << cls << '\n';
    return kOk;
}

int cmdCount(const std::string& implName, const std::string& predName, unsigned n, std::uint64_t fuel) {
    const ProgramDescriptor& impl = find(implName);
    const ProgramDescriptor& pred = find(predName);
    if (!accepts(impl.inputClass, pred.inputClass))
        std::cerr << "warning: " << implName << " is only correct on " << className(impl.inputClass)
                  << " predicates; " << predName << " is " << className(pred.inputClass) << '\n';
    const unsigned arity = pred.arity(n);
    CountOutcome r = runCounter(impl.build(arity), pred.build(n), fuel);
    if (r.run.final == machine::Final::FuelExhausted) {
        std::cout << "out of fuel after " << r.run.ticks << " ticks\n";
        return kFuel;
    }
    if (r.run.final == machine::Final::Unhandled) {
        std::cout << "unhandled operation " << r.run.op << '\n';
        return kUnhandled;
    }
    std::cout << "count " << (r.count ? std::to_string(*r.count) : "?") << "\nticks " << r.run.ticks << "\nenvOps "
              << r.run.envOps << '\n';
    return kOk;
}

struct BenchRow {
    std::string impl, pred, variant;
    unsigned n = 0;
    std::string count;
    std::uint64_t ticks = 0, envOps = 0;
    unsigned arity = 0;
    bool ran = false;
};

std::pair<std::string, std::string> splitVariant(const std::string& name) {
    auto dash = name.find('-');
    if (dash == std::string::npos) return {name, ""};
    return {name.substr(0, dash), name.substr(dash + 1)};
}

unsigned cap(const ProgramDescriptor& impl, const ProgramDescriptor& pred) {
    if (pred.name.rfind("queens", 0) == 0) return 5;
    return impl.level == Level::Handlers ? 14 : 12;
}

int cmdBench(std::vector<std::string> impls, std::vector<std::string> preds, unsigned nMin, unsigned nMax,
             std::uint64_t fuel, const std::string& out) {
    std::vector<BenchRow> rows;
    for (const auto& implName : impls) {
        const ProgramDescriptor& impl = find(implName);
        for (const auto& predName : preds) {
            const ProgramDescriptor& pred = find(predName);
            const unsigned hi = std::min(nMax, cap(impl, pred));
            if (hi < nMax) std::cerr << "note: " << implName << " x " << predName << " capped at n=" << hi << '\n';
            for (unsigned n = nMin; n <= hi; ++n) {
                BenchRow row;
                row.impl = implName;
                std::tie(row.pred, row.variant) = splitVariant(predName);
                row.n = n;
                row.arity = pred.arity(n);
                if (!accepts(impl.inputClass, pred.inputClass)) {
                    row.count = "SKIPPED: " + predName + " is " + className(pred.inputClass) + " but " + implName +
                                " needs " + className(impl.inputClass);
                } else {
                    CountOutcome r = runCounter(impl.build(row.arity), pred.build(n), fuel);
                    row.ran = r.run.final == machine::Final::Value;
                    row.count = row.ran && r.count ? std::to_string(*r.count)
                                : r.run.final == machine::Final::FuelExhausted ? "FUEL"
                                                                                : "ERROR";
                    row.ticks = r.run.ticks;
                    row.envOps = r.run.envOps;
                }
                rows.push_back(row);
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.impl, a.pred, a.variant, a.n) < std::tie(b.impl, b.pred, b.variant, b.n);
    });
    std::ofstream file;
    if (!out.empty()) file.open(out);
    std::ostream& os = out.empty() ? std::cout : file;
    os << "impl,pred,variant,n,count,ticks,envOps,ticks_per_2n,ticks_per_n2n\n";
    for (const auto& r : rows) {
        os << r.impl << ',' << r.pred << ',' << r.variant << ',' << r.n << ',' << r.count << ',';
        if (!r.ran) {
            os << ",,,\n";
            continue;
        }
        const double space = std::ldexp(1.0, static_cast<int>(r.arity));
        os << r.ticks << ',' << r.envOps << ',' << std::fixed << std::setprecision(4) << r.ticks / space << ','
           << (r.arity ? r.ticks / (r.arity * space) : 0.0) << '\n';
        os.unsetf(std::ios::fixed);
    }
    return kOk;
}

// Keys mirror the long options; command-line values come first.
void readSpec(const std::string& path, std::vector<std::string>& impls, std::vector<std::string>& preds, unsigned& nMin,
              unsigned& nMax, std::uint64_t& fuel, std::string& out) {
    for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
        std::vector<std::string> values;
        for (const auto& in : item.inputs)
            for (const auto& part : CLI::detail::split(in, ',')) values.push_back(CLI::detail::trim_copy(part));
        if (values.empty()) continue;
        const std::string& key = item.name;
        if (key == "impl") impls.insert(impls.end(), values.begin(), values.end());
        else if (key == "pred") preds.insert(preds.end(), values.begin(), values.end());
        else if (key == "n-min") nMin = static_cast<unsigned>(std::stoul(values[0]));
        else if (key == "n-max") nMax = static_cast<unsigned>(std::stoul(values[0]));
        else if (key == "fuel") fuel = std::stoull(values[0]);
        else if (key == "out" && out.empty()) out = values[0];
        else throw EvalError("unknown key '" + key + "' in " + path);
    }
}

int cmdList() {
    std::cout << std::left << std::setw(18) << "name" << std::setw(11) << "kind" << std::setw(14) << "level"
              << std::setw(14) << "class" << "summary\n";
    for (const auto& d : catalog())
        std::cout << std::setw(18) << d.name << std::setw(11) << kindName(d.kind) << std::setw(14)
                  << levelName(d.level) << std::setw(14) << className(d.inputClass) << d.summary << '\n';
    return kOk;
}

int cmdSelftest() {
    int failed = 0;
    acceptance::runAll([&](const acceptance::Outcome& o) {
        std::cout << acceptance::formatLine(o) << std::endl;
        failed += !o.passed;
    });
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << '\n';
    return failed ? kError : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fx: an interpreter, decision-tree extractor and counting benchmark for a small effectful language"};
    app.require_subcommand(1);

    std::string file, semantics = "machine", format = "text", implName, predName, out;
    std::uint64_t fuel = machine::kDefaultFuel;
    unsigned n = 1, nMin = 2, nMax = 10;
    bool trace = false, timed = false;
    std::vector<std::string> impls, preds;

    auto* check = app.add_subcommand("check", "parse and typecheck a program, printing its type");
    check->add_option("file", file)->required()->check(CLI::ExistingFile);

    auto* run = app.add_subcommand("run", "run a program");
    run->add_option("file", file)->required()->check(CLI::ExistingFile);
    run->add_option("--semantics", semantics)->check(CLI::IsMember({"machine", "smallstep"}));
    run->add_option("--fuel", fuel);
    run->add_flag("--trace", trace, "print every transition to stderr");

    auto* tree = app.add_subcommand("tree", "extract the decision tree of a catalog predicate");
    tree->add_option("--pred", predName)->required();
    tree->add_option("-n", n);
    tree->add_option("--format", format)->check(CLI::IsMember({"text", "dot"}));
    tree->add_flag("--timed", timed, "label edges with step counts");
    tree->add_option("--fuel", fuel, "per edge");

    auto* count = app.add_subcommand("count", "apply a catalog counter to a catalog predicate");
    count->add_option("--impl", implName)->required();
    count->add_option("--pred", predName)->required();
    count->add_option("-n", n);
    count->add_option("--fuel", fuel);

    auto* bench = app.add_subcommand("bench", "tabulate ticks over counters, predicates and n as CSV");
    std::string spec;
    bench->add_option("--spec", spec, "flat key = value file with the options below")->check(CLI::ExistingFile);
    bench->add_option("--impl", impls)->delimiter(',');
    bench->add_option("--pred", preds)->delimiter(',');
    bench->add_option("--n-min", nMin);
    bench->add_option("--n-max", nMax);
    bench->add_option("--fuel", fuel);
    bench->add_option("--out", out, "CSV path; stdout when absent");

    auto* list = app.add_subcommand("list", "print the program catalog");
    auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*check) return cmdCheck(file);
        if (*run) return cmdRun(file, semantics, fuel, trace);
        if (*tree) return cmdTree(predName, n, format, timed, fuel == machine::kDefaultFuel ? 10'000'000 : fuel);
        if (*count) return cmdCount(implName, predName, n, fuel);
        if (*bench) {
            if (!spec.empty()) readSpec(spec, impls, preds, nMin, nMax, fuel, out);
            if (impls.empty() || preds.empty()) throw EvalError("bench needs at least one --impl and one --pred");
            return cmdBench(impls, preds, nMin, nMax, fuel, out);
        }
        if (*list) return cmdList();
        if (*selftest) return cmdSelftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
