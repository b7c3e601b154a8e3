#include "fx/corpus.hpp"

#include <vector>

namespace fx::corpus {

namespace {

class Gen {
public:
    Gen(std::mt19937_64& rng, const Options& opts) : rng_(rng), opts_(opts) {}

    std::string program() {
        return "operation Flip : Unit -> Bool\noperation Ask : Nat -> Nat\n" + nat(opts_.depth) + "\n";
    }

private:
    struct Scope {
        std::vector<std::string> nats, bools, refs, fns;
        bool flip = false, ask = false;
    };

    std::mt19937_64& rng_;
    Options opts_;
    Scope scope_;
    unsigned fresh_ = 0;

    unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    std::string name(const char* base) { return base + std::to_string(fresh_++); }

    template <class F>
    std::string with(F&& f) {
        Scope saved = scope_;
        std::string s = f();
        scope_ = std::move(saved);
        return s;
    }

    std::string natAtom() {
        if (!scope_.nats.empty() && chance(0.5)) return scope_.nats[pick(scope_.nats.size())];
        if (!scope_.refs.empty() && chance(0.3)) return "(!" + scope_.refs[pick(scope_.refs.size())] + ")";
        return std::to_string(pick(4));
    }

    std::string boolAtom() {
        if (!scope_.bools.empty() && chance(0.5)) return scope_.bools[pick(scope_.bools.size())];
        return chance(0.5) ? "true" : "false";
    }

    std::string boolean(unsigned d) {
        if (d == 0) return boolAtom();
        switch (pick(6)) {
            case 0: return "(" + nat(d - 1) + " = " + nat(d - 1) + ")";
            case 1: return "(if " + boolean(d - 1) + " then " + boolean(d - 1) + " else " + boolean(d - 1) + ")";
            case 2: return "(" + boolean(d - 1) + " && " + boolean(d - 1) + ")";
            case 3:
                if (scope_.flip || chance(opts_.unhandled)) return "(do Flip ())";
                return boolAtom();
            case 4: {
                std::string b = name("b");
                std::string bound = boolean(d - 1);
                return with([&] {
                    scope_.bools.push_back(b);
                    return "(let " + b + " <- " + bound + " in " + boolean(d - 1) + ")";
                });
            }
            default: return boolAtom();
        }
    }

    std::string nat(unsigned d) {
        if (d == 0) return natAtom();
        switch (pick(15)) {
            case 0: return "(" + nat(d - 1) + " + " + nat(d - 1) + ")";
            case 1: return "(" + nat(d - 1) + " - " + nat(d - 1) + ")";
            case 2: return "(if " + boolean(d - 1) + " then " + nat(d - 1) + " else " + nat(d - 1) + ")";
            case 3: {
                std::string x = name("x");
                std::string bound = nat(d - 1);
                return with([&] {
                    scope_.nats.push_back(x);
                    return "(let " + x + " <- " + bound + " in " + nat(d - 1) + ")";
                });
            }
            case 4: {
                std::string x = name("x");
                std::string body = with([&] {
                    scope_.nats.push_back(x);
                    return nat(d - 1);
                });
                return "((fun (" + x + " : Nat) -> " + body + ") " + nat(d - 1) + ")";
            }
            case 5: {
                std::string f = name("f"), k = name("k"), t = name("t");
                std::string base = nat(d - 1);
                std::string step = with([&] {
                    scope_.nats.push_back(k);
                    return nat(d - 1);
                });
                return "((rec " + f + " (" + k + " : Nat) : Nat -> if " + k + " = 0 then " + base + " else let " + t +
                       " <- " + f + " (" + k + " - 1) in " + t + " + " + step + ") " + std::to_string(pick(4)) + ")";
            }
            case 6: {
                std::string r = name("r");
                std::string init = nat(d - 1);
                return with([&] {
                    scope_.refs.push_back(r);
                    std::string write = nat(d - 1);
                    return "(letref " + r + " = " + init + " in " + r + " := " + write + "; " + nat(d - 1) + ")";
                });
            }
            case 7: {
                std::string m = name("m"), a = name("a"), b = name("b");
                // memoised thunks stay pure, so caching is unobservable
                std::string body = with([&] {
                    scope_.flip = scope_.ask = false;
                    scope_.refs.clear();
                    Options saved = opts_;
                    opts_.unhandled = 0;
                    std::string s = nat(d - 1);
                    opts_ = saved;
                    return s;
                });
                return "(let " + m + " <- memoise (fun (u : Unit) -> " + body + ") in let " + a + " <- " + m +
                       " () in let " + b + " <- " + m + " () in " + a + " + " + b + ")";
            }
            case 8: {
                std::string g = name("g"), x = name("x");
                std::string body = with([&] {
                    scope_.nats.push_back(x);
                    return nat(d - 1);
                });
                return with([&] {
                    scope_.fns.push_back(g);
                    return "(let " + g + " = fun (" + x + " : Nat) -> " + body + " in " + nat(d - 1) + ")";
                });
            }
            case 9:
                if (!scope_.fns.empty()) return "(" + scope_.fns[pick(scope_.fns.size())] + " " + nat(d - 1) + ")";
                return natAtom();
            case 10:
                if (scope_.ask || chance(opts_.unhandled)) return "(do Ask " + nat(d - 1) + ")";
                return natAtom();
            case 11: return flipHandler(d);
            case 12: return askHandler(d);
            case 13: return stateHandler(d);
            default: return natAtom();
        }
    }

    std::string flipHandler(unsigned d) {
        std::string x = name("x"), r = name("r");
        std::string body = with([&] {
            scope_.flip = true;
            return nat(d - 1);
        });
        std::string ret = with([&] {
            scope_.nats.push_back(x);
            return nat(d - 1);
        });
        std::string clause;
        switch (pick(3)) {
            case 0: clause = "let a <- " + r + " true in let b <- " + r + " false in a + b"; break;
            case 1: clause = r + " " + boolean(d - 1); break;
            default: clause = nat(d - 1); break;
        }
        return "(handle " + body + " with {val " + x + " -> " + ret + " | Flip _ " + r + " -> " + clause + "})";
    }

    std::string askHandler(unsigned d) {
        std::string k = name("k"), r = name("r");
        std::string body = with([&] {
            scope_.ask = true;
            return nat(d - 1);
        });
        std::string reply = with([&] {
            scope_.nats.push_back(k);
            return nat(d - 1);
        });
        return "(handle " + body + " with {val v -> v | Ask " + k + " " + r + " -> " + r + " " + reply + "})";
    }

    // Parameter-passing: every clause returns a function of the threaded Nat.
    std::string stateHandler(unsigned d) {
        std::string h = name("h"), k = name("k"), r = name("r"), s = name("s"), x = name("x");
        std::string body = with([&] {
            scope_.ask = true;
            return nat(d - 1);
        });
        std::string ret = with([&] {
            scope_.nats.push_back(x);
            scope_.nats.push_back(s);
            return nat(d - 1);
        });
        return "(let " + h + " <- handle " + body + " with {val " + x + " -> fun (" + s + " : Nat) -> " + ret +
               " | Ask " + k + " " + r + " -> fun (" + s + " : Nat) -> let f <- " + r + " " + s + " in f (" + s +
               " + " + k + ")} in " + h + " " + natAtom() + ")";
    }
};

}  // namespace

std::string randomProgram(std::mt19937_64& rng, const Options& opts) { return Gen(rng, opts).program(); }

}  // namespace fx::corpus
