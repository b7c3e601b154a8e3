#include "fx/simulation.hpp"

namespace fx {

namespace {

bool sameStore(const smallstep::Store& a, const smallstep::Store& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [l, v] : a) {
        auto it = b.find(l);
        if (it == b.end() || !alphaEqual(v, it->second)) return false;
    }
    return true;
}

}  // namespace

SimulationReport simulate(const CompPtr& term, const Signature& sig, std::uint64_t fuel) {
    using namespace machine;
    SimulationReport rep;
    auto fail = [&](std::string why) {
        rep.ok = false;
        rep.failure = "transition " + std::to_string(rep.transitions) + ": " + std::move(why);
        return rep;
    };

    Config cfg = usesHandlers(term) ? injectHandler(term, sig) : injectBase(term);
    CompPtr current = decompile(cfg);
    if (!alphaEqual(current, completeAll(term, sig))) return fail("initial configuration does not decompile to the term");
    smallstep::StateConfig reference{current, 0, {}};

    while (rep.transitions < fuel) {
        bool identityReturn = cfg.handler && cfg.handler->identity();
        StepOutcome out = step(cfg);
        if (out.status == Status::ProbeApplied) return fail("probe applied");
        if (out.status != Status::Stepped) {
            rep.final = out.status == Status::Value ? Final::Value : Final::Unhandled;
            if (!std::holds_alternative<smallstep::Normal>(smallstep::step(reference, sig)))
                return fail("machine stopped but the term still reduces");
            CompPtr expected = out.status == Status::Value ? build::ret(decompile(out.arg)) : current;
            if (!alphaEqual(expected, reference.term)) return fail("final value differs");
            return rep;
        }
        ++rep.transitions;
        CompPtr next = decompile(cfg);
        if (isAdministrative(out.rule, identityReturn)) {
            ++rep.administrative;
            if (!alphaEqual(next, current)) return fail(std::string(ruleName(out.rule)) + " changed the term");
            continue;
        }
        if (out.rule == Rule::MemoHit) {
            ++rep.resyncs;
            current = next;
            reference.term = next;
            continue;
        }
        ++rep.betaSteps;
        auto r = smallstep::step(reference, sig);
        if (!std::holds_alternative<smallstep::StateConfig>(r))
            return fail(std::string(ruleName(out.rule)) + " fired on a normal term");
        reference = std::get<smallstep::StateConfig>(std::move(r));
        if (!alphaEqual(next, reference.term)) return fail(std::string(ruleName(out.rule)) + " disagrees with the small step");
        if (!sameStore(decompileStore(cfg), reference.store)) return fail("stores differ");
        current = next;
    }
    rep.final = Final::FuelExhausted;
    return rep;
}

}  // namespace fx
