#include "fx/countlib.hpp"

#include <map>

#include "fx/text.hpp"

namespace fx::countlib {

using namespace machine;

namespace {

std::string fill(std::string text, const std::map<std::string, std::string>& vars) {
    for (const auto& [key, value] : vars) {
        const std::string pat = "${" + key + "}";
        for (std::size_t at = text.find(pat); at != std::string::npos; at = text.find(pat, at + value.size()))
            text.replace(at, pat.size(), value);
    }
    return text;
}

std::string num(unsigned n) { return std::to_string(n); }

const char* kSpin = "(rec spin (u : Unit) : Bool -> spin u) ()";

const char* kNth = R"(
let nth = rec nth (xs : List Bool) -> fun (i : Nat) ->
  case xs {inl _ -> false; inr c -> let (h, t) = c in if i = 0 then h else nth t (i - 1)} in
)";

const char* kPow = R"(
let pow = rec pow (k : Nat) : Nat -> if k = 0 then 1 else let p <- pow (k - 1) in p + p in
)";

// go k xs acc: every extension of xs by k more bits, accumulating accepted points.
const char* kNaive = R"(
let naive = fun (pred : (Nat -> Bool) -> Bool) ->
  let go = rec go (k : Nat) -> fun (xs : List Bool) -> fun (acc : Nat) ->
    if k = 0 then (let b <- pred (fun (i : Nat) -> nth xs i) in if b then acc + 1 else acc)
    else let a <- go (k - 1) (true :: xs) acc in go (k - 1) (false :: xs) a in
  go ${n} [] 0 in
)";

const char* kBestshot = R"(
let search = rec search (pred : (Nat -> Bool) -> Bool) -> fun (k : Nat) -> fun (xs : List Bool) ->
  if k = 0 then (let b <- pred (fun (i : Nat) -> nth xs i) in if b then inr xs else inl ())
  else let r <- search pred (k - 1) (true :: xs) in
    case r {inl _ -> search pred (k - 1) (false :: xs); inr ys -> inr ys} in
let bestshot = fun (pred : (Nat -> Bool) -> Bool) ->
  fun (i : Nat) -> let r <- search pred ${n} [] in case r {inl _ -> false; inr ys -> nth ys i} in
)";

// [f 0, ..., f (n-1)], evaluated left to right.
std::string listOfPoint(const std::string& f, unsigned n) {
    std::string s, items;
    for (unsigned i = 0; i < n; ++i) {
        s += "let b" + num(i) + " <- " + f + " " + num(i) + " in ";
        items += (i ? ", b" : "b") + num(i);
    }
    return "(" + s + "[" + items + "])";
}

// Map_n as a balanced tree of pairs over [lo, hi) with Unit + Bool leaves.
std::string mapEmpty(unsigned lo, unsigned hi) {
    if (hi - lo <= 1) return "inl ()";
    unsigned mid = lo + (hi - lo) / 2;
    return "(" + mapEmpty(lo, mid) + ", " + mapEmpty(mid, hi) + ")";
}

std::string mapLookup(unsigned lo, unsigned hi, const std::string& m) {
    if (hi - lo <= 1) return m;
    unsigned mid = lo + (hi - lo) / 2;
    std::string l = m + "l", r = m + "r";
    return "(let (" + l + ", " + r + ") = " + m + " in if i < " + num(mid) + " then " + mapLookup(lo, mid, l) +
           " else " + mapLookup(mid, hi, r) + ")";
}

std::string mapAdd(unsigned lo, unsigned hi, const std::string& m) {
    if (hi - lo <= 1) return "inr b";
    unsigned mid = lo + (hi - lo) / 2;
    std::string l = m + "l", r = m + "r";
    return "(let (" + l + ", " + r + ") = " + m + " in if i < " + num(mid) + " then (let " + l + "2 <- " +
           mapAdd(lo, mid, l) + " in (" + l + "2, " + r + ")) else (let " + r + "2 <- " + mapAdd(mid, hi, r) +
           " in (" + l + ", " + r + "2)))";
}

const char* kEffCount = R"(
operation Branch : Unit -> Bool
fun (pred : (Nat -> Bool) -> Bool) ->
  handle pred (fun _ -> do Branch ()) with {
    val x -> if x then 1 else 0
  | Branch _ r -> let xt <- r true in let xf <- r false in xt + xf
  }
)";

// State: the answers seen so far and how many there are. Leaves stand for
// 2^(n - |answers|) points.
const char* kEffCountRepeated = R"(
operation Branch : Nat -> Bool
${pow}
let lookup = fun (i : Nat) -> fun m -> ${lookup} in
let add = fun (i : Nat) -> fun (b : Bool) -> fun m -> ${add} in
fun (pred : (Nat -> Bool) -> Bool) ->
  let h <- handle pred (fun (i : Nat) -> do Branch i) with {
    val x -> fun s -> let (m, c) = s in if x then pow (${n} - c) else 0
  | Branch i r -> fun s -> let (m, c) = s in let found <- lookup i m in
      case found {
        inl _ -> let mt <- add i true m in let xt <- r true (mt, c + 1) in
                 let mf <- add i false m in let xf <- r false (mf, c + 1) in xt + xf;
        inr b -> r b s}
  } in h (${empty}, 0)
)";

const char* kEffCountMissing = R"(
operation Branch : Unit -> Bool
${pow}
fun (pred : (Nat -> Bool) -> Bool) ->
  let h <- handle pred (fun _ -> do Branch ()) with {
    val x -> fun (d : Nat) -> if x then pow (${n} - d) else 0
  | Branch _ r -> fun (d : Nat) -> let xt <- r true (d + 1) in let xf <- r false (d + 1) in xt + xf
  } in h 0
)";

const char* kHughes = R"(
let nil = fun (xs : List (${A})) -> xs in
let singleton = fun (x : ${A}) -> fun (xs : List (${A})) -> x :: xs in
let concat = fun (f : List (${A}) -> List (${A})) -> fun (g : List (${A}) -> List (${A})) ->
  fun (xs : List (${A})) -> let ys <- g xs in f ys in
let toConsList = fun (f : List (${A}) -> List (${A})) -> f [] in
)";

const char* kConsList = R"(
let append = rec append (xs : List (Nat -> Bool)) -> fun (ys : List (Nat -> Bool)) ->
  case xs {inl _ -> ys; inr c -> let (h, t) = c in let r <- append t ys in h :: r} in
)";

const char* kEffSearch = R"(
operation Branch : Nat -> Bool
${lists}
let bot = fun (j : Nat) -> ${spin} in
fun (pred : (Nat -> Bool) -> Bool) ->
  let h <- handle pred (fun (i : Nat) -> do Branch i) with {
    val x -> fun (q : Nat -> Bool) -> ${leaf}
  | Branch i r -> fun (q : Nat -> Bool) ->
      let xt <- r true (fun (j : Nat) -> if i = j then true else q j) in
      let xf <- r false (fun (j : Nat) -> if i = j then false else q j) in ${join}
  } in ${finish}
)";

// count' and count'' share one recursive function over a tagged argument.
const char* kBerger = R"(
${nth}
let length = rec length (xs : List Bool) : Nat ->
  case xs {inl _ -> 0; inr c -> let (h, t) = c in let k <- length t in k + 1} in
let snoc = rec snoc (xs : List Bool) -> fun (b : Bool) ->
  case xs {inl _ -> [b]; inr c -> let (h, t) = c in let r <- snoc t b in h :: r} in
fun (pred : (Nat -> Bool) -> Bool) ->
  let lazyPoint = fun (st : List Bool) -> fun (f : Unit -> List Bool) -> fun (i : Nat) ->
    let len <- length st in if i < len then nth st i else let l <- f () in nth l i in
  let bestshot2 = rec bestshot2 (start : List Bool) : List Bool ->
    let bestshot1 = fun (st : List Bool) ->
      let f <- ${memo} (fun (u : Unit) -> bestshot2 st) in lazyPoint st f in
    let len <- length start in
    if len = ${n} then start
    else let f <- bestshot1 (snoc start true) in
      if pred f then ${listOfF} else bestshot2 (snoc start false) in
  let bestshot1 = fun (st : List Bool) ->
    let f <- ${memo} (fun (u : Unit) -> bestshot2 st) in lazyPoint st f in
  let count = rec count (arg : (List Bool * Nat) + (List Bool * (List Bool * Nat))) : Nat ->
    case arg {
      inl a -> let (start, acc) = a in let len <- length start in
        if len = ${n} then (let ok <- pred (fun (i : Nat) -> nth start i) in if ok then acc + 1 else acc)
        else let f <- bestshot1 start in
          if pred f then (let leftmost <- ${listOfF} in count (inr (start, (leftmost, acc)))) else acc;
      inr b -> let (start, rest) = b in let (leftmost, acc) = rest in let len <- length start in
        if len = ${n} then acc + 1
        else let bit <- nth leftmost len in
          let acc2 <- count (inr (snoc start bit, (leftmost, acc))) in
          if bit then count (inl (snoc start false, acc2)) else acc2} in
  count (inl ([], 0))
)";

// Rows are scanned in order; each queen is checked against the earlier rows as soon as it is read.
const char* kFailFast = R"(
let absdiff = fun (a : Nat) -> fun (b : Nat) -> (a - b) + (b - a) in
let safe = rec safe (p : Nat * (Nat * List Nat)) : Bool ->
  let (c, rest) = p in let (d, prev) = rest in
  case prev {inl _ -> true; inr cell -> let (pc, tl) = cell in
    if c = pc then false else let diff <- absdiff c pc in if diff = d then false else safe (c, (d + 1, tl))} in
let failfast = fun (q : Nat -> Bool) ->
  let rows = rec rows (p : Nat * List Nat) : Bool ->
    let (base, prev) = p in
    if base = ${nn} then true else
    let scan = rec scan (s : Nat * (Unit + Nat)) : Bool ->
      let (j, found) = s in
      if j = ${n} then (case found {inl _ -> false; inr c -> rows (base + ${n}, c :: prev)})
      else let b <- q (base + j) in
        if b then (case found {
          inl _ -> let ok <- safe (j, (1, prev)) in if ok then scan (j + 1, inr j) else false;
          inr _ -> false})
        else scan (j + 1, found) in
    scan (0, inl ()) in
  rows (0, []) in
)";

const char* kEager = R"(
fun (q : Nat -> Bool) ->
  let read = rec read (k : Nat) -> fun (acc : List Bool) ->
    if k = ${nn} then acc else let b <- q k in read (k + 1) (b :: acc) in
  let bits <- read 0 [] in
  failfast (fun (k : Nat) -> nth bits (${nn} - 1 - k))
)";

const char* kToss = R"(
operation Branch : Unit -> Bool
data Toss = Heads | Tails
let append = rec append (xs : List Toss) -> fun (ys : List Toss) ->
  case xs {inl _ -> ys; inr c -> let (h, t) = c in let r <- append t ys in h :: r} in
let toss = fun _ -> if do Branch () then Heads else Tails in
handle toss () with {val x -> [x] | Branch _ r -> append (r true) (r false)}
)";

}  // namespace

std::string levelName(Level l) {
    switch (l) {
        case Level::Base: return "base";
        case Level::Handlers: return "handlers";
        case Level::BaseMemo: return "base+memoise";
        case Level::State: return "state";
    }
    return "?";
}

std::string className(InputClass c) {
    switch (c) {
        case InputClass::NStandard: return "n-standard";
        case InputClass::AtMostOnce: return "at-most-once";
        case InputClass::General: return "general";
    }
    return "?";
}

std::string kindName(Kind k) {
    switch (k) {
        case Kind::Predicate: return "predicate";
        case Kind::Counter: return "counter";
        case Kind::Searcher: return "searcher";
        case Kind::Point: return "point";
        case Kind::Example: return "example";
    }
    return "?";
}

bool accepts(InputClass counter, InputClass predicate) {
    return static_cast<int>(predicate) <= static_cast<int>(counter);
}

bool conformsTo(const Program& p, Level l) {
    const bool h = usesHandlers(p.body), m = usesMemoise(p.body), s = usesState(p.body);
    switch (l) {
        case Level::Base: return !h && !m && !s;
        case Level::Handlers: return !m && !s;
        case Level::BaseMemo: return !h && !s;
        case Level::State: return !h && !m;
    }
    return false;
}

Program mkPoint(int which) {
    switch (which) {
        case 0: return parseProgram("fun (i : Nat) -> true");
        case 1: return parseProgram("fun (i : Nat) -> i = 0");
        default:
            return parseProgram(std::string("fun (i : Nat) -> if i = 0 then true else if i = 1 then false else ") +
                                kSpin);
    }
}

Program mkConstant(int which) {
    switch (which) {
        case 0: return parseProgram("fun (q : Nat -> Bool) -> true");
        case 1: return parseProgram("fun (q : Nat -> Bool) -> q 1; q 0; true");
        default: return parseProgram("fun (q : Nat -> Bool) -> q 0; q 0; true");
    }
}

Program mkIdentity(int which) {
    switch (which) {
        case 0: return parseProgram("fun (q : Nat -> Bool) -> q 0");
        case 1: return parseProgram("fun (q : Nat -> Bool) -> if q 0 then true else false");
        default: return parseProgram("fun (q : Nat -> Bool) -> q 0 && q 0");
    }
}

Program mkOdd(unsigned n) {
    std::string indices;
    for (unsigned i = 0; i < n; ++i) indices += (i ? ", " : "") + num(i);
    return parseProgram(fill(R"(
let xor = fun (a : Bool) -> fun (b : Bool) -> if a then (if b then false else true) else b in
let map = rec map (f : Nat -> Bool) -> fun (xs : List Nat) ->
  case xs {inl _ -> []; inr c -> let (h, t) = c in let y <- f h in let ys <- map f t in y :: ys} in
let fold = rec fold (g : Bool -> Bool -> Bool) -> fun (z : Bool) -> fun (xs : List Bool) ->
  case xs {inl _ -> z; inr c -> let (h, t) = c in let z2 <- g z h in fold g z2 t} in
fun (q : Nat -> Bool) -> let bs <- map q [${indices}] in fold xor false bs
)",
                             {{"indices", indices}}));
}

Program mkOddFused(unsigned n) {
    return parseProgram(fill(R"(
fun (q : Nat -> Bool) ->
  let go = rec go (p : Nat * Bool) : Bool -> let (i, acc) = p in
    if i = ${n} then acc
    else let b <- q i in go (i + 1, if b then (if acc then false else true) else acc) in
  go (0, false)
)",
                             {{"n", num(n)}}));
}

Program mkBottom() { return parseProgram(std::string("fun (q : Nat -> Bool) -> ") + kSpin); }

Program mkToss() { return parseProgram(kToss); }

Program mkNaiveCount(unsigned n) { return parseProgram(fill(std::string(kNth) + kNaive + "naive", {{"n", num(n)}})); }

Program mkBestshot(unsigned n) {
    return parseProgram(fill(std::string(kNth) + kBestshot + "bestshot", {{"n", num(n)}}));
}

Program mkLazyCount(unsigned n) {
    return parseProgram(fill(std::string(kNth) + kNaive + kBestshot + R"(
fun (pred : (Nat -> Bool) -> Bool) ->
  if pred (bestshot pred) then naive pred else 0
)",
                             {{"n", num(n)}}));
}

Program mkEffCount() { return parseProgram(kEffCount); }

Program mkEffCountRepeated(unsigned n) {
    const unsigned size = n == 0 ? 1 : n;
    return parseProgram(fill(kEffCountRepeated, {{"pow", kPow},
                                                 {"lookup", mapLookup(0, size, "m")},
                                                 {"add", mapAdd(0, size, "m")},
                                                 {"empty", mapEmpty(0, size)},
                                                 {"n", num(n)}}));
}

Program mkEffCountMissing(unsigned n) { return parseProgram(fill(kEffCountMissing, {{"pow", kPow}, {"n", num(n)}})); }

std::string hughesPrelude(const std::string& elem) { return fill(kHughes, {{"A", elem}}); }

Program mkEffSearch(unsigned, bool hughes) {
    std::map<std::string, std::string> vars{{"spin", kSpin}};
    if (hughes) {
        vars["lists"] = hughesPrelude("Nat -> Bool");
        vars["leaf"] = "if x then singleton q else nil";
        vars["join"] = "concat xt xf";
        vars["finish"] = "let l <- h bot in toConsList l";
    } else {
        vars["lists"] = kConsList;
        vars["leaf"] = "if x then [q] else []";
        vars["join"] = "append xt xf";
        vars["finish"] = "h bot";
    }
    return parseProgram(fill(kEffSearch, vars));
}

Program mkBergerCount(unsigned n, bool memo) {
    return parseProgram(fill(kBerger, {{"nth", kNth},
                                       {"memo", memo ? "memoise" : "return"},
                                       {"listOfF", listOfPoint("f", n)},
                                       {"n", num(n)}}));
}

Program mkQueensPredicate(unsigned n, Queens variant) {
    std::string src = std::string(kNth) + kFailFast + (variant == Queens::Eager ? kEager : "failfast");
    return parseProgram(fill(src, {{"n", num(n)}, {"nn", num(n * n)}}));
}

std::uint64_t queensSolutions(unsigned n) {
    std::vector<int> cols;
    std::function<std::uint64_t()> place = [&]() -> std::uint64_t {
        if (cols.size() == n) return 1;
        std::uint64_t total = 0;
        const int row = static_cast<int>(cols.size());
        for (int c = 0; c < static_cast<int>(n); ++c) {
            bool ok = true;
            for (int r = 0; r < row && ok; ++r) ok = cols[r] != c && std::abs(cols[r] - c) != row - r;
            if (!ok) continue;
            cols.push_back(c);
            total += place();
            cols.pop_back();
        }
        return total;
    };
    return place();
}

Program pointTerm(const std::vector<bool>& bits) {
    std::string body = "false";
    for (std::size_t i = bits.size(); i-- > 0;)
        body = "if i = " + std::to_string(i) + " then " + (bits[i] ? "true" : "false") + " else " + body;
    return parseProgram("fun (i : Nat) -> " + body);
}

// ---------------------------------------------------------------- catalog

const std::vector<ProgramDescriptor>& catalog() {
    static const std::vector<ProgramDescriptor> all = [] {
        using D = ProgramDescriptor;
        auto fixed = [](Program (*f)(int), int k) { return [f, k](unsigned) { return f(k); }; };
        std::vector<D> v;
        v.push_back(D{"q0", "the point everywhere true", Level::Base, InputClass::General, Kind::Point, false,
                      fixed(mkPoint, 0)});
        v.push_back(D{"q1", "true at index 0 only", Level::Base, InputClass::General, Kind::Point, false,
                      fixed(mkPoint, 1)});
        v.push_back(D{"q2", "true, false, then divergence", Level::Base, InputClass::General, Kind::Point, false,
                      fixed(mkPoint, 2)});
        v.push_back(D{"T0", "constantly true, no queries", Level::Base, InputClass::AtMostOnce, Kind::Predicate,
                      false, fixed(mkConstant, 0)});
        v.push_back(D{"T1", "queries 1 then 0, answers true", Level::Base, InputClass::AtMostOnce,
                      Kind::Predicate, false, fixed(mkConstant, 1)});
        v.push_back(D{"T2", "queries 0 twice, answers true", Level::Base, InputClass::General, Kind::Predicate,
                      false, fixed(mkConstant, 2)});
        v.push_back(D{"never", "constantly false, no queries", Level::Base, InputClass::AtMostOnce,
                      Kind::Predicate, false, [](unsigned) { return parseProgram("fun (q : Nat -> Bool) -> false"); }});
        v.push_back(D{"I0", "returns q 0", Level::Base, InputClass::AtMostOnce, Kind::Predicate, false,
                      fixed(mkIdentity, 0)});
        v.push_back(D{"I1", "branches on q 0", Level::Base, InputClass::AtMostOnce, Kind::Predicate, false,
                      fixed(mkIdentity, 1)});
        v.push_back(D{"I2", "q 0 && q 0", Level::Base, InputClass::General, Kind::Predicate, false,
                      fixed(mkIdentity, 2)});
        v.push_back(D{"odd", "parity via fold and map over [0..n-1]", Level::Base, InputClass::NStandard,
                      Kind::Predicate, true, mkOdd});
        v.push_back(D{"odd-fused", "parity in a single accumulating loop", Level::Base, InputClass::NStandard,
                      Kind::Predicate, true, mkOddFused});
        v.push_back(D{"queens-eager", "n-queens on n*n bits, reading every bit first", Level::Base,
                      InputClass::NStandard, Kind::Predicate, true,
                      [](unsigned n) { return mkQueensPredicate(n, Queens::Eager); },
                      [](unsigned n) { return n * n; }});
        v.push_back(D{"queens-failfast", "n-queens on n*n bits, stopping at the first conflict", Level::Base,
                      InputClass::AtMostOnce, Kind::Predicate, true,
                      [](unsigned n) { return mkQueensPredicate(n, Queens::FailFast); },
                      [](unsigned n) { return n * n; }});
        v.push_back(D{"bottom", "a predicate that diverges", Level::Base, InputClass::General, Kind::Example, false,
                      [](unsigned) { return mkBottom(); }});
        v.push_back(D{"toss", "a coin toss under the enumerating handler", Level::Handlers, InputClass::General,
                      Kind::Example, false, [](unsigned) { return mkToss(); }});
        v.push_back(D{"naivecount", "applies the predicate to all 2^n points", Level::Base, InputClass::General,
                      Kind::Counter, true, mkNaiveCount});
        v.push_back(D{"bestshot", "a satisfying point if there is one", Level::Base, InputClass::General,
                      Kind::Example, true, mkBestshot});
        v.push_back(D{"lazycount", "naivecount guarded by one call on bestshot", Level::Base, InputClass::General,
                      Kind::Counter, true, mkLazyCount});
        v.push_back(D{"effcount", "handler resuming Branch with true and false", Level::Handlers,
                      InputClass::NStandard, Kind::Counter, false, [](unsigned) { return mkEffCount(); }});
        v.push_back(D{"effcount-repeated", "remembers answers; scales leaves by unqueried indices",
                      Level::Handlers, InputClass::General, Kind::Counter, true, mkEffCountRepeated});
        v.push_back(D{"effcount-missing", "scales each leaf by 2^(n-depth)", Level::Handlers,
                      InputClass::AtMostOnce, Kind::Counter, true, mkEffCountMissing});
        v.push_back(D{"effsearch", "satisfying points, joined as Hughes lists", Level::Handlers,
                      InputClass::AtMostOnce, Kind::Searcher, true, [](unsigned n) { return mkEffSearch(n, true); }});
        v.push_back(D{"effsearch-cons", "satisfying points, joined by append", Level::Handlers,
                      InputClass::AtMostOnce, Kind::Searcher, true,
                      [](unsigned n) { return mkEffSearch(n, false); }});
        v.push_back(D{"bergercount", "nested best-shot search with memoised points", Level::BaseMemo,
                      InputClass::General, Kind::Counter, true, [](unsigned n) { return mkBergerCount(n, true); }});
        v.push_back(D{"bergercount-id", "bergercount with memoise replaced by return", Level::Base,
                      InputClass::General, Kind::Counter, true, [](unsigned n) { return mkBergerCount(n, false); }});
        return v;
    }();
    return all;
}

const ProgramDescriptor& find(const std::string& name) {
    for (const auto& d : catalog())
        if (d.name == name) return d;
    throw EvalError("unknown program '" + name + "'");
}

std::vector<ProgramDescriptor> examplePrograms() {
    std::vector<ProgramDescriptor> out;
    for (const auto& d : catalog())
        if (d.kind == Kind::Point || d.kind == Kind::Predicate || d.name == "bottom" || d.name == "toss")
            out.push_back(d);
    return out;
}

// ---------------------------------------------------------------- running

MValuePtr pointValue(const std::vector<bool>& bits) {
    static const MValuePtr fromList = [] {
        Program p = parseProgram(std::string(kNth) + "fun (xs : List Bool) -> fun (i : Nat) -> nth xs i");
        return evaluateToValue(p.body, p.sig);
    }();
    MValuePtr list = mval::inj(true, mval::unit());
    for (std::size_t i = bits.size(); i-- > 0;) list = mval::inj(false, mval::pair(mval::boolean(bits[i]), list));
    RunResult r = drive(applicationConfig(fromList, list, Mode::Base), 100);
    if (r.final != Final::Value) throw EvalError("could not build a point");
    return r.value;
}

std::optional<bool> applyPredicate(const MValuePtr& pred, const MValuePtr& point, std::uint64_t fuel) {
    RunResult r = drive(applicationConfig(pred, point, Mode::Base), fuel);
    if (r.final != Final::Value) return std::nullopt;
    return mval::asBool(r.value);
}

std::uint64_t bruteForceCount(const MValuePtr& pred, unsigned arity) {
    std::uint64_t count = 0;
    std::vector<bool> bits(arity);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << arity); ++k) {
        for (unsigned i = 0; i < arity; ++i) bits[i] = (k >> i) & 1;
        auto b = applyPredicate(pred, pointValue(bits));
        if (!b) throw EvalError("predicate is not total on B^" + std::to_string(arity));
        count += *b;
    }
    return count;
}

std::optional<std::vector<MValuePtr>> listItems(const MValuePtr& v) {
    std::vector<MValuePtr> out;
    MValuePtr cur = v;
    for (;;) {
        const auto* inj = std::get_if<MInj>(&cur->node);
        if (!inj) return std::nullopt;
        if (inj->left) return out;
        const auto* cell = std::get_if<MPair>(&inj->payload->node);
        if (!cell) return std::nullopt;
        out.push_back(cell->first);
        cur = cell->second;
    }
}

CountOutcome runCounter(const MValuePtr& counter, const MValuePtr& pred, bool handlers, std::uint64_t fuel) {
    CountOutcome out{drive(applicationConfig(counter, pred, handlers ? Mode::Handler : Mode::Base), fuel), {}, {}};
    if (out.run.final != Final::Value) return out;
    if (auto k = mval::asNum(out.run.value)) {
        out.count = *k;
    } else if (auto items = listItems(out.run.value)) {
        out.count = items->size();
        out.items = std::move(*items);
    }
    return out;
}

CountOutcome runCounter(const Program& counter, const Program& pred, std::uint64_t fuel) {
    const bool handlers = usesHandlers(counter.body) || usesHandlers(pred.body);
    return runCounter(evaluateToValue(counter.body, counter.sig, fuel), evaluateToValue(pred.body, pred.sig, fuel),
                      handlers, fuel);
}

}  // namespace fx::countlib
