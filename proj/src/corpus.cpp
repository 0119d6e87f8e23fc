#include "fox/corpus.hpp"

#include <stdexcept>

namespace fox {

namespace {

std::string num(nat n) { return std::to_string(n); }

}  // namespace

std::string to_string(Claim c) {
  switch (c) {
    case Claim::Refines: return "refines";
    case Claim::Equiv: return "equiv";
    case Claim::StrictGap: return "strict-gap";
  }
  return "?";
}

const std::string& prelude() {
  static const std::string text =
      "def nondet = fun _ -> let x = ref 0 in fork ((rec f _ = x := !x + 1; f ()) ()); !x;;\n"
      "def diverge = rec f _ = f ();;\n"
      "def min a b = if a < b then a else b;;\n";
  return text;
}

std::string entropy_mixer_source() {
  return prelude() +
         "let (y, r) = (ref 0, ref 0) in\n"
         "((let x1 = !y in let x2 = rand 1 in r := (x1 + x2) mod 2) ||| y := 1);\n"
         "!r\n";
}

std::string batch_impl_source(nat n, nat m) {
  return prelude() + "(fun _ -> let (x, y) = (rand " + num(n) + " ||| rand " + num(m) +
         ") in x * " + num(m + 1) + " + y) ()\n";
}

std::string batch_spec_source(nat n, nat m) {
  return prelude() + "(fun _ -> rand " + num((n + 1) * (m + 1) - 1) + ") ()\n";
}

std::string rejection_source(nat n, nat m) {
  return prelude() + "(rec f _ = let x = rand " + num(n) + " in if x <= " + num(m) +
         " then x else f ()) ()\n";
}

std::string rejection_spec_source(nat m) { return prelude() + "(fun _ -> rand " + num(m) + ") ()\n"; }

std::string vn_coin_source(nat n, const std::string& adversary) {
  return prelude() +
         "(fun adv -> let l = ref 0 in fork (adv l);\n"
         "  (rec f _ = let b = min (!l) " + num(n) + " in\n"
         "     let x = rand " + num(n + 1) + " <= b in\n"
         "     let y = rand " + num(n + 1) + " <= b in\n"
         "     if x = y then f () else x))\n"
         "  (" + adversary + ") ()\n";
}

std::string vn_coin_spec_source(const std::string& adversary) {
  return prelude() + "(fun adv _ -> rand 1 = 1) (" + adversary + ") ()\n";
}

std::string sodium_source(nat max, nat upper_bound) {
  return prelude() +
         "(fun ub -> if " + num(max) + " <= ub then 0 else if ub < 2 then 0 else\n"
         "  let min = " + num(max) + " mod ub in\n"
         "  let r = ref 0 in\n"
         "  (rec f _ = r := rand " + num(max - 1) + "; if !r < min then f () else (!r mod ub)) ())\n"
         "  " + num(upper_bound) + "\n";
}

std::string sodium_spec_source(nat max, nat upper_bound) {
  return prelude() + "(fun ub -> if " + num(max) + " <= ub || ub = 0 then 0 else rand (ub - 1)) " +
         num(upper_bound) + "\n";
}

std::string otp_impl_source(nat n) {
  return prelude() +
         "let x = ref 0 in\n"
         "((let msg = rand " + num(n) + " in faa x msg) ||| (let key = rand " + num(n) +
         " in faa x key));\n"
         "!x mod " + num(n + 1) + "\n";
}

std::string otp_spec_source(nat n) { return prelude() + "rand " + num(n) + "\n"; }

std::string prog_a_source() { return prelude() + "()\n"; }

std::string prog_b_source() {
  return prelude() + "if nondet () = rand 1 then () else diverge ()\n";
}

std::string prog_c_source() {
  return prelude() + "let l = alloctape 1 in if rand[l] 1 = nondet () then () else diverge ()\n";
}

std::string prog_d_source() { return prelude() + "if rand 1 = 1 then () else diverge ()\n"; }

std::string no_optimal_source() {
  return prelude() + "let n = nondet () in if rand n = 0 then diverge () else ()\n";
}

const std::vector<std::pair<std::string, std::string>>& vn_adversaries() {
  static const std::vector<std::pair<std::string, std::string>> advs = {
      {"idle", "fun l -> ()"},
      {"writer", "fun l -> l := 1"},
      {"forker", "fun l -> fork (l := 1); ()"},
      {"coin-writer", "fun l -> l := rand 1"},
      {"incrementer", "fun l -> (rec g _ = l := !l + 1; g ()) ()"},
  };
  return advs;
}

std::string prob_choice(const Rat& p, const std::string& e1, const std::string& e2) {
  if (!in_unit_interval(p)) throw std::invalid_argument("prob_choice: p outside [0,1]");
  Rat q = p;
  q.canonicalize();
  mpz_class m = q.get_num();
  mpz_class n = q.get_den() - 1;
  return "(if rand " + n.get_str() + " < " + m.get_str() + " then " + e1 + " else " + e2 + ")";
}

std::string nd_choice(const std::string& e1, const std::string& e2) {
  return "(if nondet () = 0 then " + e1 + " else " + e2 + ")";
}

namespace {

std::vector<std::string> range_probes(nat hi) {
  std::vector<std::string> out;
  for (nat k = 0; k <= hi; ++k) out.push_back(num(k));
  return out;
}

std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> c;
  auto add = [&](CorpusEntry e) { c.push_back(std::move(e)); };

  add({"entropy-mixer", "two entropy sources mixed across threads vs rand 1",
       entropy_mixer_source(), prelude() + "rand 1\n", Claim::Equiv, {"0", "1"}, 14, {},
       std::nullopt, std::nullopt, false});

  for (auto [n, m] : {std::pair<nat, nat>{1, 1}, {3, 1}}) {
    nat k = (n + 1) * (m + 1) - 1;
    add({"batch-" + num(n) + "-" + num(m), "parallel rand N ||| rand M combined vs rand K",
         batch_impl_source(n, m), batch_spec_source(n, m), Claim::Equiv, range_probes(k), 24,
         {{"N", num(n)}, {"M", num(m)}}, std::nullopt, std::nullopt, false});
  }

  add({"f-impl", "rand 7 ||| rand 31 combined vs rand 255", batch_impl_source(7, 31),
       batch_spec_source(7, 31), Claim::Equiv, {"0", "100", "255"}, 24,
       {{"N", "7"}, {"M", "31"}}, std::nullopt, std::nullopt, false});

  add({"rejection-3-1", "rejection sampler over rand 3 accepting <= 1 vs rand 1",
       rejection_source(3, 1), rejection_spec_source(1), Claim::Equiv, {"0", "1"}, 40,
       {{"N", "3"}, {"M", "1"}}, LoopSpec{make_rat(1, 2)}, std::nullopt, false});

  for (const auto& [adv_name, adv] : vn_adversaries()) {
    add({"vn-coin-" + adv_name, "von Neumann coin with a shared bias cell vs a fair flip",
         vn_coin_source(1, adv), vn_coin_spec_source(adv), Claim::Equiv, {"true", "false"}, 40,
         {{"N", "1"}, {"adversary", adv}}, LoopSpec{make_rat(5, 9)}, std::nullopt, false});
  }

  add({"sodium-8-3", "randombytes_uniform with MAX = 8 (production: 2^32), upper_bound = 3",
       sodium_source(8, 3), sodium_spec_source(8, 3), Claim::Equiv, {"0", "1", "2"}, 40,
       {{"MAX", "8"}, {"production_MAX", "4294967296"}, {"upper_bound", "3"}},
       LoopSpec{make_rat(1, 4)}, std::nullopt, false});

  add({"sodium-16-5", "randombytes_uniform with MAX = 16, upper_bound = 5", sodium_source(16, 5),
       sodium_spec_source(16, 5), Claim::Equiv, {"0", "1", "2", "3", "4"}, 40,
       {{"MAX", "16"}, {"production_MAX", "4294967296"}, {"upper_bound", "5"}},
       LoopSpec{make_rat(1, 16)}, std::nullopt, false});

  add({"otp-1", "one-time pad with concurrent faa vs rand 1", otp_impl_source(1),
       otp_spec_source(1), Claim::Equiv, {"0", "1"}, 30, {{"N", "1"}}, std::nullopt, std::nullopt,
       false});

  add({"prog-a-vs-d", "presampling on the right is unsound: progA against progD",
       prog_a_source(), prog_d_source(), Claim::StrictGap, {}, 10, {}, std::nullopt, std::nullopt,
       true});

  add({"no-optimal", "no optimal scheduler: nondet-indexed sample vs ()", no_optimal_source(),
       prelude() + "()\n", Claim::Refines, {}, 49, {}, std::nullopt, std::nullopt, false});
  return c;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> c = build_corpus();
  return c;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  for (const auto& e : corpus())
    if (e.name == name) return e;
  throw std::out_of_range("no corpus entry named " + name);
}

}  // namespace fox
