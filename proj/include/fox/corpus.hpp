#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fox/rat.hpp"
#include "fox/dist.hpp"

namespace fox {

enum class Claim { Refines, Equiv, StrictGap };

std::string to_string(Claim c);

/// A rejection loop on one side: each iteration fails with probability
/// `reject`, which gives the geometric residual reject^floor(D / c) once the
/// per-iteration cost c has been measured.
struct LoopSpec {
  Rat reject;
};

struct CorpusEntry {
  std::string name;
  std::string summary;
  std::string left;   // program source, prelude included
  std::string right;
  Claim claim = Claim::Equiv;
  std::vector<std::string> probes;  // value literals in source syntax
  nat depth = 20;                   // desk depth for reports
  std::map<std::string, std::string> params;
  std::optional<LoopSpec> left_loop;
  std::optional<LoopSpec> right_loop;
  bool expected_fail = false;
};

/// nondet, diverge and min as top-level definitions.
const std::string& prelude();

std::string entropy_mixer_source();
std::string batch_impl_source(nat n, nat m);
std::string batch_spec_source(nat n, nat m);
std::string rejection_source(nat n, nat m);
std::string rejection_spec_source(nat m);
/// `adversary` is a closed function of type ref int -> unit.
std::string vn_coin_source(nat n, const std::string& adversary);
std::string vn_coin_spec_source(const std::string& adversary);
std::string sodium_source(nat max, nat upper_bound);
std::string sodium_spec_source(nat max, nat upper_bound);
std::string otp_impl_source(nat n);
std::string otp_spec_source(nat n);
std::string prog_a_source();
std::string prog_b_source();
std::string prog_c_source();
std::string prog_d_source();
/// let n = nondet () in if rand n = 0 then diverge () else ()
std::string no_optimal_source();

/// Adversaries for the von Neumann coin, by name.
const std::vector<std::pair<std::string, std::string>>& vn_adversaries();

/// e1 (+)_p e2 as `if rand N < M then e1 else e2` with M/(N+1) = p in
/// lowest terms. Requires 0 <= p <= 1.
std::string prob_choice(const Rat& p, const std::string& e1, const std::string& e2);
/// e1 or e2 as `if nondet () = 0 then e1 else e2`.
std::string nd_choice(const std::string& e1, const std::string& e2);

const std::vector<CorpusEntry>& corpus();
/// Throws std::out_of_range for unknown names.
const CorpusEntry& corpus_entry(const std::string& name);

}  // namespace fox
