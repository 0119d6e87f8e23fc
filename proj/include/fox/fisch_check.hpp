#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fox/fisch.hpp"

namespace fox {

/// Table FIsch with a history-only stop predicate: stops at length
/// >= max_len, and at shorter histories when a hash of (seed, length, last
/// index) says so.
FISch random_fisch(std::uint64_t seed, nat max_len, nat max_index);

/// Small closed configurations (one to three threads, some with shared
/// references) used as starting points for the combinator checks.
std::vector<Config> fisch_test_configs();

/// Configurations that own at least one nonempty presampling tape.
std::vector<Config> tape_test_configs();

struct LemmaCheck {
  std::string property;
  nat instances = 0;
  nat comparisons = 0;  // depth x instance pairs
  nat nontrivial = 0;   // comparisons whose left side carries mass
  nat failures = 0;
  std::string first_failure;
  bool pass() const { return failures == 0 && instances > 0 && nontrivial > 0; }
};

struct FischValidation {
  std::vector<LemmaCheck> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return !checks.empty();
  }
};

/// Exact finite-depth checks at every depth 0..max_depth:
///  - lift:    fiexec(lift(z0, phi), n, z0 ++ z, rho) = prepend z0 <$> fiexec(phi, n, z, rho)
///  - cons:    fiexec(consfisch(f, g), n + 1, [], rho)
///               = f(rho) >>= j. fi_tp_step(rho, j) >>= r. fiexec(lift([(rho, j)], g j), n, [(rho, j)], r)
///  - app:     (fiexec(phi, n, [], rho) >>= (z, r). fiexec(lift(z, f z), n, z, r)) <= fiexec(appfisch(phi, f), 2n, [], rho)
///  - to-sch:  (fiexec(phi, n, z, rho) >>= head value of final configs) <= exec(fisch_to_sch(phi), n, z, rho)
///  - monotone mass of fiexec in n, and depth independence over initialfisch
///  - tape blindness of transitions and of the history part of fisch_step
FischValidation validate_fisch_lemmas(nat instances = 200, nat max_depth = 6,
                                      std::uint64_t seed = 0x5eed);

}  // namespace fox
