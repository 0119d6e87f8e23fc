#pragma once

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fox/dist.hpp"

namespace fox {

// ---------------------------------------------------------------------------
// Indexed core: weights over supports and a relation between support indices.

struct IndexedQuery {
  std::vector<Rat> w1;  // weights of supp(mu1)
  std::vector<Rat> w2;  // weights of supp(mu2)
  std::vector<std::pair<std::size_t, std::size_t>> rel;
};

/// max E1[X] - E2[Y] over X, Y in [0,1] with X(a) <= Y(b) on rel, by exact
/// simplex.
Rat lp_min_eps(const IndexedQuery& q);

/// max over U of mu1(U) - mu2(rel(U)); |supp mu1| <= 20.
Rat subset_min_eps(const IndexedQuery& q);

/// Exact simplex for: maximize c.x subject to A x <= b, x >= 0, with b >= 0.
/// Bland's rule; throws std::domain_error if unbounded.
Rat simplex_max(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                const std::vector<Rat>& c);

template <class A, class B>
struct CouplingQuery {
  Dist<A> mu1;
  Dist<B> mu2;
  Rat eps;
  std::set<std::pair<A, B>> rel;
};

/// Pairs touching elements outside the supports are dropped: for b outside
/// supp(mu2), Y(b) can be 1 at no cost; for a outside supp(mu1), X(a) has no
/// weight.
template <class A, class B>
IndexedQuery index_query(const Dist<A>& mu1, const Dist<B>& mu2,
                         const std::set<std::pair<A, B>>& rel) {
  IndexedQuery q;
  std::map<A, std::size_t> ia;
  std::map<B, std::size_t> ib;
  for (const auto& [a, w] : mu1) {
    ia.emplace(a, q.w1.size());
    q.w1.push_back(w);
  }
  for (const auto& [b, w] : mu2) {
    ib.emplace(b, q.w2.size());
    q.w2.push_back(w);
  }
  for (const auto& [a, b] : rel) {
    auto x = ia.find(a);
    auto y = ib.find(b);
    if (x != ia.end() && y != ib.end()) q.rel.emplace_back(x->second, y->second);
  }
  return q;
}

template <class A, class B>
Rat arcoupl_min_eps(const Dist<A>& mu1, const Dist<B>& mu2, const std::set<std::pair<A, B>>& rel) {
  return lp_min_eps(index_query(mu1, mu2, rel));
}

template <class A, class B>
Rat arcoupl_subset_oracle(const Dist<A>& mu1, const Dist<B>& mu2,
                          const std::set<std::pair<A, B>>& rel) {
  return subset_min_eps(index_query(mu1, mu2, rel));
}

template <class A, class B>
bool arcoupl_check(const CouplingQuery<A, B>& q) {
  return arcoupl_min_eps(q.mu1, q.mu2, q.rel) <= q.eps;
}

enum class ComposeOutcome { Holds, PremiseFailed, ConclusionFailed };

std::string to_string(ComposeOutcome c);

/// Checks one instance of the composition lemma: from ARcoupl(mu1, mu2, eps, R)
/// and ARcoupl(f a, g b, err(b), R') for all (a, b) in R on the supports,
/// conclude ARcoupl(mu1 >>= f, mu2 >>= g, eps + E_mu2[err], R'). The
/// conclusion is decided by the subset oracle.
template <class A, class B, class C, class D>
ComposeOutcome compose_check(const Dist<A>& mu1, const Dist<B>& mu2,
                             const std::function<Dist<C>(const A&)>& f,
                             const std::function<Dist<D>(const B&)>& g,
                             const std::set<std::pair<A, B>>& rel,
                             const std::set<std::pair<C, D>>& rel2, const Rat& eps,
                             const std::function<Rat(const B&)>& err) {
  if (arcoupl_min_eps(mu1, mu2, rel) > eps) return ComposeOutcome::PremiseFailed;
  for (const auto& [a, b] : rel) {
    if (mu1(a) == 0 || mu2(b) == 0) continue;
    if (arcoupl_min_eps(f(a), g(b), rel2) > err(b)) return ComposeOutcome::PremiseFailed;
  }
  Rat bound = eps + expect(mu2, err);
  Rat got = arcoupl_subset_oracle(dbind(f, mu1), dbind(g, mu2), rel2);
  return got <= bound ? ComposeOutcome::Holds : ComposeOutcome::ConclusionFailed;
}

/// E over unif(N) of the amplified per-branch error: 0 on the M+1 accepted
/// outcomes and (N+1)/(N-M) * eps on the rejected ones. Requires M < N.
Rat error_amp_identity(nat n, nat m, const Rat& eps);

// ---------------------------------------------------------------------------
// Rule premises at eps = 0 (distribution-level content of the coupling rules).

struct PremiseResult {
  std::string rule;
  Rat min_eps;
  bool holds;
};

/// unif(N) vs unif(N) under the bijection n -> (n + shift) mod (N+1).
PremiseResult premise_ht_couple(nat n, nat shift);
/// Labelled sampling against unlabelled: same uniform shape on both sides.
PremiseResult premise_rand_lbl(nat n, nat shift);
/// unif(N) x unif(M) vs unif((N+1)(M+1)-1) under (n, m) -> n(M+1) + m.
PremiseResult premise_two_rands_rand(nat n, nat m);
/// The converse direction of the above.
PremiseResult premise_rand_two_rands(nat n, nat m);
/// unif(N) vs the fragmented right side: Some k with weight 1/(N+1) for
/// k <= M and "not stepped" with weight (N-M)/(N+1).
PremiseResult premise_fragmented(nat n, nat m);
/// E_{unif(N)}[[k = 0]] <= 1/(N+1).
PremiseResult premise_rand_exp(nat n);

std::vector<PremiseResult> all_rule_premises();

// ---------------------------------------------------------------------------
// JSON-facing query over canonical value strings.

struct StringQuery {
  Dist<std::string> mu1;
  Dist<std::string> mu2;
  std::set<std::pair<std::string, std::string>> rel;
  Rat eps;
};

/// Parses {"mu1": [{"value", "p"}...], "mu2": [...], "rel": [[a, b]...], "eps": "n/d"}.
/// Throws std::invalid_argument on malformed input.
StringQuery parse_coupling_query(const std::string& json_text);

}  // namespace fox
