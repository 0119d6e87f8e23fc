#include "fox/coupling.hpp"

#include "json.hpp"

#include <limits>

namespace fox {

Rat simplex_max(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                const std::vector<Rat>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  // tableau rows: constraints with slacks; last row: -c (reduced costs)
  std::vector<std::vector<Rat>> t(m + 1, std::vector<Rat>(n + m + 1, Rat(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) throw std::invalid_argument("simplex_max: negative right-hand side");
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1;
    t[i][n + m] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  for (;;) {
    // Bland: lowest-index column with negative reduced cost
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (t[m][j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == n + m) break;
    std::size_t leave = m;
    Rat best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > 0) {
        Rat ratio = t[i][n + m] / t[i][enter];
        if (leave == m || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == m) throw std::domain_error("simplex_max: unbounded");
    Rat piv = t[leave][enter];
    for (auto& x : t[leave]) x /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rat factor = t[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }
  return t[m][n + m];
}

Rat lp_min_eps(const IndexedQuery& q) {
  const std::size_t n1 = q.w1.size();
  const std::size_t n2 = q.w2.size();
  const std::size_t vars = n1 + n2;
  std::vector<std::vector<Rat>> a;
  std::vector<Rat> b;
  for (const auto& [i, j] : q.rel) {
    std::vector<Rat> row(vars, Rat(0));
    row[i] = 1;
    row[n1 + j] = -1;
    a.push_back(std::move(row));
    b.emplace_back(0);
  }
  for (std::size_t v = 0; v < vars; ++v) {
    std::vector<Rat> row(vars, Rat(0));
    row[v] = 1;
    a.push_back(std::move(row));
    b.emplace_back(1);
  }
  std::vector<Rat> c(vars);
  for (std::size_t i = 0; i < n1; ++i) c[i] = q.w1[i];
  for (std::size_t j = 0; j < n2; ++j) c[n1 + j] = -q.w2[j];
  return simplex_max(a, b, c);
}

Rat subset_min_eps(const IndexedQuery& q) {
  const std::size_t n1 = q.w1.size();
  if (n1 > 20) throw std::length_error("subset oracle: support larger than 20");
  std::vector<std::uint64_t> image(n1, 0);
  std::vector<std::vector<std::size_t>> targets(n1);
  for (const auto& [i, j] : q.rel) targets[i].push_back(j);
  Rat best = 0;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << n1); ++u) {
    Rat gain = 0;
    std::vector<bool> hit(q.w2.size(), false);
    for (std::size_t i = 0; i < n1; ++i) {
      if (!(u >> i & 1U)) continue;
      gain += q.w1[i];
      for (std::size_t j : targets[i]) hit[j] = true;
    }
    for (std::size_t j = 0; j < q.w2.size(); ++j)
      if (hit[j]) gain -= q.w2[j];
    if (gain > best) best = gain;
  }
  return best;
}

std::string to_string(ComposeOutcome c) {
  switch (c) {
    case ComposeOutcome::Holds: return "holds";
    case ComposeOutcome::PremiseFailed: return "premise-failed";
    case ComposeOutcome::ConclusionFailed: return "conclusion-failed";
  }
  return "?";
}

Rat error_amp_identity(nat n, nat m, const Rat& eps) {
  if (m >= n) throw std::invalid_argument("error_amp_identity: requires M < N");
  Rat k(mpz_class(static_cast<unsigned long>(n + 1)), mpz_class(static_cast<unsigned long>(n - m)));
  k.canonicalize();
  return weighted_sum(dunif(n), [&](nat x) { return x <= m ? Rat(0) : Rat(k * eps); });
}

namespace {

PremiseResult finish(std::string rule, Rat eps) {
  bool ok = eps == 0;
  return {std::move(rule), std::move(eps), ok};
}

}  // namespace

PremiseResult premise_ht_couple(nat n, nat shift) {
  std::set<std::pair<nat, nat>> rel;
  for (nat k = 0; k <= n; ++k) rel.emplace(k, (k + shift) % (n + 1));
  return finish("ht-couple", arcoupl_min_eps(dunif(n), dunif(n), rel));
}

PremiseResult premise_rand_lbl(nat n, nat shift) {
  std::set<std::pair<nat, nat>> rel;
  for (nat k = 0; k <= n; ++k) rel.emplace(k, (n + 1 + k - shift % (n + 1)) % (n + 1));
  return finish("ht-couple-rand-lbl", arcoupl_min_eps(dunif(n), dunif(n), rel));
}

PremiseResult premise_two_rands_rand(nat n, nat m) {
  auto prod = dproduct(dunif(n), dunif(m));
  std::set<std::pair<std::pair<nat, nat>, nat>> rel;
  for (nat a = 0; a <= n; ++a)
    for (nat b = 0; b <= m; ++b) rel.emplace(std::pair<nat, nat>(a, b), a * (m + 1) + b);
  return finish("pupd-couple-two-rands-rand",
                arcoupl_min_eps(prod, dunif((n + 1) * (m + 1) - 1), rel));
}

PremiseResult premise_rand_two_rands(nat n, nat m) {
  auto prod = dproduct(dunif(n), dunif(m));
  std::set<std::pair<nat, std::pair<nat, nat>>> rel;
  for (nat a = 0; a <= n; ++a)
    for (nat b = 0; b <= m; ++b) rel.emplace(a * (m + 1) + b, std::pair<nat, nat>(a, b));
  return finish("ht-couple-rand-two-rands",
                arcoupl_min_eps(dunif((n + 1) * (m + 1) - 1), prod, rel));
}

PremiseResult premise_fragmented(nat n, nat m) {
  // right side over Option<nat>: nullopt marks "not stepped"
  Dist<std::optional<nat>> right;
  Rat each(mpz_class(1), mpz_class(static_cast<unsigned long>(n + 1)));
  each.canonicalize();
  for (nat k = 0; k <= m; ++k) right.add(std::optional<nat>(k), each);
  Rat rest(mpz_class(static_cast<unsigned long>(n - m)), mpz_class(static_cast<unsigned long>(n + 1)));
  rest.canonicalize();
  right.add(std::nullopt, rest);
  std::set<std::pair<nat, std::optional<nat>>> rel;
  for (nat k = 0; k <= n; ++k) rel.emplace(k, k <= m ? std::optional<nat>(k) : std::nullopt);
  return finish("ht-couple-fragmented", arcoupl_min_eps(dunif(n), right, rel));
}

PremiseResult premise_rand_exp(nat n) {
  Rat eps(mpz_class(1), mpz_class(static_cast<unsigned long>(n + 1)));
  eps.canonicalize();
  Rat e = expect(dunif(n), [](nat k) { return k == 0 ? Rat(1) : Rat(0); });
  // reported as the excess over the budget (0 when within it)
  Rat excess = e > eps ? Rat(e - eps) : Rat(0);
  return finish("pupd-rand-exp", excess);
}

std::vector<PremiseResult> all_rule_premises() {
  std::vector<PremiseResult> out;
  for (nat n : {1, 3, 7}) {
    for (nat s = 0; s <= n; ++s) {
      out.push_back(premise_ht_couple(n, s));
      out.push_back(premise_rand_lbl(n, s));
    }
    out.push_back(premise_rand_exp(n));
  }
  for (auto [n, m] : {std::pair<nat, nat>{1, 1}, {3, 1}, {7, 31}, {2, 4}}) {
    out.push_back(premise_two_rands_rand(n, m));
    out.push_back(premise_rand_two_rands(n, m));
  }
  for (auto [n, m] : {std::pair<nat, nat>{3, 1}, {7, 2}, {5, 0}, {31, 7}})
    out.push_back(premise_fragmented(n, m));
  return out;
}

StringQuery parse_coupling_query(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("coupling query: ") + e.what());
  }
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw std::invalid_argument(std::string("coupling query: missing ") + key);
    return j.at(key);
  };
  auto dist = [](const nlohmann::json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("coupling query: distribution must be an array");
    Dist<std::string> d;
    for (const auto& e : arr) {
      Rat p = parse_rat(e.at("p").get<std::string>());
      if (p < 0) throw std::invalid_argument("coupling query: negative weight");
      d.add(e.at("value").get<std::string>(), p);
    }
    if (d.mass() > 1) throw std::invalid_argument("coupling query: mass exceeds 1");
    return d;
  };
  StringQuery q;
  q.mu1 = dist(need("mu1"));
  q.mu2 = dist(need("mu2"));
  for (const auto& pr : need("rel")) q.rel.emplace(pr.at(0).get<std::string>(), pr.at(1).get<std::string>());
  q.eps = parse_rat(need("eps").get<std::string>());
  if (!in_unit_interval(q.eps)) throw std::invalid_argument("coupling query: eps outside [0,1]");
  return q;
}

}  // namespace fox
