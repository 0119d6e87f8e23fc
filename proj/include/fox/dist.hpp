#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include "fox/rat.hpp"

namespace fox {

using nat = std::uint64_t;

/// Finite-support subdistribution with exact weights.
///
/// Keys are held in a std::map, so iteration order is the canonical total
/// order of T and two distributions are equal iff their entry maps are.
/// Zero weights are never stored.
template <class T>
class Dist {
 public:
  using Map = std::map<T, Rat>;

  Dist() = default;

  /// Builds from explicit entries; rejects negative weights and mass > 1.
  static Dist from_entries(std::initializer_list<std::pair<T, Rat>> entries) {
    Dist d;
    for (const auto& [k, w] : entries) {
      if (w < 0) throw std::invalid_argument("negative weight");
      d.add(k, w);
    }
    if (d.mass() > 1) throw std::invalid_argument("mass exceeds 1");
    return d;
  }

  void add(const T& key, const Rat& weight) {
    if (weight == 0) return;
    auto [it, inserted] = entries_.try_emplace(key, weight);
    if (!inserted) {
      it->second += weight;
      if (it->second == 0) entries_.erase(it);
    }
  }

  void add(T&& key, const Rat& weight) {
    if (weight == 0) return;
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      entries_.emplace(std::move(key), weight);
    } else {
      it->second += weight;
      if (it->second == 0) entries_.erase(it);
    }
  }

  /// Adds every entry of `other` scaled by `factor`.
  void add_scaled(const Dist& other, const Rat& factor) {
    for (const auto& [k, w] : other.entries_) add(k, w * factor);
  }

  [[nodiscard]] const Map& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  [[nodiscard]] Rat operator()(const T& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? Rat(0) : it->second;
  }

  [[nodiscard]] Rat mass() const {
    Rat m = 0;
    for (const auto& [k, w] : entries_) m += w;
    return m;
  }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const Dist& a, const Dist& b) { return a.entries_ == b.entries_; }

 private:
  Map entries_;
};

template <class T>
Dist<T> dret(T value) {
  Dist<T> d;
  d.add(std::move(value), Rat(1));
  return d;
}

template <class T>
Dist<T> dzero() {
  return Dist<T>{};
}

/// Uniform over {0, ..., n}.
inline Dist<nat> dunif(nat n) {
  Dist<nat> d;
  Rat w(mpz_class(1), mpz_class(static_cast<unsigned long>(n) + 1));
  w.canonicalize();
  for (nat i = 0; i <= n; ++i) d.add(i, w);
  return d;
}

template <class T>
Rat mass(const Dist<T>& mu) {
  return mu.mass();
}

template <class F, class T>
using bind_result_t = std::invoke_result_t<F, const T&>;

/// bind(f, mu)(b) = sum_a mu(a) * f(a)(b)
template <class T, class F>
auto dbind(F&& f, const Dist<T>& mu) -> bind_result_t<F, T> {
  bind_result_t<F, T> out;
  for (const auto& [a, w] : mu) out.add_scaled(std::invoke(f, a), w);
  return out;
}

template <class T, class F>
auto dmap(F&& f, const Dist<T>& mu) -> Dist<std::decay_t<std::invoke_result_t<F, const T&>>> {
  Dist<std::decay_t<std::invoke_result_t<F, const T&>>> out;
  for (const auto& [a, w] : mu) out.add(std::invoke(f, a), w);
  return out;
}

/// E_mu[x] for a [0,1]-valued random variable. A value outside [0,1] on the
/// support is a contract violation and throws std::domain_error.
template <class T, class F>
Rat expect(const Dist<T>& mu, F&& x) {
  Rat total = 0;
  for (const auto& [a, w] : mu) {
    Rat v = std::invoke(x, a);
    if (!in_unit_interval(v)) throw std::domain_error("random variable outside [0,1]");
    total += w * v;
  }
  return total;
}

/// Weighted sum without the [0,1] restriction (error-credit bookkeeping).
template <class T, class F>
Rat weighted_sum(const Dist<T>& mu, F&& x) {
  Rat total = 0;
  for (const auto& [a, w] : mu) total += w * Rat(std::invoke(x, a));
  return total;
}

template <class A, class B>
Dist<std::pair<A, B>> dproduct(const Dist<A>& mu, const Dist<B>& nu) {
  Dist<std::pair<A, B>> out;
  for (const auto& [a, wa] : mu)
    for (const auto& [b, wb] : nu) out.add(std::pair<A, B>(a, b), wa * wb);
  return out;
}

}  // namespace fox
