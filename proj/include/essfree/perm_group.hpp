#pragma once

// Permutation groups on {0, ..., n-1} through a deterministic Schreier-Sims
// stabilizer chain. Permutations are image arrays; products read left to
// right, so (p * q)[v] = q[p[v]].

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace essfree {

using PointPerm = std::vector<std::uint32_t>;
using BigInt = boost::multiprecision::cpp_int;

inline PointPerm identity_perm(std::size_t n) {
  PointPerm p(n);
  std::iota(p.begin(), p.end(), std::uint32_t{0});
  return p;
}

inline bool is_identity_perm(const PointPerm& p) {
  for (std::size_t v = 0; v < p.size(); ++v)
    if (p[v] != v) return false;
  return true;
}

// p then q
inline PointPerm compose(const PointPerm& p, const PointPerm& q) {
  PointPerm r(p.size());
  for (std::size_t v = 0; v < p.size(); ++v) r[v] = q[p[v]];
  return r;
}

inline PointPerm invert(const PointPerm& p) {
  PointPerm r(p.size());
  for (std::size_t v = 0; v < p.size(); ++v) r[p[v]] = static_cast<std::uint32_t>(v);
  return r;
}

inline std::uint64_t perm_order(const PointPerm& p) {
  std::vector<char> seen(p.size(), 0);
  std::uint64_t order = 1;
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (seen[v]) continue;
    std::uint64_t len = 0;
    for (std::size_t u = v; !seen[u]; u = p[u]) {
      seen[u] = 1;
      ++len;
    }
    order = std::lcm(order, len);
  }
  return order;
}

class PermGroup {
 public:
  explicit PermGroup(std::size_t degree) : degree_(degree) {}

  PermGroup(std::size_t degree, const std::vector<PointPerm>& gens) : degree_(degree) {
    for (const auto& g : gens) add_generator(g);
  }

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<PointPerm>& generators() const noexcept { return gens_; }

  // Adds g to the group; returns false if it was already a member.
  bool add_generator(const PointPerm& g) {
    if (g.size() != degree_) throw std::invalid_argument("permutation degree mismatch");
    if (contains(g)) return false;
    gens_.push_back(g);
    extend(0, g);
    return true;
  }

  bool contains(const PointPerm& g) const { return is_identity_perm(sift(g, 0)); }

  BigInt order() const {
    BigInt o = 1;
    for (const auto& level : levels_) o *= level.orbit.size();
    return o;
  }

 private:
  struct Level {
    std::uint32_t base;
    std::vector<PointPerm> gens;
    std::vector<std::uint32_t> orbit;
    std::vector<PointPerm> transversal;  // transversal[b] maps base to b; empty if b is not in the orbit
  };

  void rebuild_orbit(Level& level) const {
    level.transversal.assign(degree_, {});
    level.orbit.assign(1, level.base);
    level.transversal[level.base] = identity_perm(degree_);
    for (std::size_t i = 0; i < level.orbit.size(); ++i) {
      const std::uint32_t b = level.orbit[i];
      for (const auto& s : level.gens) {
        const std::uint32_t c = s[b];
        if (level.transversal[c].empty()) {
          level.transversal[c] = compose(level.transversal[b], s);
          level.orbit.push_back(c);
        }
      }
    }
  }

  PointPerm sift(PointPerm g, std::size_t from) const {
    for (std::size_t i = from; i < levels_.size(); ++i) {
      const Level& level = levels_[i];
      const std::uint32_t b = g[level.base];
      if (level.transversal[b].empty()) return g;
      g = compose(g, invert(level.transversal[b]));
    }
    return g;
  }

  // g belongs to the group at level i but not to the current chain there.
  void extend(std::size_t i, const PointPerm& g) {
    if (i == levels_.size()) {
      std::uint32_t moved = 0;
      while (g[moved] == moved) ++moved;
      levels_.push_back({moved, {}, {}, {}});
    }
    levels_[i].gens.push_back(g);
    rebuild_orbit(levels_[i]);
    bool changed = true;
    while (changed) {
      changed = false;
      const std::size_t orbit_size = levels_[i].orbit.size();
      const std::size_t gen_count = levels_[i].gens.size();
      for (std::size_t k = 0; k < orbit_size && !changed; ++k) {
        const std::uint32_t b = levels_[i].orbit[k];
        for (std::size_t j = 0; j < gen_count; ++j) {
          const PointPerm& s = levels_[i].gens[j];
          const PointPerm schreier =
              compose(compose(levels_[i].transversal[b], s), invert(levels_[i].transversal[s[b]]));
          const PointPerm residue = sift(schreier, i + 1);
          if (!is_identity_perm(residue)) {
            extend(i + 1, residue);
          }
        }
      }
      // Deeper levels never add generators here, so one pass suffices once the
      // orbit stopped growing.
      if (levels_[i].orbit.size() != orbit_size || levels_[i].gens.size() != gen_count) changed = true;
    }
  }

  std::size_t degree_;
  std::vector<PointPerm> gens_;
  std::vector<Level> levels_;
};

// Commutator p^-1 q^-1 p q with left-to-right products.
inline PointPerm perm_commutator(const PointPerm& p, const PointPerm& q) {
  return compose(compose(invert(p), invert(q)), compose(p, q));
}

// Normal closure of the commutators of the generators: the derived subgroup.
inline PermGroup derived_subgroup(std::size_t degree, const std::vector<PointPerm>& gens) {
  PermGroup d(degree);
  std::vector<PointPerm> queue;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      PointPerm c = perm_commutator(gens[i], gens[j]);
      if (d.add_generator(c)) queue.push_back(std::move(c));
    }
  while (!queue.empty()) {
    PointPerm x = std::move(queue.back());
    queue.pop_back();
    for (const auto& g : gens) {
      PointPerm y = compose(compose(invert(g), x), g);
      if (d.add_generator(y)) queue.push_back(std::move(y));
    }
  }
  return d;
}

}  // namespace essfree
