#pragma once

// Freely reduced words over a finite set of generators and their inverses.
// The same type serves as a free-group element and as a word denoting a tree
// automorphism once interpreted in a self-similar group.

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace essfree {

// Generator index in the high bits, inversion flag in bit 0.
using Letter = std::uint32_t;

constexpr Letter make_letter(std::size_t gen, bool inverted = false) noexcept {
  return static_cast<Letter>((gen << 1) | (inverted ? 1u : 0u));
}
constexpr std::size_t generator_of(Letter l) noexcept { return l >> 1; }
constexpr bool is_inverted(Letter l) noexcept { return (l & 1u) != 0; }
constexpr Letter inverse_letter(Letter l) noexcept { return l ^ 1u; }

// Shortlex rank of a letter among 2n letters: all generators first, then all
// inverses (a < b < c < a^-1 < b^-1 < c^-1).
constexpr std::size_t letter_rank(Letter l, std::size_t generator_count) noexcept {
  return generator_of(l) + (is_inverted(l) ? generator_count : 0);
}

class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : letters_(letters) { reduce(); }
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) { reduce(); }

  static Word generator(std::size_t gen, int exponent = 1) {
    Word w;
    const Letter l = make_letter(gen, exponent < 0);
    for (int k = 0; k < std::abs(exponent); ++k) w.letters_.push_back(l);
    return w;
  }

  const std::vector<Letter>& letters() const noexcept { return letters_; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  auto begin() const noexcept { return letters_.begin(); }
  auto end() const noexcept { return letters_.end(); }

  // Appends one letter, cancelling against the tail.
  void push_back(Letter l) {
    if (!letters_.empty() && letters_.back() == inverse_letter(l))
      letters_.pop_back();
    else
      letters_.push_back(l);
  }

  Word& operator*=(const Word& rhs) {
    for (Letter l : rhs.letters_) push_back(l);
    return *this;
  }
  friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

  Word inverse() const {
    Word w;
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it)
      w.letters_.push_back(inverse_letter(*it));
    return w;
  }

  Word pow(long long k) const {
    if (k < 0) return inverse().pow(-k);
    Word result;
    for (long long i = 0; i < k; ++i) result *= *this;
    return result;
  }

  // h^-1 * this * h
  Word conjugate(const Word& h) const { return h.inverse() * *this * h; }

  Word cyclically_reduced() const {
    std::size_t lo = 0;
    std::size_t hi = letters_.size();
    while (hi - lo >= 2 && letters_[lo] == inverse_letter(letters_[hi - 1])) {
      ++lo;
      --hi;
    }
    Word w;
    w.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(lo),
                      letters_.begin() + static_cast<std::ptrdiff_t>(hi));
    return w;
  }

  // Least rotation of the cyclic reduction; a canonical conjugacy-class
  // representative among cyclic permutations.
  Word cyclic_canonical() const {
    Word w = cyclically_reduced();
    const std::size_t n = w.size();
    if (n < 2) return w;
    std::vector<Letter> doubled(w.letters_);
    doubled.insert(doubled.end(), w.letters_.begin(), w.letters_.end());
    // Booth's least-rotation algorithm.
    std::vector<long> fail(2 * n, -1);
    std::size_t k = 0;
    for (std::size_t j = 1; j < 2 * n; ++j) {
      const Letter sj = doubled[j];
      long i = fail[j - k - 1];
      while (i != -1 && sj != doubled[k + static_cast<std::size_t>(i) + 1]) {
        if (sj < doubled[k + static_cast<std::size_t>(i) + 1]) k = j - static_cast<std::size_t>(i) - 1;
        i = fail[static_cast<std::size_t>(i)];
      }
      if (sj != doubled[k + static_cast<std::size_t>(i) + 1]) {
        if (sj < doubled[k]) k = j;
        fail[j - k] = -1;
      } else {
        fail[j - k] = i + 1;
      }
    }
    Word r;
    r.letters_.assign(doubled.begin() + static_cast<std::ptrdiff_t>(k),
                      doubled.begin() + static_cast<std::ptrdiff_t>(k + n));
    return r;
  }

  // Images of generators; gen i maps to images[i].
  Word substitute(const std::vector<Word>& images) const {
    Word r;
    for (Letter l : letters_) {
      const std::size_t g = generator_of(l);
      if (g >= images.size()) throw std::out_of_range("substitution misses a generator");
      r *= is_inverted(l) ? images[g].inverse() : images[g];
    }
    return r;
  }

  bool uses_only(const std::vector<bool>& allowed) const {
    return std::all_of(letters_.begin(), letters_.end(), [&](Letter l) {
      return generator_of(l) < allowed.size() && allowed[generator_of(l)];
    });
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) { return a.letters_ <=> b.letters_; }

 private:
  void reduce() {
    std::vector<Letter> out;
    out.reserve(letters_.size());
    for (Letter l : letters_) {
      if (!out.empty() && out.back() == inverse_letter(l))
        out.pop_back();
      else
        out.push_back(l);
    }
    letters_ = std::move(out);
  }

  std::vector<Letter> letters_;
};

inline Word commutator(const Word& g, const Word& h) { return g.inverse() * h.inverse() * g * h; }

// Shortlex order with the letter ranking a < b < c < a^-1 < b^-1 < c^-1.
inline bool shortlex_less(const Word& u, const Word& v, std::size_t generator_count) {
  if (u.size() != v.size()) return u.size() < v.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto ru = letter_rank(u[i], generator_count);
    const auto rv = letter_rank(v[i], generator_count);
    if (ru != rv) return ru < rv;
  }
  return false;
}

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Letter l : w) {
      h ^= l + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Prints a word as a*b^-1*c^2 using the given generator names; the empty
// word prints as 1.
inline std::string format_word(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const std::size_t run = j - i;
    if (!out.empty()) out += '*';
    const std::size_t g = generator_of(w[i]);
    out += g < names.size() ? names[g] : "g" + std::to_string(g);
    if (is_inverted(w[i]))
      out += "^-" + std::to_string(run);
    else if (run > 1)
      out += "^" + std::to_string(run);
    i = j;
  }
  return out;
}

}  // namespace essfree
