#pragma once

#include <cctype>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "edas/group.hpp"

// Math-domain error equivalence function: extract the final boxed answer
// and normalize it so that numerically equivalent answers map to identical
// labels.
//
// Normalization rules, in order:
//   1. unwrap simple LaTeX wrappers: surrounding $...$, \text{...},
//      redundant outer braces, and a whole-string \frac{a}{b} / \dfrac{a}{b}
//      (rewritten to a/b);
//   2. integers, fractions a/b, and finite decimals are reduced to an exact
//      rational canonical form ("9", "1/2", "-3/4"); comparison is exact
//      rational equality, never floating tolerance;
//   3. anything else (radicals, symbolic expressions) falls back to the
//      whitespace-stripped string, used verbatim.
//
// A trajectory without any \boxed{} answer gets the reserved NO_ANSWER
// label and forms its own equivalence class.

namespace edas {

inline constexpr std::string_view kNoAnswerLabel = "NO_ANSWER";

namespace detail {

// Index just past the brace that matches text[open] (which must be '{'),
// or npos if unbalanced.
inline std::size_t matching_brace_end(std::string_view text,
                                      std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    else if (text[i] == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0
};

// Parses a plain signed decimal ("12", "-0.5", ".25", "3.") into an exact
// rational. Returns nullopt on any non-numeric content or int64 overflow.
inline std::optional<Rational> parse_decimal(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::int64_t sign = 1;
  if (s.front() == '+' || s.front() == '-') {
    if (s.front() == '-') sign = -1;
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;

  std::int64_t value = 0;
  std::int64_t den = 1;
  bool seen_digit = false;
  bool seen_dot = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    if (__builtin_mul_overflow(value, std::int64_t{10}, &value) ||
        __builtin_add_overflow(value, std::int64_t{c - '0'}, &value)) {
      return std::nullopt;
    }
    if (seen_dot && __builtin_mul_overflow(den, std::int64_t{10}, &den)) {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  return Rational{sign * value, den};
}

inline Rational reduce(Rational r) {
  if (r.num == 0) return {0, 1};
  const std::uint64_t g =
      std::gcd(static_cast<std::uint64_t>(r.num < 0 ? -r.num : r.num),
               static_cast<std::uint64_t>(r.den));
  r.num /= static_cast<std::int64_t>(g);
  r.den /= static_cast<std::int64_t>(g);
  return r;
}

// "a/b" with decimal-rational sides, or a plain decimal.
inline std::optional<Rational> parse_rational(std::string_view s) {
  s = trim(s);
  const std::size_t slash = s.find('/');
  if (slash == std::string_view::npos) {
    auto r = parse_decimal(s);
    if (!r) return std::nullopt;
    return reduce(*r);
  }
  if (s.find('/', slash + 1) != std::string_view::npos) return std::nullopt;
  auto a = parse_decimal(s.substr(0, slash));
  auto b = parse_decimal(s.substr(slash + 1));
  if (!a || !b || b->num == 0) return std::nullopt;
  // (a.num/a.den) / (b.num/b.den) = (a.num*b.den) / (a.den*b.num)
  Rational r;
  if (__builtin_mul_overflow(a->num, b->den, &r.num) ||
      __builtin_mul_overflow(a->den, b->num, &r.den)) {
    return std::nullopt;
  }
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  return reduce(r);
}

inline std::string strip_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

// One pass of wrapper unwrapping; returns true if anything was removed.
inline bool unwrap_once(std::string_view& s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
    s = s.substr(1, s.size() - 2);
    return true;
  }
  constexpr std::string_view kText = "\\text{";
  if (s.size() > kText.size() && s.substr(0, kText.size()) == kText &&
      matching_brace_end(s, kText.size() - 1) == s.size()) {
    s = s.substr(kText.size(), s.size() - kText.size() - 1);
    return true;
  }
  if (s.size() >= 2 && s.front() == '{' &&
      matching_brace_end(s, 0) == s.size()) {
    s = s.substr(1, s.size() - 2);
    return true;
  }
  return false;
}

// Whole-string \frac{A}{B} or \dfrac{A}{B} rewritten as "A/B".
inline std::optional<std::string> rewrite_frac(std::string_view s) {
  for (std::string_view head : {"\\frac{", "\\dfrac{"}) {
    if (s.size() <= head.size() || s.substr(0, head.size()) != head) continue;
    const std::size_t num_open = head.size() - 1;
    const std::size_t num_end = matching_brace_end(s, num_open);
    if (num_end == std::string_view::npos || num_end >= s.size() ||
        s[num_end] != '{') {
      continue;
    }
    const std::size_t den_end = matching_brace_end(s, num_end);
    if (den_end != s.size()) continue;
    std::string_view num = s.substr(num_open + 1, num_end - num_open - 2);
    std::string_view den = s.substr(num_end + 1, den_end - num_end - 2);
    return strip_whitespace(num) + "/" + strip_whitespace(den);
  }
  return std::nullopt;
}

}  // namespace detail

// Payload of the last balanced \boxed{...} in the text, if any.
inline std::optional<std::string> extract_last_boxed(std::string_view text) {
  constexpr std::string_view kBoxed = "\\boxed{";
  std::optional<std::string> found;
  std::size_t pos = 0;
  while ((pos = text.find(kBoxed, pos)) != std::string_view::npos) {
    const std::size_t open = pos + kBoxed.size() - 1;
    const std::size_t end = detail::matching_brace_end(text, open);
    if (end != std::string_view::npos) {
      found = std::string(text.substr(open + 1, end - open - 2));
    }
    pos += kBoxed.size();
  }
  return found;
}

// Normalizes an already-extracted answer string. Total and idempotent:
// canonicalizing a canonical label yields it unchanged.
inline ErrorLabel canonicalize_answer(std::string_view answer) {
  std::string_view s = answer;
  while (detail::unwrap_once(s)) {
  }
  std::string rewritten;
  if (auto frac = detail::rewrite_frac(s)) {
    rewritten = std::move(*frac);
    s = rewritten;
  }
  if (auto r = detail::parse_rational(s)) {
    std::string label = std::to_string(r->num);
    if (r->den != 1) label += "/" + std::to_string(r->den);
    return ErrorLabel(std::move(label));
  }
  std::string fallback = detail::strip_whitespace(s);
  if (fallback.empty()) return ErrorLabel(std::string(kNoAnswerLabel));
  return ErrorLabel(std::move(fallback));
}

// Full math-domain equivalence function over raw trajectory text.
inline ErrorLabel canonicalize_math_answer(std::string_view raw_text) {
  const auto boxed = extract_last_boxed(raw_text);
  if (!boxed) return ErrorLabel(std::string(kNoAnswerLabel));
  return canonicalize_answer(*boxed);
}

}  // namespace edas
