#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace qcover {

/// Exact arbitrary-precision rational, always kept in canonical form.
using Rational = mpq_class;

/// Token count of a discrete marking / arc weight.
using Natural = std::uint64_t;

static_assert(sizeof(unsigned long) == sizeof(Natural), "LP64 platform expected");

inline Rational to_rational(Natural n) { return Rational(static_cast<unsigned long>(n)); }
inline Rational to_rational(std::int64_t n) { return Rational(static_cast<long>(n)); }

/// Parses "a", "-a" or "a/b"; throws std::invalid_argument otherwise.
Rational parse_rational(std::string_view text);

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Value of the form standard + infinitesimal * delta for a symbolic delta > 0.
/// Comparisons are lexicographic.
struct DeltaRational {
  Rational standard;
  Rational infinitesimal;

  DeltaRational() = default;
  DeltaRational(Rational s, Rational d = 0)
      : standard(std::move(s)), infinitesimal(std::move(d)) {}

  DeltaRational& operator+=(const DeltaRational& o) {
    standard += o.standard;
    infinitesimal += o.infinitesimal;
    return *this;
  }
  DeltaRational& operator-=(const DeltaRational& o) {
    standard -= o.standard;
    infinitesimal -= o.infinitesimal;
    return *this;
  }
  friend DeltaRational operator+(DeltaRational a, const DeltaRational& b) { return a += b; }
  friend DeltaRational operator-(DeltaRational a, const DeltaRational& b) { return a -= b; }
  friend DeltaRational operator*(const Rational& k, const DeltaRational& a) {
    return {k * a.standard, k * a.infinitesimal};
  }
  friend DeltaRational operator-(const DeltaRational& a) { return {-a.standard, -a.infinitesimal}; }

  friend bool operator==(const DeltaRational& a, const DeltaRational& b) {
    return a.standard == b.standard && a.infinitesimal == b.infinitesimal;
  }
  friend bool operator<(const DeltaRational& a, const DeltaRational& b) {
    if (a.standard != b.standard) return a.standard < b.standard;
    return a.infinitesimal < b.infinitesimal;
  }
  friend bool operator>(const DeltaRational& a, const DeltaRational& b) { return b < a; }
  friend bool operator<=(const DeltaRational& a, const DeltaRational& b) { return !(b < a); }
  friend bool operator>=(const DeltaRational& a, const DeltaRational& b) { return !(a < b); }

  /// Real value for a concrete choice of delta.
  Rational at(const Rational& delta) const { return standard + infinitesimal * delta; }
};

}  // namespace qcover
