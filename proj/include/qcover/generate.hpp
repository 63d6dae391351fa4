#pragma once

#include <cstddef>
#include <cstdint>

#include "qcover/instance.hpp"

namespace qcover {

struct GenParams {
  std::size_t places = 3;
  std::size_t transitions = 4;
  Natural max_weight = 2;       // Pre/Post entries lie in [0, max_weight]
  Natural max_initial = 3;      // initial marking entries
  Natural max_target = 3;       // target entries, at least one of them positive
  unsigned density_percent = 30;
  /// Share of consumed places that are also given back (Pre = Post), i.e.
  /// guards that only test for tokens.
  unsigned read_percent = 0;
  /// When positive, p0 becomes a guard: it holds one token, no transition
  /// changes it, and this share of transitions tests p0 >= 2. Those
  /// transitions are dead in discrete runs but fire in continuous ones.
  unsigned guarded_percent = 0;
  std::uint64_t seed = 0;
};

/// Seeded random instance. Every transition consumes from at least one
/// place. The same parameters always give the same instance, independent of
/// the standard library in use.
Instance generate(const GenParams& params);

}  // namespace qcover
