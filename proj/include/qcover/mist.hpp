#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qcover/instance.hpp"

namespace qcover {

enum class Format { mist, json };

/// Located input error. Lines and columns count from 1.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// MIST subset:
///
///   vars    p0 p1
///   rules   p0 >= 2 -> p0' = p0 - 1, p1' = p1 + 1;
///   init    p0 = 1, p1 = 0
///   target  p1 >= 1
///
/// `rules` may be omitted. Each target line is one disjunct. Transitions are
/// named t1..tn in order. `#` starts a comment. Interval initial conditions
/// and `invariants` sections are rejected.
///
/// JSON: {name, places, transitions: [{name, pre, post}], init, targets}
/// where pre, post, init and each target map place names to naturals.
///
/// The MIST text carries no instance name; `name` is used instead.
Instance parse(std::string_view text, Format format, std::string name = {});

/// parse(serialize(x), f) == x, except that MIST drops the instance name and
/// renames transitions to t1..tn. Throws std::invalid_argument for MIST
/// output when a place name is not a MIST identifier.
std::string serialize(const Instance& inst, Format format);

/// Format by extension: .json is JSON, anything else MIST.
Format format_for(const std::filesystem::path& path);

/// Reads and parses a file. The default name is the file stem.
Instance load_instance(const std::filesystem::path& path,
                       std::optional<Format> format = std::nullopt);

}  // namespace qcover
