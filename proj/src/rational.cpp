#include "qcover/rational.hpp"

#include <stdexcept>
#include <string>

namespace qcover {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto valid = [](const std::string& x) {
    if (x.empty()) return false;
    std::size_t i = (x[0] == '-') ? 1 : 0;
    if (i == x.size()) return false;
    bool slash = false;
    bool digit_after = false;
    for (; i < x.size(); ++i) {
      if (x[i] == '/') {
        if (slash || !digit_after) return false;
        slash = true;
        digit_after = false;
      } else if (x[i] >= '0' && x[i] <= '9') {
        digit_after = true;
      } else {
        return false;
      }
    }
    return digit_after;
  };
  if (!valid(s)) throw std::invalid_argument("not a rational: " + s);
  Rational q(s, 10);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

}  // namespace qcover
