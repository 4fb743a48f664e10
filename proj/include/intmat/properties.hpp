#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "intmat/count_record.hpp"
#include "intmat/integer.hpp"
#include "intmat/linalg.hpp"
#include "intmat/matrix.hpp"

namespace intmat {

inline bool is_singular(const IntMatrix& m) {
  if (m.size() == 2)
    return static_cast<Int128>(m(0, 0)) * m(1, 1) == static_cast<Int128>(m(0, 1)) * m(1, 0);
  return det(m) == 0;
}

inline bool has_integer_eigenvalue(const IntMatrix& m) {
  if (m.size() == 2) {
    // trace is an integer, so one integer root forces the other
    const BigInt disc = discriminant_2x2(m);
    if (disc < 0) return false;
    const BigInt s = boost::multiprecision::sqrt(disc);
    return s * s == disc;
  }
  return !integer_eigenvalues(m).empty();
}

using MatrixPredicate = std::function<bool(const IntMatrix&)>;

/// Predicate deciding membership for a property tag. real_eig is only
/// defined for n = 2; custom tags have no predicate.
inline MatrixPredicate predicate_for(const PropertyTag& tag) {
  switch (tag.kind) {
    case Property::singular: return is_singular;
    case Property::integer_eig: return has_integer_eigenvalue;
    case Property::real_eig:
      return [](const IntMatrix& m) {
        if (m.size() != 2) throw std::invalid_argument("real-eig is defined for n = 2 only");
        return has_real_eigenvalues_2x2(m);
      };
    case Property::lambda_eig: {
      const std::int64_t lambda = tag.lambda;
      return [lambda](const IntMatrix& m) { return has_eigenvalue(m, lambda); };
    }
    case Property::custom:
      if (tag.label == "always") return [](const IntMatrix&) { return true; };
      break;
  }
  throw std::invalid_argument("no predicate for property '" + tag.name() + "'");
}

}  // namespace intmat
