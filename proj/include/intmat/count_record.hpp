#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "intmat/integer.hpp"

namespace intmat {

using BigRational = boost::multiprecision::cpp_rational;

enum class Property { singular, integer_eig, real_eig, lambda_eig, custom };

struct PropertyTag {
  Property kind = Property::custom;
  std::int64_t lambda = 0;  // only meaningful for lambda_eig
  std::string label;        // only meaningful for custom

  static PropertyTag singular() { return {Property::singular, 0, {}}; }
  static PropertyTag integer_eig() { return {Property::integer_eig, 0, {}}; }
  static PropertyTag real_eig() { return {Property::real_eig, 0, {}}; }
  static PropertyTag lambda_eig(std::int64_t lambda) { return {Property::lambda_eig, lambda, {}}; }
  static PropertyTag custom(std::string label) { return {Property::custom, 0, std::move(label)}; }

  std::string name() const {
    switch (kind) {
      case Property::singular: return "singular";
      case Property::integer_eig: return "integer-eig";
      case Property::real_eig: return "real-eig";
      case Property::lambda_eig: return "lambda-eig";
      case Property::custom: return label;
    }
    return label;
  }

  friend bool operator==(const PropertyTag& a, const PropertyTag& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Property::lambda_eig) return a.lambda == b.lambda;
    if (a.kind == Property::custom) return a.label == b.label;
    return true;
  }
};

/// Exact number of matrices in M_n(k) with a property.
struct CountRecord {
  PropertyTag property;
  int n = 0;
  std::int64_t k = 0;
  BigInt count;
  BigInt total;            // (2k+1)^(n^2)
  BigRational probability_exact;
  double probability = 0.0;
};

inline CountRecord make_count_record(PropertyTag property, int n, std::int64_t k, BigInt count) {
  if (n < 1 || k < 1) throw std::invalid_argument("count record needs n >= 1 and k >= 1");
  BigInt total = alphabet_power(k, static_cast<unsigned>(n * n));
  if (count < 0 || count > total) throw std::logic_error("count outside [0, total]");
  BigRational p(count, total);
  const double approx = p.convert_to<double>();
  return {std::move(property), n, k, std::move(count), std::move(total), std::move(p), approx};
}

}  // namespace intmat
