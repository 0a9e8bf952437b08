#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Core>

#include <string>
#include <string_view>

namespace subsel {

// Expression templates are disabled so the number types compose cleanly with
// Eigen's own expression machinery.
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RatMatrix = Matrix<Rational>;
using RatVector = Vector<Rational>;
using Index = Eigen::Index;

/// Parses "p", "p/q", or a decimal literal such as "-0.125" or "1e-3" into a
/// canonical rational. Decimal literals are read as exact decimal fractions.
/// Throws std::invalid_argument on malformed text or a zero denominator.
Rational parseRational(std::string_view text);

/// Canonical "p/q" text, or "p" for integers.
std::string toString(const Rational& value);

/// Rounded decimal rendering with `digits` fractional digits (report output).
std::string toDecimal(const Rational& value, int digits = 12);

double toDouble(const Rational& value);

inline int signOf(const Rational& value) { return value.sign(); }

/// Simplest rational (smallest denominator, then smallest magnitude) strictly
/// inside the open interval (lo, hi). Requires lo < hi.
Rational simplestBetween(const Rational& lo, const Rational& hi);

Integer floorOf(const Rational& value);
Integer ceilOf(const Rational& value);

}  // namespace subsel
