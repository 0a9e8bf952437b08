#include "subsel/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace subsel {

namespace {

bool allDigits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer pow10(unsigned exponent) {
  Integer result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= 10;
  return result;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void malformed(std::string_view text) {
  throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
}

}  // namespace

Rational parseRational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) malformed(original);

  Rational value;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = text.substr(0, slash);
    const auto den = text.substr(slash + 1);
    if (!allDigits(num) || !allDigits(den)) malformed(original);
    const Integer d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(original) + "'");
    value = Rational(Integer{std::string(num)}, d);
  } else {
    std::string_view mantissa = text;
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = text.substr(0, e);
      auto expText = text.substr(e + 1);
      bool expNegative = false;
      if (!expText.empty() && (expText.front() == '-' || expText.front() == '+')) {
        expNegative = expText.front() == '-';
        expText.remove_prefix(1);
      }
      if (!allDigits(expText) || expText.size() > 6) malformed(original);
      exponent = std::stol(std::string(expText));
      if (expNegative) exponent = -exponent;
    }
    std::string digits;
    const auto dot = mantissa.find('.');
    if (dot == std::string_view::npos) {
      if (!allDigits(mantissa)) malformed(original);
      digits = std::string(mantissa);
    } else {
      const auto whole = mantissa.substr(0, dot);
      const auto frac = mantissa.substr(dot + 1);
      if ((whole.empty() && frac.empty()) || (!whole.empty() && !allDigits(whole)) ||
          (!frac.empty() && !allDigits(frac)))
        malformed(original);
      digits = std::string(whole) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    }
    Integer num(digits);
    if (exponent >= 0)
      value = Rational(num * pow10(static_cast<unsigned>(exponent)));
    else
      value = Rational(num, pow10(static_cast<unsigned>(-exponent)));
  }
  return negative ? Rational(-value) : value;
}

std::string toString(const Rational& value) { return value.str(); }

std::string toDecimal(const Rational& value, int digits) {
  const Integer scale = pow10(static_cast<unsigned>(digits));
  const Rational scaled = abs(value) * scale;
  // round half up on the magnitude
  Integer rounded = floorOf(scaled + Rational(1, 2));
  std::string s = rounded.str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (value.sign() < 0 && s != "0") s.insert(0, "-");
  return s;
}

// mpq_get_d truncates; that is plenty for the floating-point hints it feeds.
double toDouble(const Rational& value) { return mpq_get_d(value.backend().data()); }

Integer floorOf(const Rational& value) {
  Integer q = numerator(value) / denominator(value);  // truncates toward zero
  if (value.sign() < 0 && Rational(q) != value) q -= 1;
  return q;
}

Integer ceilOf(const Rational& value) {
  Integer f = floorOf(value);
  return Rational(f) == value ? f : Integer(f + 1);
}

Rational simplestBetween(const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw std::invalid_argument("simplestBetween requires lo < hi");
  if (lo.sign() < 0 && hi.sign() > 0) return Rational(0);
  if (hi.sign() <= 0) return -simplestBetween(-hi, -lo);

  const Integer base = floorOf(lo);
  const Rational next(base + 1);
  if (next < hi) return next;
  // (lo, hi) lies inside [base, base + 1]; recurse on reciprocals of the
  // fractional parts.
  const Rational loFrac = lo - Rational(base);
  const Rational hiFrac = hi - Rational(base);
  const Rational yLo = 1 / hiFrac;
  if (loFrac.sign() == 0) return Rational(base) + 1 / Rational(floorOf(yLo) + 1);
  return Rational(base) + 1 / simplestBetween(yLo, 1 / loFrac);
}

}  // namespace subsel
