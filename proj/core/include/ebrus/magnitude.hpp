#pragma once

#include <compare>
#include <string>

namespace ebrus {

/// Non-negative real that may exceed the double range. The value is
/// x (level 0), exp(x) (level 1) or exp(exp(x)) (level 2, and so on).
/// Values are kept at the lowest level that can represent them.
class Magnitude {
 public:
  Magnitude() = default;
  Magnitude(double x) : x_(x) {}  // NOLINT: implicit on purpose
  static Magnitude tower(int level, double x);

  int level() const noexcept { return level_; }
  double x() const noexcept { return x_; }
  bool representable() const noexcept { return level_ == 0; }
  /// The value as a double, +inf when it does not fit.
  double to_double() const noexcept;
  /// "123.5", "exp(6.0123e+06)", "exp(exp(1.2e+13))".
  std::string str(int precision = 6) const;

  friend Magnitude operator+(const Magnitude& a, const Magnitude& b);
  friend Magnitude operator*(const Magnitude& a, const Magnitude& b);
  Magnitude& operator+=(const Magnitude& o) { return *this = *this + o; }
  Magnitude& operator*=(const Magnitude& o) { return *this = *this * o; }

  friend std::partial_ordering operator<=>(const Magnitude& a, const Magnitude& b);
  friend bool operator==(const Magnitude& a, const Magnitude& b) {
    return a.level_ == b.level_ && a.x_ == b.x_;
  }

 private:
  void normalize();

  int level_ = 0;
  double x_ = 0.0;
};

Magnitude exp(const Magnitude& m);
/// Natural log; the argument must be > 0. Level-0 results may be negative,
/// which is only meaningful when the argument is representable.
Magnitude log(const Magnitude& m);
/// m^p for p > 0.
Magnitude pow(const Magnitude& m, double p);
/// floor(m) + 1 for representable m, m itself otherwise.
Magnitude floor_plus_one(const Magnitude& m);

}  // namespace ebrus
