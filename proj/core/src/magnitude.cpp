#include "ebrus/magnitude.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "ebrus/error.hpp"

namespace ebrus {

namespace {

// log(DBL_MAX)
const double kLogMax = std::log(std::numeric_limits<double>::max());

// Tower value t (level >= 1, so t > DBL_MAX) plus a finite double s.
Magnitude add_small(const Magnitude& t, double s) {
  if (t.level() == 1) {
    return Magnitude::tower(1, t.x() + std::log1p(s * std::exp(-t.x())));
  }
  return t;
}

}  // namespace

Magnitude Magnitude::tower(int level, double x) {
  if (level < 0) throw Error("bounds", "negative magnitude level");
  Magnitude m;
  m.level_ = level;
  m.x_ = x;
  m.normalize();
  return m;
}

void Magnitude::normalize() {
  if (level_ == 0 && std::isinf(x_) && x_ > 0) return;
  while (level_ > 0 && x_ <= kLogMax) {
    x_ = std::exp(x_);
    --level_;
  }
}

double Magnitude::to_double() const noexcept {
  return level_ == 0 ? x_ : std::numeric_limits<double>::infinity();
}

std::string Magnitude::str(int precision) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x_);
  std::string s = buf;
  for (int i = 0; i < level_; ++i) s = "exp(" + s + ")";
  return s;
}

Magnitude operator+(const Magnitude& a0, const Magnitude& b0) {
  const Magnitude* a = &a0;
  const Magnitude* b = &b0;
  if (*a < *b) std::swap(a, b);
  if (a->level() == 0) {
    const double s = a->x() + b->x();
    if (std::isfinite(s) || !std::isfinite(a->x())) return Magnitude(s);
    // Both near DBL_MAX: go through the log.
    return Magnitude::tower(1, std::log(a->x()) + std::log1p(b->x() / a->x()));
  }
  if (b->level() == 0) return add_small(*a, b->x());
  if (a->level() == 1) {
    // b is level 1 too.
    return Magnitude::tower(1, a->x() + std::log1p(std::exp(b->x() - a->x())));
  }
  // a >= exp(DBL_MAX): b only matters when equal.
  if (*a == *b) return *a * Magnitude(2.0);
  return *a;
}

Magnitude operator*(const Magnitude& a, const Magnitude& b) {
  if (a.level() == 0 && b.level() == 0) {
    const double p = a.x() * b.x();
    if (std::isfinite(p) || !std::isfinite(a.x()) || !std::isfinite(b.x())) return Magnitude(p);
  }
  if ((a.level() == 0 && a.x() == 0.0) || (b.level() == 0 && b.x() == 0.0)) return Magnitude(0.0);
  const Magnitude la = log(a);
  const Magnitude lb = log(b);
  if (la.level() == 0 && lb.level() == 0) return exp(Magnitude(la.x() + lb.x()));
  if (la.level() == 0) return exp(add_small(lb, la.x()));
  if (lb.level() == 0) return exp(add_small(la, lb.x()));
  return exp(la + lb);
}

std::partial_ordering operator<=>(const Magnitude& a, const Magnitude& b) {
  if (a.level_ != b.level_) return a.level_ <=> b.level_;
  return a.x_ <=> b.x_;
}

Magnitude exp(const Magnitude& m) {
  if (m.level() == 0 && m.x() <= kLogMax) return Magnitude(std::exp(m.x()));
  return Magnitude::tower(m.level() + 1, m.x());
}

Magnitude log(const Magnitude& m) {
  if (m.level() == 0) return Magnitude(std::log(m.x()));
  return Magnitude::tower(m.level() - 1, m.x());
}

Magnitude pow(const Magnitude& m, double p) {
  if (!(p > 0.0)) throw Error("bounds", "magnitude power must be positive");
  if (m.level() == 0) {
    const double r = std::pow(m.x(), p);
    if (std::isfinite(r) || !std::isfinite(m.x())) return Magnitude(r);
  }
  const Magnitude l = log(m);
  if (l.level() == 0) return exp(Magnitude(p * l.x()));
  return exp(l * Magnitude(p));
}

Magnitude floor_plus_one(const Magnitude& m) {
  if (m.level() == 0) return Magnitude(std::floor(m.x()) + 1.0);
  return m;
}

}  // namespace ebrus
