#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace zealotry {

/// Dense polynomial, coefficients in increasing degree.
template <class T = double>
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  /// Degree of the zero polynomial is reported as -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T{}; }
  const std::vector<T>& coeffs() const { return c_; }

  T operator()(T z) const {
    T acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    std::vector<T> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(static_cast<T>(k) * c_[k]);
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T{});
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.coeff(k) + b.coeff(k);
    return Polynomial(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T{});
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.coeff(k) - b.coeff(k);
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T{});
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T{}) c_.pop_back();
  }

  std::vector<T> c_;
};

namespace detail {

template <class T>
T newton_polish(const Polynomial<T>& p, T root) {
  const Polynomial<T> dp = p.derivative();
  for (int it = 0; it < 8; ++it) {
    const T slope = dp(root);
    if (slope == T{}) break;
    const T step = p(root) / slope;
    root -= step;
    if (std::abs(step) <= std::numeric_limits<T>::epsilon() * std::max(T{1}, std::abs(root))) break;
  }
  return root;
}

}  // namespace detail

/// Real roots of a polynomial of degree at most 3, sorted, each refined by a
/// few Newton steps. The zero polynomial has no isolated roots and yields none.
template <class T>
std::vector<T> real_roots(const Polynomial<T>& p) {
  std::vector<T> roots;
  switch (p.degree()) {
    case -1:
    case 0:
      return roots;
    case 1:
      roots.push_back(-p.coeff(0) / p.coeff(1));
      return roots;
    case 2: {
      const T a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
      const T disc = b * b - 4 * a * c;
      if (disc < 0) return roots;
      // Cancellation-free form.
      const T q = -(b + std::copysign(std::sqrt(disc), b)) / 2;
      if (q != T{}) {
        roots.push_back(q / a);
        roots.push_back(c / q);
      } else {
        roots.push_back(T{});
        roots.push_back(T{});
      }
      break;
    }
    case 3: {
      const T a = p.coeff(3);
      const T b = p.coeff(2) / a, c = p.coeff(1) / a, d = p.coeff(0) / a;
      // Depressed cubic t^3 + pp t + qq with z = t - b/3.
      const T pp = c - b * b / 3;
      const T qq = 2 * b * b * b / 27 - b * c / 3 + d;
      const T disc = qq * qq / 4 + pp * pp * pp / 27;
      if (disc > 0) {
        const T s = std::sqrt(disc);
        roots.push_back(std::cbrt(-qq / 2 + s) + std::cbrt(-qq / 2 - s) - b / 3);
      } else if (pp == T{}) {
        roots.push_back(-b / 3);
      } else {
        const T r = std::sqrt(-pp / 3);
        const T arg = std::clamp(3 * qq / (2 * pp) / r, T{-1}, T{1});
        const T phi = std::acos(arg) / 3;
        for (int k = 0; k < 3; ++k) {
          roots.push_back(2 * r * std::cos(phi - 2 * std::numbers::pi_v<T> * k / 3) - b / 3);
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("real_roots supports degree <= 3");
  }
  for (T& r : roots) r = detail::newton_polish(p, r);
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace zealotry
