#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "adiabatic/errors.hpp"

namespace adiabatic::numkit {

using cplx = std::complex<double>;

/// Truncated Taylor polynomial c_0 + c_1 h + ... + c_K h^K with complex
/// coefficients. Coefficient k is the k-th derivative divided by k!.
///
/// All arithmetic truncates at order K, and binary operations require both
/// operands to carry the same order.
class Jet {
public:
  Jet() = default;

  /// Zero jet of order `order`.
  explicit Jet(std::size_t order) : coeffs_(order + 1, cplx{}) {}

  Jet(std::size_t order, std::initializer_list<cplx> coeffs) : coeffs_(order + 1, cplx{}) {
    if (coeffs.size() > order + 1) {
      throw ContractError("jet: more coefficients than order + 1");
    }
    std::copy(coeffs.begin(), coeffs.end(), coeffs_.begin());
  }

  Jet(std::size_t order, std::span<const cplx> coeffs) : coeffs_(order + 1, cplx{}) {
    if (coeffs.size() > order + 1) {
      throw ContractError("jet: more coefficients than order + 1");
    }
    std::copy(coeffs.begin(), coeffs.end(), coeffs_.begin());
  }

  static Jet constant(std::size_t order, cplx value) {
    Jet j(order);
    j.coeffs_[0] = value;
    return j;
  }

  /// value + h, the independent variable shifted to `value`.
  static Jet variable(std::size_t order, cplx value) {
    Jet j(order);
    j.coeffs_[0] = value;
    if (order >= 1) j.coeffs_[1] = 1.0;
    return j;
  }

  static Jet unit(std::size_t order) { return constant(order, 1.0); }

  std::size_t order() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  cplx operator[](std::size_t k) const { return coeffs_.at(k); }
  cplx& operator[](std::size_t k) { return coeffs_.at(k); }
  cplx value() const { return coeffs_.at(0); }

  /// k-th derivative at the expansion point.
  cplx derivative(std::size_t k) const {
    double factorial = 1.0;
    for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<double>(i);
    return coeffs_.at(k) * factorial;
  }

  /// Horner evaluation of the truncated polynomial at offset h.
  cplx evaluate(cplx h) const {
    cplx acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * h + *it;
    return acc;
  }

  Jet& operator+=(const Jet& o) {
    check_order(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }

  Jet& operator-=(const Jet& o) {
    check_order(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }

  Jet& operator*=(cplx s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  Jet& operator*=(const Jet& o) { return *this = mul(*this, o); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return mul(a, recip(b)); }

  /// Cauchy product truncated at the common order.
  friend Jet mul(const Jet& a, const Jet& b) {
    a.check_order(b);
    const std::size_t n = a.coeffs_.size();
    Jet out(a.order());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.coeffs_[i] == cplx{}) continue;
      for (std::size_t j = 0; i + j < n; ++j) out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return out;
  }

  /// Multiplicative inverse by the standard recurrence
  /// b_0 = 1/a_0, b_k = -(sum_{j=1..k} a_j b_{k-j}) / a_0.
  friend Jet recip(const Jet& a) {
    const cplx a0 = a.coeffs_.at(0);
    if (a0 == cplx{}) {
      throw SingularJetError("jet reciprocal: constant term is zero");
    }
    Jet out(a.order());
    out.coeffs_[0] = 1.0 / a0;
    for (std::size_t k = 1; k < a.coeffs_.size(); ++k) {
      cplx acc{};
      for (std::size_t j = 1; j <= k; ++j) acc += a.coeffs_[j] * out.coeffs_[k - j];
      out.coeffs_[k] = -acc / a0;
    }
    return out;
  }

  friend bool operator==(const Jet&, const Jet&) = default;

private:
  void check_order(const Jet& o) const {
    if (o.coeffs_.size() != coeffs_.size()) {
      throw ContractError("jet: order mismatch (" + std::to_string(order()) + " vs " +
                          std::to_string(o.order()) + ")");
    }
  }

  std::vector<cplx> coeffs_{cplx{}};
};

inline Jet jet_mul(const Jet& a, const Jet& b) { return mul(a, b); }
inline Jet jet_recip(const Jet& a) { return recip(a); }

}  // namespace adiabatic::numkit
