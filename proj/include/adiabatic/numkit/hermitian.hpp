#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "adiabatic/errors.hpp"

namespace adiabatic::numkit {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// <a|b>, conjugating the first argument.
inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw ContractError("inner: size mismatch");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Dense square matrix that is Hermitian to within 1e-12 (checked on
/// construction). Storage is row-major.
class HermitianMatrix {
public:
  static constexpr double kHermitianTol = 1e-12;

  HermitianMatrix() = default;

  HermitianMatrix(std::size_t dim, std::vector<cplx> entries) : dim_(dim), a_(std::move(entries)) {
    if (a_.size() != dim_ * dim_) {
      throw ContractError("hermitian matrix: expected " + std::to_string(dim_ * dim_) +
                          " entries, got " + std::to_string(a_.size()));
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i; j < dim_; ++j) {
        const double dev = std::abs(a_[i * dim_ + j] - std::conj(a_[j * dim_ + i]));
        if (!(dev <= kHermitianTol)) {
          std::ostringstream os;
          os << "hermitian matrix: entry (" << i << "," << j << ") differs from conj of (" << j
             << "," << i << ") by " << dev;
          throw ContractError(os.str());
        }
      }
    }
  }

  /// Builds from separate real and imaginary parts, both row-major.
  static HermitianMatrix from_parts(std::size_t dim, std::span<const double> re,
                                    std::span<const double> im) {
    if (re.size() != dim * dim || im.size() != dim * dim) {
      throw ContractError("hermitian matrix: real/imaginary parts must have dim*dim entries");
    }
    std::vector<cplx> e(dim * dim);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = {re[k], im[k]};
    return HermitianMatrix(dim, std::move(e));
  }

  static HermitianMatrix diagonal(std::span<const double> d) {
    std::vector<cplx> e(d.size() * d.size());
    for (std::size_t i = 0; i < d.size(); ++i) e[i * d.size() + i] = d[i];
    return HermitianMatrix(d.size(), std::move(e));
  }

  std::size_t dim() const noexcept { return dim_; }
  cplx operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
  std::span<const cplx> entries() const noexcept { return a_; }

  double frobenius_norm() const { return norm2(a_); }

  cvec apply(std::span<const cplx> v) const {
    if (v.size() != dim_) throw ContractError("hermitian matrix: vector size mismatch");
    cvec out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < dim_; ++j) s += a_[i * dim_ + j] * v[j];
      out[i] = s;
    }
    return out;
  }

  /// this + s * other.
  HermitianMatrix plus_scaled(double s, const HermitianMatrix& other) const {
    if (other.dim_ != dim_) throw ContractError("hermitian matrix: dimension mismatch");
    std::vector<cplx> e(a_);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += s * other.a_[k];
    return HermitianMatrix(dim_, std::move(e));
  }

private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  std::vector<cvec> vectors;   // vectors[k] pairs with values[k]
  int sweeps = 0;
};

struct JacobiOptions {
  int max_sweeps = 30;
  double rel_off_tol = 1e-13;
};

/// Cyclic Jacobi diagonalisation with unitary 2x2 rotations.
///
/// Each rotation first removes the phase of a(p,q) with a diagonal unitary,
/// then applies the real symmetric Jacobi rotation to the resulting real
/// 2x2 block. Iterates until the off-diagonal Frobenius norm drops to
/// rel_off_tol * ||m||.
inline EigenSystem hermitian_eig(const HermitianMatrix& m, JacobiOptions opts = {}) {
  const std::size_t n = m.dim();
  std::vector<cplx> a(m.entries().begin(), m.entries().end());
  std::vector<cplx> v(n * n, cplx{});
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto at = [n](std::vector<cplx>& x, std::size_t i, std::size_t j) -> cplx& { return x[i * n + j]; };

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a[i * n + j]);
    return std::sqrt(s);
  };

  const double scale = m.frobenius_norm();
  const double target = opts.rel_off_tol * scale;
  int sweep = 0;
  double off = off_norm();
  while (off > target) {
    if (sweep == opts.max_sweeps) {
      std::ostringstream os;
      os << "hermitian_eig: no convergence after " << sweep << " sweeps (dim " << n
         << ", off-diagonal norm " << off << ", target " << target << ")";
      throw NumericalError(os.str());
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = at(a, p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cplx phase = apq / mag;  // e^{i phi}
        const double app = at(a, p, p).real();
        const double aqq = at(a, q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U restricted to (p,q) = diag(1, e^{-i phi}) * [[c, s], [-s, c]].
        const cplx u_pp = c;
        const cplx u_pq = s;
        const cplx u_qp = -s * std::conj(phase);
        const cplx u_qq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = at(a, k, p);
          const cplx akq = at(a, k, q);
          at(a, k, p) = akp * u_pp + akq * u_qp;
          at(a, k, q) = akp * u_pq + akq * u_qq;
          const cplx vkp = at(v, k, p);
          const cplx vkq = at(v, k, q);
          at(v, k, p) = vkp * u_pp + vkq * u_qp;
          at(v, k, q) = vkp * u_pq + vkq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = at(a, p, k);
          const cplx aqk = at(a, q, k);
          at(a, p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          at(a, q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        at(a, p, q) = 0.0;
        at(a, q, p) = 0.0;
        at(a, p, p) = at(a, p, p).real();
        at(a, q, q) = at(a, q, q).real();
      }
    }
    off = off_norm();
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i].real() < a[j * n + j].real(); });

  EigenSystem out;
  out.sweeps = sweep;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (std::size_t k : idx) {
    out.values.push_back(a[k * n + k].real());
    cvec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v[i * n + k];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

}  // namespace adiabatic::numkit
