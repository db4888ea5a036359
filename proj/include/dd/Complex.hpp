#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

namespace dd {

using fp = double;

/// An interned complex number. Edge weights never hold raw values; they point
/// at one canonical instance per tolerance-equivalence class so that node
/// hashing and structural comparison reduce to pointer identity.
struct Complex {
  fp re;
  fp im;

  [[nodiscard]] std::complex<fp> value() const noexcept { return {re, im}; }
  [[nodiscard]] bool exactlyZero() const noexcept { return re == 0. && im == 0.; }
  [[nodiscard]] bool exactlyOne() const noexcept { return re == 1. && im == 0.; }
  [[nodiscard]] fp mag2() const noexcept { return re * re + im * im; }
  [[nodiscard]] fp mag() const noexcept { return std::hypot(re, im); }
};

/// Interning table for complex values.
///
/// Lookup buckets values on a grid of side `tolerance` and probes the 3x3
/// neighborhood of the query cell, so any canonical within the (componentwise)
/// tolerance box of the query is found no matter which side of a cell
/// boundary it landed on. First-come-first-served: the first value interned
/// in a neighborhood becomes the canonical representative for everything that
/// later falls within tolerance of it.
class ComplexTable {
public:
  explicit ComplexTable(fp tolerance = 1e-13);

  ComplexTable(const ComplexTable&) = delete;
  ComplexTable& operator=(const ComplexTable&) = delete;

  /// Return the canonical instance for (re, im), creating one if no existing
  /// entry lies within tolerance. Values within tolerance of 0 or 1 resolve
  /// to the exact pre-interned constants.
  const Complex* lookup(fp re, fp im);
  const Complex* lookup(const std::complex<fp>& v) { return lookup(v.real(), v.imag()); }

  [[nodiscard]] const Complex* zero() const noexcept { return zero_; }
  [[nodiscard]] const Complex* one() const noexcept { return one_; }

  [[nodiscard]] fp tolerance() const noexcept { return tol_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

private:
  using CellKey = std::uint64_t;

  [[nodiscard]] std::int64_t cellOf(fp x) const noexcept {
    return static_cast<std::int64_t>(std::floor(x / tol_));
  }
  static CellKey packCells(std::int64_t cx, std::int64_t cy) noexcept;

  const Complex* insert(fp re, fp im);

  fp tol_;
  std::deque<Complex> entries_;
  std::unordered_map<CellKey, std::vector<const Complex*>> buckets_;
  const Complex* zero_ = nullptr;
  const Complex* one_ = nullptr;
};

/// Componentwise closeness at the table tolerance; the relation the interning
/// table realizes.
inline bool approxEqual(const std::complex<fp>& a, const std::complex<fp>& b, fp tol) noexcept {
  return std::abs(a.real() - b.real()) <= tol && std::abs(a.imag() - b.imag()) <= tol;
}

inline bool approxZero(const std::complex<fp>& a, fp tol) noexcept {
  return std::abs(a.real()) <= tol && std::abs(a.imag()) <= tol;
}

} // namespace dd
