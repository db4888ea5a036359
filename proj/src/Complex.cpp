#include "dd/Complex.hpp"

#include <stdexcept>

namespace dd {

ComplexTable::ComplexTable(const fp tolerance) : tol_(tolerance) {
  if (tolerance <= 0.) {
    throw std::invalid_argument("complex table tolerance must be positive");
  }
  zero_ = insert(0., 0.);
  one_ = insert(1., 0.);
}

ComplexTable::CellKey ComplexTable::packCells(const std::int64_t cx, const std::int64_t cy) noexcept {
  // splitmix-style mix of the two cell coordinates
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(static_cast<std::uint64_t>(cx)) ^ (mix(static_cast<std::uint64_t>(cy)) << 1);
}

const Complex* ComplexTable::lookup(fp re, fp im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw std::invalid_argument("cannot intern non-finite complex value");
  }
  if (re == 0.) {
    re = 0.; // collapse -0
  }
  if (im == 0.) {
    im = 0.;
  }
  const auto cx = cellOf(re);
  const auto cy = cellOf(im);
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      const auto it = buckets_.find(packCells(cx + dx, cy + dy));
      if (it == buckets_.end()) {
        continue;
      }
      for (const auto* entry : it->second) {
        if (std::abs(entry->re - re) <= tol_ && std::abs(entry->im - im) <= tol_) {
          return entry;
        }
      }
    }
  }
  return insert(re, im);
}

const Complex* ComplexTable::insert(const fp re, const fp im) {
  entries_.push_back(Complex{re, im});
  const Complex* entry = &entries_.back();
  buckets_[packCells(cellOf(re), cellOf(im))].push_back(entry);
  return entry;
}

} // namespace dd
