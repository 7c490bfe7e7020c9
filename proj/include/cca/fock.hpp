#pragma once

// Bosonic occupation-number bases restricted to one total-photon-number
// sector, plus dense matrix representations of the creation, annihilation
// and number operators acting between such sectors.
//
// The hopping Hamiltonian conserves total photon number, so everything
// downstream works sector by sector; a basis is the complete, lexicographic-
// descending enumeration of occupation patterns with a fixed total. For the
// single-excitation sector this order reads |100...>, |010...>, ... so the
// dense index of a state equals its excited-site index.

#include "cca/types.hpp"

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace cca {

/// Photons per cavity. Sites are indexed from zero.
using Occupation = std::vector<int>;

inline int total_photons(const Occupation& occ) {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

inline std::string format_occupation(const Occupation& occ) {
  bool compact = true;
  for (int m : occ) compact = compact && m >= 0 && m <= 9;
  std::string out;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (!compact && i > 0) out += '.';
    out += std::to_string(occ[i]);
  }
  return out;
}

inline constexpr int kDefaultDimensionCap = 100000;

/// Number of occupation patterns of `total_photons` photons over `cavities`
/// sites, C(total + n - 1, n - 1). Saturates instead of overflowing.
inline std::uint64_t sector_dimension(int cavities, int total_photons) {
  std::uint64_t dim = 1;
  for (int i = 1; i < cavities; ++i) {
    dim = dim * static_cast<std::uint64_t>(total_photons + i) / static_cast<std::uint64_t>(i);
    if (dim > (std::uint64_t(1) << 32)) return std::uint64_t(1) << 32;
  }
  return dim;
}

struct FockBasis {
  int cavities = 0;
  int total_photons = 0;
  std::vector<Occupation> states;       // lexicographic descending
  std::map<Occupation, int> index;      // inverse of `states`

  int dim() const { return static_cast<int>(states.size()); }

  bool contains(const Occupation& occ) const { return index.count(occ) != 0; }

  int index_of(const Occupation& occ) const {
    auto it = index.find(occ);
    if (it == index.end())
      throw std::invalid_argument("occupation " + format_occupation(occ) + " not in basis");
    return it->second;
  }
};

namespace detail {

inline void enumerate_rec(std::vector<Occupation>& out, Occupation& cur, int slot, int remaining) {
  const int last = static_cast<int>(cur.size()) - 1;
  if (slot == last) {
    cur[slot] = remaining;
    out.push_back(cur);
    return;
  }
  for (int m = remaining; m >= 0; --m) {
    cur[slot] = m;
    enumerate_rec(out, cur, slot + 1, remaining - m);
  }
}

}  // namespace detail

inline FockBasis enumerate_sector(int cavities, int total_photons,
                                  int dimension_cap = kDefaultDimensionCap) {
  if (cavities < 2) throw std::invalid_argument("need at least two cavities");
  if (total_photons < 0) throw std::invalid_argument("negative photon number");
  if (sector_dimension(cavities, total_photons) > static_cast<std::uint64_t>(dimension_cap))
    throw dimension_cap_error("sector of " + std::to_string(total_photons) + " photons over " +
                              std::to_string(cavities) + " cavities exceeds dimension cap " +
                              std::to_string(dimension_cap));

  FockBasis basis;
  basis.cavities = cavities;
  basis.total_photons = total_photons;
  basis.states.reserve(static_cast<std::size_t>(sector_dimension(cavities, total_photons)));
  Occupation cur(static_cast<std::size_t>(cavities), 0);
  detail::enumerate_rec(basis.states, cur, 0, total_photons);
  for (int i = 0; i < basis.dim(); ++i) basis.index.emplace(basis.states[i], i);
  return basis;
}

enum class Ladder { create, annihilate };

/// Matrix of a_j^dag (create) or a_j (annihilate) between two adjacent
/// sectors: <to| a_j^dag |from> = sqrt(m_j + 1) on the unique matching pair,
/// annihilation analogously sqrt(m_j).
template <typename Scalar = double>
ComplexMatrix<Scalar> ladder_matrix(const FockBasis& from, const FockBasis& to, int cavity,
                                    Ladder kind) {
  if (from.cavities != to.cavities)
    throw std::invalid_argument("ladder_matrix: cavity counts differ");
  if (cavity < 0 || cavity >= from.cavities)
    throw std::invalid_argument("ladder_matrix: cavity index out of range");
  const int delta = kind == Ladder::create ? 1 : -1;
  if (to.total_photons != from.total_photons + delta)
    throw std::invalid_argument("ladder_matrix: sector totals do not match operator kind");

  ComplexMatrix<Scalar> mat = ComplexMatrix<Scalar>::Zero(to.dim(), from.dim());
  for (int col = 0; col < from.dim(); ++col) {
    Occupation occ = from.states[col];
    const int m = occ[cavity];
    if (kind == Ladder::annihilate && m == 0) continue;
    occ[cavity] = m + delta;
    const Scalar amp = std::sqrt(Scalar(kind == Ladder::create ? m + 1 : m));
    mat(to.index_of(occ), col) = amp;
  }
  return mat;
}

/// Diagonal matrix of a_j^dag a_j on one sector.
template <typename Scalar = double>
DenseMatrix<Scalar> number_operator(const FockBasis& basis, int cavity) {
  if (cavity < 0 || cavity >= basis.cavities)
    throw std::invalid_argument("number_operator: cavity index out of range");
  DenseMatrix<Scalar> mat = DenseMatrix<Scalar>::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) mat(i, i) = Scalar(basis.states[i][cavity]);
  return mat;
}

}  // namespace cca
