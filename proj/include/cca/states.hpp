#pragma once

// Constructors for the initial states of interest: single Fock products,
// weak coherent products truncated at one photon per cavity, and the
// two-site entangled single-excitation family, together with its
// concurrence.

#include "cca/fock.hpp"
#include "cca/spectral.hpp"

#include <cmath>
#include <iostream>
#include <map>

namespace cca {

/// Normalized pure state stored as amplitude vectors per photon-number
/// sector, each over the deterministic basis of enumerate_sector.
template <typename Scalar>
struct PureState {
  int cavities = 0;
  std::map<int, ComplexVector<Scalar>> sectors;

  Scalar squared_norm() const {
    Scalar total = 0;
    for (const auto& [photons, amplitudes] : sectors) total += amplitudes.squaredNorm();
    return total;
  }
};
using PureStated = PureState<double>;

/// Vacuum-sector probability; time-invariant under the hopping dynamics.
template <typename Scalar>
Scalar vacuum_probability(const PureState<Scalar>& state) {
  auto it = state.sectors.find(0);
  return it == state.sectors.end() ? Scalar(0) : it->second.squaredNorm();
}

template <typename Scalar = double>
PureState<Scalar> fock_product_state(int cavities, const Occupation& occupations,
                                     int dimension_cap = kDefaultDimensionCap) {
  if (static_cast<int>(occupations.size()) != cavities)
    throw std::invalid_argument("occupation length does not match cavity count");
  const int total = total_photons(occupations);
  FockBasis basis = enumerate_sector(cavities, total, dimension_cap);
  PureState<Scalar> state;
  state.cavities = cavities;
  ComplexVector<Scalar> amplitudes = ComplexVector<Scalar>::Zero(basis.dim());
  amplitudes(basis.index_of(occupations)) = std::complex<Scalar>(1);
  state.sectors.emplace(total, std::move(amplitudes));
  return state;
}

/// Product of per-cavity truncated coherent states (|0> + alpha_i |1>),
/// normalized exactly, expanded into sectors 0..n. The vacuum probability is
/// prod 1/(1 + |alpha_i|^2) and does not evolve.
template <typename Scalar>
PureState<Scalar> weak_coherent_product(int cavities,
                                        const std::vector<std::complex<Scalar>>& alphas) {
  if (static_cast<int>(alphas.size()) != cavities)
    throw std::invalid_argument("need one amplitude per cavity");
  Scalar norm = 1;
  for (const auto& alpha : alphas) {
    const Scalar mag = std::abs(alpha);
    if (mag >= Scalar(1))
      throw std::invalid_argument("coherent amplitude |alpha| must be < 1");
    if (mag > Scalar(0.5))
      std::cerr << "warning: coherent amplitude |alpha| = " << mag
                << " is outside the weak-field regime\n";
    norm *= std::sqrt(Scalar(1) + mag * mag);
  }

  PureState<Scalar> state;
  state.cavities = cavities;
  for (int total = 0; total <= cavities; ++total) {
    FockBasis basis = enumerate_sector(cavities, total);
    ComplexVector<Scalar> amplitudes = ComplexVector<Scalar>::Zero(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
      const Occupation& occ = basis.states[i];
      bool truncated = true;
      std::complex<Scalar> coeff(1);
      for (int site = 0; site < cavities && truncated; ++site) {
        if (occ[site] > 1) truncated = false;
        else if (occ[site] == 1) coeff *= alphas[site];
      }
      if (truncated) amplitudes(i) = coeff / norm;
    }
    state.sectors.emplace(total, std::move(amplitudes));
  }
  return state;
}

template <typename Scalar>
struct EntangledPairSpec {
  Scalar theta;  // mixing angle, open interval (0, pi/2)

  void validate() const {
    if (!(theta > Scalar(0)) || !(theta < std::numbers::pi_v<Scalar> / Scalar(2)))
      throw std::invalid_argument("theta must lie in (0, pi/2)");
  }
};
using EntangledPairSpecd = EntangledPairSpec<double>;

enum class PairPlacement { first_two, last_two };

/// sin(theta)|1> on the first site of the pair, cos(theta)|1> on the second,
/// vacuum elsewhere; a single-excitation-sector state.
template <typename Scalar>
PureState<Scalar> entangled_pair_state(int cavities, const EntangledPairSpec<Scalar>& spec,
                                       PairPlacement placement) {
  spec.validate();
  if (cavities < 2) throw std::invalid_argument("need at least two cavities");
  const int first = placement == PairPlacement::first_two ? 0 : cavities - 2;
  PureState<Scalar> state;
  state.cavities = cavities;
  // single-excitation basis order matches site order
  ComplexVector<Scalar> amplitudes = ComplexVector<Scalar>::Zero(cavities);
  amplitudes(first) = std::sin(spec.theta);
  amplitudes(first + 1) = std::cos(spec.theta);
  state.sectors.emplace(1, std::move(amplitudes));
  return state;
}

/// C(theta) = |sin 2 theta| for the two-site entangled input.
template <typename Scalar>
Scalar concurrence(const EntangledPairSpec<Scalar>& spec) {
  spec.validate();
  return std::abs(std::sin(Scalar(2) * spec.theta));
}

}  // namespace cca
