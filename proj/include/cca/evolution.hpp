#pragma once

// Exact unitary evolution under the hopping Hamiltonian, sector by sector.
// Each photon-number sector gets a dense symmetric eigendecomposition; time
// evolution is then exact for arbitrary t with no step error. A second,
// independent route computes transition amplitudes by pushing each photon of
// the initial configuration through the single-particle propagator and
// collecting bosonic multinomial factors; the two must agree.

#include "cca/fock.hpp"
#include "cca/spectral.hpp"
#include "cca/states.hpp"

#include <cmath>
#include <map>
#include <vector>

namespace cca {

/// H restricted to one sector: omega * sum_j n_j + J * sum_j (hops), built
/// from ladder-operator products. Real symmetric.
template <typename Scalar>
DenseMatrix<Scalar> assemble_sector_hamiltonian(const ModelParams<Scalar>& params,
                                                const FockBasis& basis,
                                                int dimension_cap = kDefaultDimensionCap) {
  params.validate();
  if (basis.cavities != params.cavities)
    throw std::invalid_argument("basis cavity count does not match parameters");
  const int n = params.cavities;

  DenseMatrix<Scalar> h = DenseMatrix<Scalar>::Zero(basis.dim(), basis.dim());
  for (int j = 0; j < n; ++j) h += params.omega * number_operator<Scalar>(basis, j);

  if (basis.total_photons > 0 && params.hopping != Scalar(0)) {
    const FockBasis lower = enumerate_sector(n, basis.total_photons - 1, dimension_cap);
    for (int j = 0; j + 1 < n; ++j) {
      // a_j^dag a_{j+1} as (lower -> basis) x (basis -> lower)
      ComplexMatrix<Scalar> hop = ladder_matrix<Scalar>(lower, basis, j, Ladder::create) *
                                  ladder_matrix<Scalar>(basis, lower, j + 1, Ladder::annihilate);
      h += params.hopping * (hop.real() + hop.real().transpose());
    }
  }
  return h;
}

template <typename Scalar>
struct SectorEvolver {
  FockBasis basis;
  DenseVector<Scalar> eigenvalues;
  DenseMatrix<Scalar> eigenvectors;  // orthogonal columns
};
using SectorEvolverd = SectorEvolver<double>;

template <typename Scalar>
SectorEvolver<Scalar> build_sector_evolver(const ModelParams<Scalar>& params, FockBasis basis,
                                           int dimension_cap = kDefaultDimensionCap) {
  const DenseMatrix<Scalar> h = assemble_sector_hamiltonian(params, basis, dimension_cap);
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sector eigendecomposition failed");
  return {std::move(basis), solver.eigenvalues(), solver.eigenvectors()};
}

/// amplitudes(t) = V exp(-i lambda t) V^T amplitudes(0)
template <typename Scalar>
ComplexVector<Scalar> evolve_amplitudes(const SectorEvolver<Scalar>& evolver,
                                        const ComplexVector<Scalar>& amplitudes, Scalar t) {
  using C = std::complex<Scalar>;
  ComplexVector<Scalar> modes = evolver.eigenvectors.template cast<C>().transpose() * amplitudes;
  modes.array() *= ((C(0, -1) * t) * evolver.eigenvalues.template cast<C>()).array().exp();
  return evolver.eigenvectors.template cast<C>() * modes;
}

template <typename Scalar>
PureState<Scalar> evolve(const PureState<Scalar>& state, const ModelParams<Scalar>& params,
                         Scalar t) {
  PureState<Scalar> out;
  out.cavities = state.cavities;
  for (const auto& [photons, amplitudes] : state.sectors) {
    auto evolver = build_sector_evolver(params, enumerate_sector(state.cavities, photons));
    out.sectors.emplace(photons, evolve_amplitudes(evolver, amplitudes, t));
  }
  return out;
}

/// |<initial| psi(t)>|^2 for |psi(0)> = |initial>, over a grid of times.
template <typename Scalar>
DenseVector<Scalar> survival_series(const Occupation& initial, const ModelParams<Scalar>& params,
                                    const DenseVector<Scalar>& times) {
  using C = std::complex<Scalar>;
  const auto evolver =
      build_sector_evolver(params, enumerate_sector(params.cavities, total_photons(initial)));
  const int idx = evolver.basis.index_of(initial);
  // amplitude(t) = sum_k V(idx,k)^2 exp(-i lambda_k t)
  const DenseVector<Scalar> weights = evolver.eigenvectors.row(idx).array().square();
  DenseVector<Scalar> out(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    C amp(0);
    for (Eigen::Index k = 0; k < weights.size(); ++k)
      amp += weights(k) * std::exp(C(0, -evolver.eigenvalues(k) * times(i)));
    out(i) = std::norm(amp);
  }
  return out;
}

template <typename Scalar>
Scalar survival_probability(const Occupation& initial, const ModelParams<Scalar>& params,
                            Scalar t) {
  DenseVector<Scalar> times(1);
  times(0) = t;
  return survival_series(initial, params, times)(0);
}

/// Closed-form survival cos^{4m}(J t / sqrt 2) of |m00> on the three-cavity
/// chain; valid for arbitrary m, including values far beyond what sector
/// evolution can represent.
template <typename Scalar>
Scalar closed_form_survival(long long photons, const ModelParams<Scalar>& params, Scalar t) {
  params.validate();
  if (params.cavities != 3)
    throw std::invalid_argument("closed-form survival is specific to three cavities");
  if (photons < 0) throw std::invalid_argument("negative photon number");
  const Scalar c = std::cos(params.hopping * t / std::numbers::sqrt2_v<Scalar>);
  const Scalar c2 = c * c;
  return std::pow(c2, Scalar(2) * Scalar(photons));
}

/// <final| U(t) |initial> via multinomial expansion through the
/// single-particle propagator. Independent of the sector eigendecomposition;
/// cost grows as n^(total photons), so totals are capped.
template <typename Scalar>
std::complex<Scalar> multinomial_amplitude_oracle(const Occupation& initial,
                                                  const Occupation& final_occ,
                                                  const SpectralData<Scalar>& spec, Scalar t) {
  using C = std::complex<Scalar>;
  const int n = spec.params.cavities;
  if (static_cast<int>(initial.size()) != n || static_cast<int>(final_occ.size()) != n)
    throw std::invalid_argument("occupation length does not match cavity count");
  const int total = total_photons(initial);
  if (total != total_photons(final_occ))
    throw std::invalid_argument("initial and final states lie in different sectors");
  if (total > 6) throw std::invalid_argument("oracle limited to at most six photons");

  const ComplexMatrix<Scalar> u = single_particle_propagator(spec, t);

  // Push photons one at a time; identical-photon orderings accumulate into
  // the coefficient of each destination monomial.
  std::map<Occupation, C> coeffs;
  coeffs.emplace(Occupation(static_cast<std::size_t>(n), 0), C(1));
  for (int source = 0; source < n; ++source) {
    for (int rep = 0; rep < initial[source]; ++rep) {
      std::map<Occupation, C> next;
      for (const auto& [occ, coeff] : coeffs) {
        for (int dest = 0; dest < n; ++dest) {
          Occupation moved = occ;
          ++moved[dest];
          next[moved] += coeff * u(dest, source);
        }
      }
      coeffs.swap(next);
    }
  }

  auto it = coeffs.find(final_occ);
  if (it == coeffs.end()) return C(0);
  Scalar factor = 1;
  for (int site = 0; site < n; ++site) {
    for (int m = 2; m <= final_occ[site]; ++m) factor *= Scalar(m);
    for (int m = 2; m <= initial[site]; ++m) factor /= Scalar(m);
  }
  return it->second * std::sqrt(factor);
}

template <typename Scalar>
struct ProbabilitySeries {
  DenseVector<Scalar> times;
  std::vector<Occupation> labels;
  DenseMatrix<Scalar> probabilities;  // times x labels
};
using ProbabilitySeriesd = ProbabilitySeries<double>;

/// p_label(t) = |<label | psi(t)>|^2 on a caller-specified grid.
template <typename Scalar>
ProbabilitySeries<Scalar> probability_series(const PureState<Scalar>& state,
                                             const ModelParams<Scalar>& params,
                                             const DenseVector<Scalar>& times,
                                             const std::vector<Occupation>& labels) {
  using C = std::complex<Scalar>;
  ProbabilitySeries<Scalar> out{times, labels,
                                DenseMatrix<Scalar>::Zero(times.size(), static_cast<Eigen::Index>(labels.size()))};

  std::map<int, std::vector<std::size_t>> by_sector;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (static_cast<int>(labels[i].size()) != state.cavities)
      throw std::invalid_argument("label length does not match cavity count");
    by_sector[total_photons(labels[i])].push_back(i);
  }

  for (const auto& [photons, label_ids] : by_sector) {
    auto sector = state.sectors.find(photons);
    if (sector == state.sectors.end()) continue;  // probability identically zero
    const auto evolver =
        build_sector_evolver(params, enumerate_sector(state.cavities, photons));
    const ComplexVector<Scalar> modes =
        evolver.eigenvectors.template cast<C>().transpose() * sector->second;
    for (Eigen::Index it = 0; it < times.size(); ++it) {
      const ComplexVector<Scalar> phased =
          (((C(0, -1) * times(it)) * evolver.eigenvalues.template cast<C>()).array().exp() *
           modes.array())
              .matrix();
      for (std::size_t li : label_ids) {
        const int row = evolver.basis.index_of(labels[li]);
        const C amp = evolver.eigenvectors.row(row).template cast<C>() * phased;
        out.probabilities(it, static_cast<Eigen::Index>(li)) = std::norm(amp);
      }
    }
  }
  return out;
}

}  // namespace cca
