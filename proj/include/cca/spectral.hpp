#pragma once

// Spectral decomposition of the uniform hopping chain. The single-particle
// Hamiltonian (omega on the diagonal, J on the two off-diagonals, open ends)
// is diagonalized in closed form by the orthogonal sine transform
//
//   S(j,k) = sqrt(2/(n+1)) sin(j k pi / (n+1)),   j,k = 1..n,
//
// with mode frequencies Omega_k = omega + 2 J cos(k pi / (n+1)). Free
// functions build the transform, the single-particle propagator
// U(t) = S diag(exp(-i Omega_k t)) S^T, and decide whether the spectrum of
// frequency gaps is commensurable, i.e. whether the dynamics revives.

#include "cca/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace cca {

template <typename Scalar>
struct ModelParams {
  int cavities = 3;
  Scalar omega = Scalar(1);     // cavity frequency, hbar = 1
  Scalar hopping = Scalar(0.5); // nearest-neighbour coupling J, units of omega

  void validate() const {
    if (cavities < 2) throw std::invalid_argument("need at least two cavities");
    if (!(omega > Scalar(0))) throw std::invalid_argument("omega must be positive");
    if (!(hopping >= Scalar(0))) throw std::invalid_argument("hopping must be non-negative");
  }
};
using ModelParamsd = ModelParams<double>;

template <typename Scalar>
struct SpectralData {
  ModelParams<Scalar> params;
  DenseMatrix<Scalar> sine_transform;  // orthogonal, S^T H1 S = diag(frequencies)
  DenseVector<Scalar> frequencies;     // Omega_k, stored for k = 1..n (descending in value)
};
using SpectralDatad = SpectralData<double>;

/// Tridiagonal single-particle Hamiltonian of the open chain.
template <typename Scalar>
DenseMatrix<Scalar> single_particle_hamiltonian(const ModelParams<Scalar>& params) {
  params.validate();
  const int n = params.cavities;
  DenseMatrix<Scalar> h = DenseMatrix<Scalar>::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = params.omega;
    if (j + 1 < n) h(j, j + 1) = h(j + 1, j) = params.hopping;
  }
  return h;
}

template <typename Scalar>
SpectralData<Scalar> build_spectral(const ModelParams<Scalar>& params) {
  params.validate();
  const int n = params.cavities;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  SpectralData<Scalar> out{params, DenseMatrix<Scalar>(n, n), DenseVector<Scalar>(n)};
  const Scalar norm = std::sqrt(Scalar(2) / Scalar(n + 1));
  for (int k = 1; k <= n; ++k) {
    out.frequencies(k - 1) =
        params.omega + Scalar(2) * params.hopping * std::cos(Scalar(k) * pi / Scalar(n + 1));
    for (int j = 1; j <= n; ++j)
      out.sine_transform(j - 1, k - 1) = norm * std::sin(Scalar(j) * Scalar(k) * pi / Scalar(n + 1));
  }
  return out;
}

/// U(t) = S diag(exp(-i Omega_k t)) S^T; unitary, symmetric.
template <typename Scalar>
ComplexMatrix<Scalar> single_particle_propagator(const SpectralData<Scalar>& spec, Scalar t) {
  using C = std::complex<Scalar>;
  ComplexVector<Scalar> phases =
      (C(0, -1) * t * spec.frequencies.template cast<C>()).array().exp();
  ComplexMatrix<Scalar> s = spec.sine_transform.template cast<C>();
  return s * phases.asDiagonal() * s.transpose();
}

/// |S^T a|^2 per mode: probability weights of a single-excitation state in
/// the mode basis, labelled k = 1..n.
template <typename Scalar>
DenseVector<Scalar> mode_weights(const SpectralData<Scalar>& spec,
                                 const ComplexVector<Scalar>& site_amplitudes) {
  using C = std::complex<Scalar>;
  return (spec.sine_transform.transpose().template cast<C>() * site_amplitudes).cwiseAbs2();
}

struct PeriodOptions {
  double tol = 1e-9;                  // accepted fractional residual of each gap multiple
  std::int64_t max_multiple = 1000000;  // bound on integer multiples and CF denominators
};

namespace detail {

/// Best rational approximation p/q to x >= 0 with q bounded, via continued
/// fraction convergents.
inline std::pair<std::int64_t, std::int64_t> rational_approx(double x, std::int64_t max_den) {
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p_cur = static_cast<std::int64_t>(std::floor(x));
  std::int64_t q_cur = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    const double inv = 1.0 / frac;
    if (inv > 9e15) break;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    frac = inv - std::floor(inv);
    const std::int64_t p_next = a * p_cur + p_prev;
    const std::int64_t q_next = a * q_cur + q_prev;
    if (q_next > max_den) break;
    p_prev = p_cur; q_prev = q_cur;
    p_cur = p_next; q_cur = q_next;
  }
  return {p_cur, q_cur};
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b != 0) { std::int64_t t = a % b; a = b; b = t; }
  return a;
}

}  // namespace detail

/// Revival period of the chain: the smallest T such that every pairwise
/// frequency-gap period 2 pi / |Omega_i - Omega_k| divides T within
/// `opts.tol`. Returns 0 when the spectrum is fully degenerate (stationary
/// populations) and nullopt when the gaps are incommensurable within the
/// multiple bound. Repeated frequencies are merged before gap analysis.
template <typename Scalar>
std::optional<Scalar> evolution_period(const SpectralData<Scalar>& spec,
                                       const PeriodOptions& opts = {}) {
  if (!(opts.tol > 0)) throw std::invalid_argument("period tolerance must be positive");
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

  std::vector<Scalar> freqs(spec.frequencies.data(),
                            spec.frequencies.data() + spec.frequencies.size());
  std::sort(freqs.begin(), freqs.end());
  const Scalar merge_tol =
      Scalar(1e-12) * std::max<Scalar>(Scalar(1), std::abs(freqs.back()) + std::abs(freqs.front()));
  std::vector<Scalar> distinct;
  for (Scalar f : freqs)
    if (distinct.empty() || f - distinct.back() > merge_tol) distinct.push_back(f);

  if (distinct.size() == 1) return Scalar(0);  // stationary

  std::vector<Scalar> gap_periods;
  for (std::size_t i = 0; i < distinct.size(); ++i)
    for (std::size_t k = i + 1; k < distinct.size(); ++k)
      gap_periods.push_back(two_pi / (distinct[k] - distinct[i]));

  const Scalar base = *std::max_element(gap_periods.begin(), gap_periods.end());

  // T = m * base with integer m; each ratio base/P must become integer under m.
  std::int64_t multiple = 1;
  for (Scalar period : gap_periods) {
    const double ratio = static_cast<double>(base / period);
    const auto [num, den] = detail::rational_approx(ratio, opts.max_multiple);
    (void)num;
    const std::int64_t g = detail::gcd64(multiple, den);
    if (multiple / g > opts.max_multiple / den) return std::nullopt;  // lcm overflows bound
    multiple = multiple / g * den;
    if (multiple > opts.max_multiple) return std::nullopt;
  }

  const Scalar candidate = Scalar(multiple) * base;
  for (Scalar period : gap_periods) {
    const Scalar x = candidate / period;
    if (std::abs(x - std::round(x)) > Scalar(opts.tol)) return std::nullopt;
  }
  return candidate;
}

}  // namespace cca
