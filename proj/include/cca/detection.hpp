#pragma once

// Event detection on probability curves of the three-cavity chain: times
// where the three k-photon single-site probabilities coincide (W signature)
// and times where the middle-site probability is suppressed while the edge
// probabilities peak (NOON signature). Also the four-cavity entangled-state
// transfer probability, in closed form and by direct evolution.
//
// Detection scans one revival period on a coarse grid, refines candidates by
// bisection (sign changes) or golden-section (tangential touches and
// extrema), and accepts events against scale-free thresholds. Thresholds are
// relative because the interesting sectors of weak coherent inputs carry
// populations anywhere between 1e-2 and 1e-11; absolute cutoffs cannot serve
// both ends.

#include "cca/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace cca {

enum class EventKind { w, noon };

template <typename Scalar>
struct DetectionReport {
  EventKind kind = EventKind::w;
  int photon_number = 0;
  Scalar period = 0;                       // scanned revival period
  std::vector<Scalar> times;               // ascending, within [0, period)
  std::vector<Scalar> probabilities;       // edge/common probability at each event
  std::vector<Scalar> residuals;           // defining-condition residual at each event
  std::vector<bool> initial_coincidence;   // event at t = 0, i.e. the initial state itself

  bool empty() const { return times.empty(); }
};
using DetectionReportd = DetectionReport<double>;

struct DetectionOptions {
  int scan_points = 4001;        // coarse grid per period
  double equality_tol = 1e-8;    // pairwise equality at an event, relative to the event scale
  double nonzero_ratio = 1e-3;   // event probability floor, relative to the grid maximum
  double vanish_ratio = 0.2;     // NOON middle-site suppression, relative to the edge value
  double refine_tol = 1e-12;     // relative time resolution of the refinement
  PeriodOptions period{};
};

template <typename Scalar>
struct TransferResult {
  Scalar t = 0;
  Scalar concurrence = 0;
  Scalar probability = 0;
};
using TransferResultd = TransferResult<double>;

namespace detail {

template <typename F>
double bisect(const F& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  for (int iter = 0; iter < 200 && hi - lo > xtol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((flo <= 0) == (fmid <= 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename F>
double golden_minimize(const F& f, double lo, double hi, double xtol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

/// Probability evaluator for the three k-photon single-site states of a
/// three-cavity chain, reusing one sector eigendecomposition.
template <typename Scalar>
class SiteProbes {
 public:
  SiteProbes(const PureState<Scalar>& state, const ModelParams<Scalar>& params, int photons)
      : missing_(true) {
    if (params.cavities != 3)
      throw std::invalid_argument("W/NOON detection covers the three-cavity chain");
    if (photons < 1) throw std::invalid_argument("photon number must be positive");
    auto sector = state.sectors.find(photons);
    if (sector == state.sectors.end()) return;
    evolver_ = build_sector_evolver(params, enumerate_sector(3, photons));
    using C = std::complex<Scalar>;
    modes_ = evolver_.eigenvectors.template cast<C>().transpose() * sector->second;
    for (int site = 0; site < 3; ++site) {
      Occupation occ(3, 0);
      occ[static_cast<std::size_t>(site)] = photons;
      rows_[site] = evolver_.eigenvectors.row(evolver_.basis.index_of(occ));
    }
    missing_ = modes_.squaredNorm() == Scalar(0);
  }

  bool missing() const { return missing_; }

  std::array<Scalar, 3> operator()(Scalar t) const {
    using C = std::complex<Scalar>;
    const ComplexVector<Scalar> phased =
        (((C(0, -1) * t) * evolver_.eigenvalues.template cast<C>()).array().exp() *
         modes_.array())
            .matrix();
    std::array<Scalar, 3> p;
    for (int site = 0; site < 3; ++site)
      p[site] = std::norm(rows_[site].template cast<C>().dot(phased));
    return p;
  }

 private:
  SectorEvolver<Scalar> evolver_;
  ComplexVector<Scalar> modes_;
  std::array<DenseVector<Scalar>, 3> rows_;
  bool missing_;
};

template <typename Scalar>
Scalar scan_period(const ModelParams<Scalar>& params, const PeriodOptions& opts) {
  const auto period = evolution_period(build_spectral(params), opts);
  if (!period)
    throw std::runtime_error("no finite evolution period; cannot scan for events");
  if (*period == Scalar(0))
    throw std::domain_error("degenerate spectrum: dynamics is stationary");
  return *period;
}

// Tangential refinements resolve event times only down to the noise basin of
// the probability curves (~1e-7 of the period); boundary wrapping, event
// deduplication and the initial-state flag all use a matching tolerance.
constexpr double kEventMergeFraction = 1e-6;

/// Canonical representative of a refined event time in [0, period); times
/// within refinement noise of the period boundary belong to t = 0.
template <typename Scalar>
std::optional<Scalar> wrap_event_time(Scalar t, Scalar period) {
  if (t < 0) t += period;
  if (t >= period * (Scalar(1) - Scalar(kEventMergeFraction))) t -= period;
  if (t < 0) t = 0;
  if (t < 0 || t >= period) return std::nullopt;
  return t;
}

template <typename Scalar>
void push_event(DetectionReport<Scalar>& report, Scalar t, Scalar probability, Scalar residual,
                Scalar period) {
  for (Scalar seen : report.times)
    if (std::abs(seen - t) < Scalar(kEventMergeFraction) * period) return;
  report.times.push_back(t);
  report.probabilities.push_back(probability);
  report.residuals.push_back(residual);
  report.initial_coincidence.push_back(t < Scalar(kEventMergeFraction) * period);
}

template <typename Scalar>
void sort_events(DetectionReport<Scalar>& report) {
  std::vector<std::size_t> order(report.times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return report.times[a] < report.times[b]; });
  DetectionReport<Scalar> sorted = report;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.times[i] = report.times[order[i]];
    sorted.probabilities[i] = report.probabilities[order[i]];
    sorted.residuals[i] = report.residuals[order[i]];
    sorted.initial_coincidence[i] = report.initial_coincidence[order[i]];
  }
  report = sorted;
}

}  // namespace detail

/// Times within one period at which the three k-photon single-site
/// probabilities are pairwise equal (relative to their own scale) and
/// collectively non-negligible.
template <typename Scalar>
DetectionReport<Scalar> find_w_times(const PureState<Scalar>& state,
                                     const ModelParams<Scalar>& params, int photon_number,
                                     const DetectionOptions& opts = {}) {
  DetectionReport<Scalar> report;
  report.kind = EventKind::w;
  report.photon_number = photon_number;

  detail::SiteProbes<Scalar> probes(state, params, photon_number);
  report.period = detail::scan_period(params, opts.period);
  if (probes.missing()) return report;

  const int n = opts.scan_points;
  const Scalar step = report.period / Scalar(n - 1);
  std::vector<Scalar> diff(static_cast<std::size_t>(n));
  Scalar scale = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = probes(Scalar(i) * step);
    diff[static_cast<std::size_t>(i)] = p[0] - p[1];
    scale = std::max({scale, p[0], p[1], p[2]});
  }
  const Scalar floor = Scalar(opts.nonzero_ratio) * scale;
  const Scalar xtol = Scalar(opts.refine_tol) * report.period;

  auto d = [&](Scalar t) {
    const auto p = probes(t);
    return p[0] - p[1];
  };

  std::vector<Scalar> candidates;
  // wrap-aware: grid index n-1 is t = period, identified with t = 0
  auto at = [&](int i) { return diff[static_cast<std::size_t>(((i % (n - 1)) + (n - 1)) % (n - 1))]; };
  for (int i = 0; i + 1 < n; ++i) {
    const Scalar a = Scalar(i) * step;
    if (diff[static_cast<std::size_t>(i)] == Scalar(0)) {
      candidates.push_back(a);
    } else if (diff[static_cast<std::size_t>(i)] * diff[static_cast<std::size_t>(i + 1)] < 0) {
      candidates.push_back(detail::bisect(d, a, a + step, xtol));
    } else if (std::abs(at(i)) <= std::abs(at(i - 1)) && std::abs(at(i)) <= std::abs(at(i + 1))) {
      // tangential touch: refine the local minimum of |diff|
      auto mag = [&](Scalar t) { return std::abs(d(t)); };
      candidates.push_back(detail::golden_minimize(mag, a - step, a + step, xtol));
    }
  }

  for (Scalar raw : candidates) {
    const auto t = detail::wrap_event_time(raw, report.period);
    if (!t) continue;
    const auto p = probes(*t);
    if (p[0] < floor) continue;
    const Scalar event_scale = std::max({p[0], p[1], p[2]});
    const Scalar residual =
        std::max({std::abs(p[0] - p[1]), std::abs(p[0] - p[2]), std::abs(p[1] - p[2])}) /
        event_scale;
    if (residual > Scalar(opts.equality_tol)) continue;
    detail::push_event(report, *t, p[0], residual, report.period);
  }
  detail::sort_events(report);
  return report;
}

/// Times within one period at which the edge probabilities peak while the
/// middle-site probability is suppressed relative to them.
template <typename Scalar>
DetectionReport<Scalar> find_noon_times(const PureState<Scalar>& state,
                                        const ModelParams<Scalar>& params, int photon_number,
                                        const DetectionOptions& opts = {}) {
  DetectionReport<Scalar> report;
  report.kind = EventKind::noon;
  report.photon_number = photon_number;

  detail::SiteProbes<Scalar> probes(state, params, photon_number);
  report.period = detail::scan_period(params, opts.period);
  if (probes.missing()) return report;

  const int n = opts.scan_points;
  const Scalar step = report.period / Scalar(n - 1);
  std::vector<Scalar> edge(static_cast<std::size_t>(n));
  Scalar edge_max = 0;
  for (int i = 0; i < n; ++i) {
    edge[static_cast<std::size_t>(i)] = probes(Scalar(i) * step)[0];
    edge_max = std::max(edge_max, edge[static_cast<std::size_t>(i)]);
  }
  const Scalar floor = Scalar(opts.nonzero_ratio) * edge_max;
  const Scalar xtol = Scalar(opts.refine_tol) * report.period;

  auto at = [&](int i) { return edge[static_cast<std::size_t>(((i % (n - 1)) + (n - 1)) % (n - 1))]; };
  auto neg_edge = [&](Scalar t) { return -probes(t)[0]; };

  for (int i = 0; i + 1 < n; ++i) {
    if (!(at(i) >= at(i - 1) && at(i) >= at(i + 1))) continue;
    if (at(i) < floor) continue;
    const Scalar raw =
        detail::golden_minimize(neg_edge, Scalar(i - 1) * step, Scalar(i + 1) * step, xtol);
    const auto t = detail::wrap_event_time(raw, report.period);
    if (!t) continue;
    const auto p = probes(*t);
    if (p[0] < floor) continue;
    if (std::abs(p[0] - p[2]) > Scalar(opts.equality_tol) * std::max(p[0], p[2])) continue;
    const Scalar suppression = p[1] / p[0];
    if (suppression > Scalar(opts.vanish_ratio)) continue;
    detail::push_event(report, *t, p[0], suppression, report.period);
  }
  detail::sort_events(report);
  return report;
}

/// p(t, C) for the four-cavity chain at omega = 1, J = 1/2:
/// (1/5) sin^2(t/4) (5 C^2 cos^2(sqrt5 t/4) + 4 sin^2(sqrt5 t/4)).
template <typename Scalar>
Scalar transfer_probability_closed_form(Scalar t, Scalar c) {
  if (c < Scalar(0) || c > Scalar(1) + Scalar(1e-12))
    throw std::invalid_argument("concurrence must lie in [0, 1]");
  const Scalar s = std::sin(t / Scalar(4));
  const Scalar root5 = std::sqrt(Scalar(5));
  const Scalar cos5 = std::cos(root5 * t / Scalar(4));
  const Scalar sin5 = std::sin(root5 * t / Scalar(4));
  return s * s / Scalar(5) * (Scalar(5) * c * c * cos5 * cos5 + Scalar(4) * sin5 * sin5);
}

/// Probability that the entangled pair on the first two of four cavities is
/// found, with the same mixing angle, on the last two after time t. Direct
/// sector-1 evolution; independent of the closed form above.
template <typename Scalar>
TransferResult<Scalar> transfer_probability_numeric(Scalar theta,
                                                    const ModelParams<Scalar>& params, Scalar t) {
  if (params.cavities != 4)
    throw std::invalid_argument("transfer scenario uses four cavities");
  const EntangledPairSpec<Scalar> spec{theta};
  const PureState<Scalar> initial = entangled_pair_state(4, spec, PairPlacement::first_two);
  const auto evolver = build_sector_evolver(params, enumerate_sector(4, 1));
  const ComplexVector<Scalar> evolved = evolve_amplitudes(evolver, initial.sectors.at(1), t);
  ComplexVector<Scalar> target = ComplexVector<Scalar>::Zero(4);
  target(2) = std::sin(theta);
  target(3) = std::cos(theta);
  const std::complex<Scalar> overlap = target.dot(evolved);
  return {t, concurrence(spec), std::norm(overlap)};
}

struct PeakSearchOptions {
  double scan_step = 0.005;
  double refine_tol = 1e-10;
};

/// Grid scan plus golden-section refinement of the closed-form transfer
/// probability over [0, horizon]; ties broken towards the smallest time.
template <typename Scalar>
TransferResult<Scalar> peak_transfer_search(const ModelParams<Scalar>& params, Scalar c,
                                            Scalar horizon, const PeakSearchOptions& opts = {}) {
  if (params.cavities != 4 || std::abs(params.omega - Scalar(1)) > Scalar(1e-12) ||
      std::abs(params.hopping - Scalar(0.5)) > Scalar(1e-12))
    throw std::invalid_argument("closed-form transfer requires four cavities, omega 1, J 1/2");
  if (!(horizon > Scalar(0))) throw std::invalid_argument("horizon must be positive");

  const auto n = static_cast<long>(std::ceil(static_cast<double>(horizon) / opts.scan_step)) + 1;
  const Scalar step = horizon / Scalar(n - 1);
  long best = 0;
  Scalar best_p = -1;
  for (long i = 0; i < n; ++i) {
    const Scalar p = transfer_probability_closed_form(Scalar(i) * step, c);
    if (p > best_p) {
      best_p = p;
      best = i;
    }
  }
  const Scalar lo = std::max(Scalar(0), Scalar(best - 1) * step);
  const Scalar hi = std::min(horizon, Scalar(best + 1) * step);
  auto neg = [&](Scalar t) { return -transfer_probability_closed_form(t, c); };
  const Scalar t_peak = detail::golden_minimize(neg, lo, hi, Scalar(opts.refine_tol));
  return {t_peak, c, transfer_probability_closed_form(t_peak, c)};
}

}  // namespace cca
