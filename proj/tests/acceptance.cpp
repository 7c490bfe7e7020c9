// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include "cca/detection.hpp"
#include "cca/lindblad.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cca;

namespace {

constexpr double kPi = std::numbers::pi;
const ModelParamsd kChain3{3, 1.0, 0.5};
const ModelParamsd kChain4{4, 1.0, 0.5};

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

bool has_time_near(const DetectionReportd& report_, double expected, double tol = 1e-3) {
  for (double t : report_.times)
    if (std::abs(t - expected) < tol) return true;
  return false;
}

PureStated coherent_scenario(int which) {
  const std::complex<double> strong(0, 0.1), weak(0, 0.01);
  switch (which) {
    case 1: return weak_coherent_product<double>(3, {strong, strong, strong});
    case 2: return weak_coherent_product<double>(3, {weak, strong, weak});
    default: return weak_coherent_product<double>(3, {strong, weak, strong});
  }
}

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const double period = 2.0 * std::sqrt(2.0) * kPi;
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(2001, 0.0, 2.0 * period);
  double worst = 0;
  for (int m = 1; m <= 4; ++m) {
    const Eigen::VectorXd survived = survival_series({m, 0, 0}, kChain3, times);
    for (Eigen::Index i = 0; i < times.size(); ++i)
      worst = std::max(worst,
                       std::abs(survived(i) - closed_form_survival(m, kChain3, times(i))));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, "closed-form survival for one to four photons", worst < 1e-9 && seconds < 1.0,
         "max deviation " + fmt(worst) + ", " + fmt(seconds) + " s");
}

void criterion_2() {
  const auto period = evolution_period(build_spectral(kChain3));
  const double expected = std::sqrt(2.0) * kPi / 0.5;
  const bool ok = period && std::abs(*period - expected) < 1e-9 * expected;
  report(2, "three-cavity revival period sqrt(2) pi / J", ok,
         period ? "relative error " + fmt(std::abs(*period - expected) / expected) : "absent");
}

void criterion_3() {
  const auto psi = fock_product_state(3, {1, 0, 0});
  const Eigen::VectorXd weights = mode_weights(build_spectral(kChain3), psi.sectors.at(1));
  const double err = std::max({std::abs(weights(0) - 0.25), std::abs(weights(1) - 0.5),
                               std::abs(weights(2) - 0.25)});
  report(3, "mode weights of a single edge photon are (1/4, 1/2, 1/4)", err < 1e-12,
         "max deviation " + fmt(err));
}

void criterion_4() {
  const auto psi = fock_product_state(3, {0, 1, 0});
  const auto w = find_w_times(psi, kChain3, 1);
  const auto noon = find_noon_times(psi, kChain3, 1);
  const bool ok = has_time_near(w, 1.3511) && has_time_near(w, 3.0919) &&
                  has_time_near(noon, kPi / std::sqrt(2.0));
  report(4, "single middle photon: W at 1.3511, 3.0919; NOON at pi/sqrt2", ok,
         std::to_string(w.times.size()) + " W events, " + std::to_string(noon.times.size()) +
             " NOON events");
}

void criterion_5() {
  const auto psi = fock_product_state(3, {0, 2, 0});
  const auto w = find_w_times(psi, kChain3, 2);
  const auto noon = find_noon_times(psi, kChain3, 2);
  bool ok = has_time_near(w, 1.3511) && has_time_near(w, 3.0919) &&
            has_time_near(noon, kPi / std::sqrt(2.0));
  double value_err = 1;
  if (!noon.empty()) {
    Eigen::VectorXd at(1);
    at(0) = noon.times.front();
    const auto series =
        probability_series(psi, kChain3, at, {{2, 0, 0}, {0, 0, 2}, {1, 0, 1}});
    value_err = std::max({std::abs(series.probabilities(0, 0) - 0.25),
                          std::abs(series.probabilities(0, 1) - 0.25),
                          std::abs(series.probabilities(0, 2) - 0.5)});
    ok = ok && value_err < 1e-9;
  } else {
    ok = false;
  }
  report(5, "two middle photons: same event times, quarters and half at the NOON point", ok,
         "value deviation " + fmt(value_err));
}

void criterion_6() {
  bool ok = true;
  std::ostringstream detail;
  for (int c = 1; c <= 3; ++c) {
    const auto state = coherent_scenario(c);
    if (!has_time_near(find_w_times(state, kChain3, 3), 1.7408)) {
      ok = false;
      detail << "case" << c << " three-photon W missing; ";
    }
    if (!find_w_times(state, kChain3, 2).empty() ||
        !find_noon_times(state, kChain3, 2).empty()) {
      ok = false;
      detail << "case" << c << " spurious two-photon event; ";
    }
  }
  if (!has_time_near(find_w_times(coherent_scenario(2), kChain3, 1), 1.3612)) {
    ok = false;
    detail << "case2 single-photon W missing; ";
  }
  if (!has_time_near(find_w_times(coherent_scenario(3), kChain3, 1), 0.8679)) {
    ok = false;
    detail << "case3 single-photon W missing; ";
  }
  if (!has_time_near(find_noon_times(coherent_scenario(2), kChain3, 1), kPi / std::sqrt(2.0))) {
    ok = false;
    detail << "case2 single-photon NOON missing; ";
  }
  const auto case3_noon = find_noon_times(coherent_scenario(3), kChain3, 1);
  if (!(has_time_near(case3_noon, 0.0) && has_time_near(case3_noon, std::sqrt(2.0) * kPi))) {
    ok = false;
    detail << "case3 single-photon NOON family missing; ";
  }
  report(6, "coherent-input event table across all three scenarios", ok,
         ok ? "all rows reproduced" : detail.str());
}

void criterion_7() {
  const auto psi = coherent_scenario(1);
  const double expected = 1.0 / (1.01 * 1.01 * 1.01);
  const double period = 2.0 * std::sqrt(2.0) * kPi;
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(101, 0.0, period);
  const auto series = probability_series(psi, kChain3, times, {{0, 0, 0}});
  const double err = (series.probabilities.array() - expected).abs().maxCoeff();
  report(7, "vacuum probability is time-invariant at prod 1/(1+|a|^2)", err < 1e-10,
         "max deviation " + fmt(err));
}

void criterion_8() {
  double grid_err = 0;
  for (int it = 0; it < 50; ++it) {
    const double theta = 0.03 + (kPi / 2 - 0.06) * it / 49.0;
    for (int jt = 0; jt < 50; ++jt) {
      const double t = 120.0 * jt / 49.0;
      const auto numeric = transfer_probability_numeric(theta, kChain4, t);
      grid_err = std::max(grid_err,
                          std::abs(numeric.probability - transfer_probability_closed_form(
                                                             t, numeric.concurrence)));
    }
  }
  const auto peak = peak_transfer_search(kChain4, 1.0, 120.0);
  const auto flat = peak_transfer_search(kChain4, 0.0, 300.0);
  const bool ok = grid_err < 1e-9 && std::abs(peak.t - 106.7957) < 1e-3 &&
                  peak.probability >= 0.9999 && flat.probability <= 0.8 + 1e-6;
  report(8, "transfer: grid match, peak near 106.7957 above 0.9999, capped at 0.8 without "
            "entanglement",
         ok,
         "grid deviation " + fmt(grid_err) + ", peak t " + fmt(peak.t) + ", p " +
             fmt(peak.probability) + ", C=0 max " + fmt(flat.probability));
}

void criterion_9() {
  double worst = 0;
  for (int ic = 0; ic <= 100; ++ic) {
    const double c = ic / 100.0;
    const double reference = 0.9998715913626225 * (0.00008571750278695456 + c * c);
    worst = std::max(worst,
                     std::abs(transfer_probability_closed_form(106.7957, c) - reference));
  }
  report(9, "transfer slice at t = 106.7957 follows the quadratic in C", worst < 1e-9,
         "max deviation " + fmt(worst));
}

void criterion_10() {
  const double theta = 0.9;
  IntegrationOptions opts;
  opts.sample_stride = 100;
  const auto traj = integrate(initial_density(theta, 3), kChain3, LossParamsd{0.0}, 100.0, opts);

  const auto evolver = build_sector_evolver(kChain3, enumerate_sector(3, 1));
  Eigen::VectorXcd start(3);
  start << std::sin(theta), std::cos(theta), 0.0;

  double population_err = 0, trace_err = 0, herm_err = 0, min_eig = 1;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Eigen::VectorXcd amp = evolve_amplitudes(evolver, start, traj.times[i]);
    population_err = std::max(
        population_err,
        (traj.densities[i].site_populations() - amp.cwiseAbs2()).cwiseAbs().maxCoeff());
    trace_err = std::max(trace_err, traj.densities[i].trace_error());
    herm_err = std::max(herm_err, hermiticity_error(traj.densities[i].rho));
    min_eig = std::min(min_eig, traj.densities[i].min_eigenvalue());
  }
  const bool ok =
      population_err < 1e-8 && trace_err < 1e-8 && herm_err < 1e-10 && min_eig > -1e-8;
  report(10, "lossless master equation reproduces unitary populations to 1e-8 up to t = 100",
         ok,
         "population deviation " + fmt(population_err) + ", trace " + fmt(trace_err) +
             ", hermiticity " + fmt(herm_err) + ", min eigenvalue " + fmt(min_eig));
}

void criterion_11() {
  std::vector<double> thetas;
  for (int i = 0; i < 181; ++i) thetas.push_back(kPi / 2 * i / 180.0);
  const std::vector<double> times{10.0, 100.0};
  const auto sweep = dissipative_transfer_sweep(kChain3, LossParamsd{0.1}, thetas, times);

  Eigen::Index arg10 = 0, arg100 = 0;
  const double max10 = sweep.probabilities.col(0).maxCoeff(&arg10);
  const double max100 = sweep.probabilities.col(1).maxCoeff(&arg100);
  const double step = kPi / 2 / 180.0;
  const bool ok = std::abs(thetas[static_cast<std::size_t>(arg10)] - kPi / 4) < 1.5 * step &&
                  std::abs(thetas[static_cast<std::size_t>(arg100)] - kPi / 4) < 1.5 * step &&
                  max10 > max100;
  report(11, "lossy transfer peaks at theta = pi/4 and degrades from t = 10 to t = 100", ok,
         "argmax " + fmt(thetas[static_cast<std::size_t>(arg10)]) + " / " +
             fmt(thetas[static_cast<std::size_t>(arg100)]) + ", max " + fmt(max10) + " / " +
             fmt(max100));
}

void criterion_12() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dist(0.0, 25.0);
  double worst = 0;
  for (int n = 2; n <= 4; ++n) {
    const ModelParamsd params{n, 1.0, 0.5};
    const auto spec = build_spectral(params);
    for (int total = 1; total <= 3; ++total) {
      const FockBasis basis = enumerate_sector(n, total);
      const auto evolver = build_sector_evolver(params, basis);
      for (int rep = 0; rep < 100; ++rep) {
        const double t = dist(rng);
        for (int col = 0; col < basis.dim(); ++col) {
          Eigen::VectorXcd start = Eigen::VectorXcd::Zero(basis.dim());
          start(col) = 1.0;
          const Eigen::VectorXcd evolved = evolve_amplitudes(evolver, start, t);
          for (int row = 0; row < basis.dim(); ++row) {
            const auto amp =
                multinomial_amplitude_oracle(basis.states[col], basis.states[row], spec, t);
            worst = std::max(worst, std::abs(amp - evolved(row)));
          }
        }
      }
    }
  }
  report(12, "multinomial amplitude route agrees with eigendecomposition evolution", worst < 1e-9,
         "max deviation " + fmt(worst));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (failures == 0)
    std::printf("all 12 criteria passed\n");
  else
    std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
