#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cca/detection.hpp"
#include "cca/lindblad.hpp"

#include <numbers>
#include <random>

using namespace cca;
using std::complex;

namespace {
const ModelParamsd kChain3{3, 1.0, 0.5};
constexpr double kPi = std::numbers::pi;

// In this truncated subspace the excited block evolves in closed form,
// rho_ee(t) = exp(-gamma t) U(t) rho_ee(0) U(t)^dag, which makes an exact
// oracle for the integrator.
double closed_form_transfer(double theta, const ModelParamsd& params, double gamma, double t) {
  const int n = params.cavities;
  const Eigen::MatrixXcd u = single_particle_propagator(build_spectral(params), t);
  Eigen::VectorXcd start = Eigen::VectorXcd::Zero(n);
  start(0) = std::sin(theta);
  start(1) = std::cos(theta);
  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(n);
  target(n - 2) = std::sin(theta);
  target(n - 1) = std::cos(theta);
  return std::exp(-gamma * t) * std::norm(target.dot(u * start));
}

}  // namespace

TEST_CASE("initial density of the symmetric pair") {
  const auto rho = initial_density(kPi / 4, 3);
  REQUIRE(rho.rho.rows() == 4);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  expected(1, 1) = expected(1, 2) = expected(2, 1) = expected(2, 2) = 0.5;
  CHECK((rho.rho - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("initial density limits and trace") {
  const auto rho = initial_density(1e-12, 3);
  Eigen::Vector4d diag = rho.rho.diagonal().real();
  CHECK(diag(2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(diag(0) == 0.0);
  CHECK(diag(1) == doctest::Approx(0.0).epsilon(1e-20));

  for (double theta : {0.1, 0.7, 1.3}) {
    const auto r = initial_density(theta, 5);
    CHECK(std::abs(r.rho.trace() - complex<double>(1)) < 1e-14);
    CHECK(is_hermitian(r.rho));
  }
  CHECK_THROWS_AS(initial_density(0.3, 1), std::invalid_argument);
}

TEST_CASE("rhs without loss is a traceless commutator") {
  const auto rho = initial_density(0.6, 3);
  const auto rhs = lindblad_rhs(rho, kChain3, LossParamsd{0.0});
  CHECK(std::abs(rhs.trace()) < 1e-15);
  const Eigen::MatrixXcd h = truncated_hamiltonian(kChain3);
  const Eigen::MatrixXcd expected = complex<double>(0, -1) * (h * rho.rho - rho.rho * h);
  CHECK((rhs - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("loss drains a populated site into the vacuum at rate gamma") {
  DensityMatrixd rho{3, Eigen::MatrixXcd::Zero(4, 4)};
  rho.rho(1, 1) = 1.0;  // site-1 excitation
  const double gamma = 0.37;
  const auto rhs = lindblad_rhs(rho, kChain3, LossParamsd{gamma});
  CHECK(rhs(0, 0).real() == doctest::Approx(gamma).epsilon(1e-14));
  CHECK(rhs(1, 1).real() == doctest::Approx(-gamma).epsilon(1e-14));
  CHECK(std::abs(rhs(2, 2)) < 1e-15);
  CHECK(std::abs(rhs.trace()) < 1e-15);
}

TEST_CASE("rhs is traceless for random Hermitian input") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXcd m(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = complex<double>(dist(rng), dist(rng));
    DensityMatrixd rho{3, (m + m.adjoint()) / 2};
    const auto rhs = lindblad_rhs(rho, kChain3, LossParamsd{0.25});
    CHECK(std::abs(rhs.trace()) < 1e-14);
    CHECK(is_hermitian(rhs, 1e-14));
  }
}

TEST_CASE("zero time returns the initial density") {
  const auto rho0 = initial_density(0.8, 3);
  const auto traj = integrate(rho0, kChain3, LossParamsd{0.1}, 0.0);
  REQUIRE(traj.times.size() == 1);
  CHECK((traj.final_density().rho - rho0.rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed channels reproduce unitary populations") {
  const auto rho0 = initial_density(0.9, 3);
  IntegrationOptions opts;
  opts.sample_stride = 500;
  const auto traj = integrate(rho0, kChain3, LossParamsd{0.0}, 20.0, opts);

  const auto evolver = build_sector_evolver(kChain3, enumerate_sector(3, 1));
  Eigen::VectorXcd start(3);
  start << std::sin(0.9), std::cos(0.9), 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Eigen::VectorXcd amp = evolve_amplitudes(evolver, start, traj.times[i]);
    const Eigen::VectorXd pops = traj.densities[i].site_populations();
    CHECK((pops - amp.cwiseAbs2()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(traj.densities[i].rho(0, 0).real() == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("decoupled cavities decay exponentially") {
  const ModelParamsd uncoupled{3, 1.0, 0.0};
  const auto rho0 = initial_density(0.7, 3);
  const double gamma = 0.1;
  IntegrationOptions opts;
  opts.sample_stride = 1000;
  const auto traj = integrate(rho0, uncoupled, LossParamsd{gamma}, 15.0, opts);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double decay = std::exp(-gamma * traj.times[i]);
    const Eigen::VectorXd pops = traj.densities[i].site_populations();
    CHECK(pops(0) == doctest::Approx(std::pow(std::sin(0.7), 2) * decay).epsilon(1e-9));
    CHECK(pops(1) == doctest::Approx(std::pow(std::cos(0.7), 2) * decay).epsilon(1e-9));
    CHECK(pops(2) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("integrator matches the exact lossy solution") {
  for (double theta : {0.4, kPi / 4, 1.1}) {
    for (double t : {1.0, 10.0}) {
      const double numeric =
          dissipative_transfer_probability(theta, kChain3, LossParamsd{0.1}, t);
      CHECK(numeric ==
            doctest::Approx(closed_form_transfer(theta, kChain3, 0.1, t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("trajectory invariants hold under loss") {
  const auto rho0 = initial_density(1.0, 3);
  IntegrationOptions opts;
  opts.sample_stride = 200;
  const auto traj = integrate(rho0, kChain3, LossParamsd{0.1}, 30.0, opts);
  double previous_excitation = 1.0;
  for (const auto& d : traj.densities) {
    CHECK(d.trace_error() < 1e-8);
    CHECK(hermiticity_error(d.rho) < 1e-10);
    CHECK(d.min_eigenvalue() > -1e-8);
    const double excitation = d.site_populations().sum();
    CHECK(excitation <= previous_excitation + 1e-12);
    previous_excitation = excitation;
  }
}

TEST_CASE("total excitation is conserved without loss") {
  const auto rho0 = initial_density(0.5, 3);
  IntegrationOptions opts;
  opts.sample_stride = 500;
  const auto traj = integrate(rho0, kChain3, LossParamsd{0.0}, 10.0, opts);
  for (const auto& d : traj.densities)
    CHECK(d.site_populations().sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coarse steps trip the trace guard") {
  IntegrationOptions opts;
  opts.dt = 2.5;  // RK4 is unstable once |H| dt is large
  CHECK_THROWS_AS(integrate(initial_density(0.8, 3), kChain3, LossParamsd{0.3}, 50.0, opts),
                  trace_drift_error);
}

TEST_CASE("lossless four-cavity transfer reproduces the closed form at unit concurrence") {
  const ModelParamsd chain4{4, 1.0, 0.5};
  for (double t : {5.0, 20.0}) {
    const double p = dissipative_transfer_probability(kPi / 4, chain4, LossParamsd{0.0}, t);
    CHECK(p == doctest::Approx(transfer_probability_closed_form(t, 1.0)).epsilon(1e-8));
  }
}

TEST_CASE("transfer sweep matches single-shot probabilities and peaks at pi/4") {
  const LossParamsd loss{0.1};
  const std::vector<double> thetas{0.2, 0.5, kPi / 4, 1.0, 1.35};
  const std::vector<double> times{10.0};
  const auto sweep = dissipative_transfer_sweep(kChain3, loss, thetas, times);

  Eigen::Index argmax = 0;
  sweep.probabilities.col(0).maxCoeff(&argmax);
  CHECK(thetas[static_cast<std::size_t>(argmax)] == doctest::Approx(kPi / 4));

  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double direct = dissipative_transfer_probability(thetas[i], kChain3, loss, 10.0);
    CHECK(sweep.probabilities(static_cast<Eigen::Index>(i), 0) ==
          doctest::Approx(direct).epsilon(1e-10));
  }

  CHECK(sweep.max_trace_error < 1e-8);
  CHECK(sweep.max_hermiticity_error < 1e-10);
  CHECK(sweep.min_eigenvalue > -1e-8);
}

TEST_CASE("transmission degrades with time under loss") {
  const LossParamsd loss{0.1};
  const std::vector<double> thetas{kPi / 4};
  const std::vector<double> times{10.0, 100.0};
  const auto sweep = dissipative_transfer_sweep(kChain3, loss, thetas, times);
  CHECK(sweep.probabilities(0, 0) > sweep.probabilities(0, 1));
}

TEST_CASE("integration validation") {
  const auto rho0 = initial_density(0.4, 3);
  CHECK_THROWS_AS(integrate(rho0, kChain3, LossParamsd{-0.1}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate(rho0, kChain3, LossParamsd{0.1}, -1.0), std::invalid_argument);
  IntegrationOptions bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(integrate(rho0, kChain3, LossParamsd{0.1}, 1.0, bad), std::invalid_argument);
  CHECK_THROWS_AS(lindblad_rhs(rho0, ModelParamsd{4, 1.0, 0.5}, LossParamsd{0.1}),
                  std::invalid_argument);
}
