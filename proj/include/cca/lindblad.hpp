#pragma once

// Photon-loss master equation restricted to the vacuum + single-excitation
// subspace, which is closed under both the hopping Hamiltonian and the loss
// channels for single-excitation inputs. Basis order: |vacuum>, |site 1>,
// ..., |site n>, giving (n+1) x (n+1) densities.
//
//   d rho / dt = -i [H, rho] + gamma sum_i D(a_i) rho,
//   D(c) rho   = c rho c^dag - (c^dag c rho + rho c^dag c) / 2,
//
// with a_i mapping the site-i excitation to the vacuum. Integration is
// fixed-step classical Runge-Kutta; a trace-drift guard aborts runs whose
// step size is too coarse.

#include "cca/evolution.hpp"

#include <cmath>
#include <vector>

namespace cca {

template <typename Scalar>
struct LossParams {
  Scalar gamma = 0;  // uniform cavity damping rate, units of omega

  void validate() const {
    if (!(gamma >= Scalar(0))) throw std::invalid_argument("gamma must be non-negative");
  }
};
using LossParamsd = LossParams<double>;

template <typename Scalar>
struct DensityMatrix {
  int cavities = 0;
  ComplexMatrix<Scalar> rho;  // (cavities + 1) x (cavities + 1), Hermitian, unit trace

  Scalar trace_error() const { return std::abs(rho.trace() - std::complex<Scalar>(1)); }

  Scalar min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(rho);
    return solver.eigenvalues().minCoeff();
  }

  /// Excited-state populations only, ordered by site.
  DenseVector<Scalar> site_populations() const {
    const DenseVector<Scalar> diag = rho.diagonal().real();
    return diag.tail(cavities);
  }
};
using DensityMatrixd = DensityMatrix<double>;

/// Pure density of sin(theta)|site 1> + cos(theta)|site 2>; vacuum empty.
template <typename Scalar>
DensityMatrix<Scalar> initial_density(Scalar theta, int cavities) {
  if (cavities < 2) throw std::invalid_argument("need at least two cavities");
  ComplexVector<Scalar> ket = ComplexVector<Scalar>::Zero(cavities + 1);
  ket(1) = std::sin(theta);
  ket(2) = std::cos(theta);
  return {cavities, ket * ket.adjoint()};
}

/// Hamiltonian on the truncated basis: zero on the vacuum, hopping chain on
/// the excited block.
template <typename Scalar>
ComplexMatrix<Scalar> truncated_hamiltonian(const ModelParams<Scalar>& params) {
  const int n = params.cavities;
  ComplexMatrix<Scalar> h = ComplexMatrix<Scalar>::Zero(n + 1, n + 1);
  h.block(1, 1, n, n) = single_particle_hamiltonian(params).template cast<std::complex<Scalar>>();
  return h;
}

namespace detail {

/// -i[H, rho] + gamma sum_i D(a_i) rho on the truncated basis. The loss
/// channels drain every excited population into the vacuum entry and damp
/// coherences involving an excited state at rate gamma / 2.
template <typename Scalar>
class MasterEquationRhs {
 public:
  MasterEquationRhs(const ModelParams<Scalar>& params, const LossParams<Scalar>& loss)
      : ham_(truncated_hamiltonian(params)), gamma_(loss.gamma), n_(params.cavities) {}

  ComplexMatrix<Scalar> operator()(const ComplexMatrix<Scalar>& rho) const {
    ComplexMatrix<Scalar> out = std::complex<Scalar>(0, -1) * (ham_ * rho - rho * ham_);
    if (gamma_ > Scalar(0)) {
      // sum_i a_i rho a_i^dag = (sum of excited populations) |vac><vac|
      out(0, 0) += gamma_ * rho.diagonal().tail(n_).sum();
      // -(gamma/2) {P_exc, rho}
      const Scalar half = gamma_ / Scalar(2);
      out.row(0).tail(n_) -= half * rho.row(0).tail(n_);
      out.col(0).tail(n_) -= half * rho.col(0).tail(n_);
      out.block(1, 1, n_, n_) -= gamma_ * rho.block(1, 1, n_, n_);
    }
    return out;
  }

 private:
  ComplexMatrix<Scalar> ham_;
  Scalar gamma_;
  int n_;
};

}  // namespace detail

template <typename Scalar>
ComplexMatrix<Scalar> lindblad_rhs(const DensityMatrix<Scalar>& state,
                                   const ModelParams<Scalar>& params,
                                   const LossParams<Scalar>& loss) {
  params.validate();
  loss.validate();
  const int n = params.cavities;
  if (state.cavities != n || state.rho.rows() != n + 1 || state.rho.cols() != n + 1)
    throw std::invalid_argument("density dimension does not match cavity count");
  return detail::MasterEquationRhs<Scalar>(params, loss)(state.rho);
}

struct IntegrationOptions {
  double dt = 1e-3;               // nominal step; shrunk uniformly to land on t_final
  int sample_stride = 100;        // trajectory sampling interval, in steps
  double trace_drift_tol = 1e-8;  // abort threshold on |tr rho - 1|
};

template <typename Scalar>
struct Trajectory {
  std::vector<Scalar> times;
  std::vector<DensityMatrix<Scalar>> densities;

  const DensityMatrix<Scalar>& final_density() const { return densities.back(); }
};
using Trajectoryd = Trajectory<double>;

namespace detail {

template <typename Scalar, typename Rhs>
void rk4_step(ComplexMatrix<Scalar>& rho, Scalar h, const Rhs& rhs) {
  const ComplexMatrix<Scalar> k1 = rhs(rho);
  const ComplexMatrix<Scalar> k2 = rhs(rho + (h / Scalar(2)) * k1);
  const ComplexMatrix<Scalar> k3 = rhs(rho + (h / Scalar(2)) * k2);
  const ComplexMatrix<Scalar> k4 = rhs(rho + h * k3);
  rho += (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

}  // namespace detail

/// Fixed-step fourth-order integration of the master equation, sampling the
/// trajectory every `sample_stride` steps (plus the endpoint). Throws
/// trace_drift_error when |tr rho - 1| exceeds the configured tolerance.
template <typename Scalar>
Trajectory<Scalar> integrate(const DensityMatrix<Scalar>& rho0, const ModelParams<Scalar>& params,
                             const LossParams<Scalar>& loss, Scalar t_final,
                             const IntegrationOptions& opts = {}) {
  params.validate();
  loss.validate();
  if (!(t_final >= Scalar(0))) throw std::invalid_argument("t_final must be non-negative");
  if (!(opts.dt > 0)) throw std::invalid_argument("dt must be positive");

  Trajectory<Scalar> traj;
  traj.times.push_back(Scalar(0));
  traj.densities.push_back(rho0);
  if (t_final == Scalar(0)) return traj;

  const auto steps =
      static_cast<long>(std::ceil(static_cast<double>(t_final) / opts.dt - 1e-12));
  const Scalar h = t_final / Scalar(steps);
  const detail::MasterEquationRhs<Scalar> rhs(params, loss);

  ComplexMatrix<Scalar> rho = rho0.rho;
  for (long step = 1; step <= steps; ++step) {
    detail::rk4_step(rho, h, rhs);
    const Scalar drift = std::abs(rho.trace() - std::complex<Scalar>(1));
    if (drift > Scalar(opts.trace_drift_tol))
      throw trace_drift_error("trace drift " + std::to_string(static_cast<double>(drift)) +
                              " at t = " + std::to_string(static_cast<double>(Scalar(step) * h)) +
                              "; reduce the integration step");
    if (step % opts.sample_stride == 0 || step == steps) {
      traj.times.push_back(Scalar(step) * h);
      traj.densities.push_back({rho0.cavities, rho});
    }
  }
  return traj;
}

/// <Phi| rho(t) |Phi> with |Phi> = sin(theta)|site n-1> + cos(theta)|site n>:
/// probability that the entangled pair has moved to the last two cavities.
template <typename Scalar>
Scalar dissipative_transfer_probability(Scalar theta, const ModelParams<Scalar>& params,
                                        const LossParams<Scalar>& loss, Scalar t,
                                        const IntegrationOptions& opts = {}) {
  const int n = params.cavities;
  const auto traj = integrate(initial_density(theta, n), params, loss, t, opts);
  ComplexVector<Scalar> target = ComplexVector<Scalar>::Zero(n + 1);
  target(n - 1) = std::sin(theta);
  target(n) = std::cos(theta);
  return (target.adjoint() * traj.final_density().rho * target).value().real();
}

template <typename Scalar>
struct TransferSweep {
  std::vector<Scalar> thetas;
  std::vector<Scalar> times;
  DenseMatrix<Scalar> probabilities;  // thetas x times
  Scalar max_trace_error = 0;
  Scalar max_hermiticity_error = 0;
  Scalar min_eigenvalue = 1;
};
using TransferSweepd = TransferSweep<double>;

/// Transfer probability over a (theta, time) grid. The master equation is
/// linear, so the sweep integrates three elementary Hermitian initial
/// conditions once and assembles every theta from them:
/// rho_theta(0) = sin^2 E11 + cos^2 E22 + sin cos (E12 + E21).
template <typename Scalar>
TransferSweep<Scalar> dissipative_transfer_sweep(const ModelParams<Scalar>& params,
                                                 const LossParams<Scalar>& loss,
                                                 const std::vector<Scalar>& thetas,
                                                 const std::vector<Scalar>& times,
                                                 const IntegrationOptions& opts = {}) {
  const int n = params.cavities;
  if (times.empty() || thetas.empty()) throw std::invalid_argument("empty sweep grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) throw std::invalid_argument("sweep times must increase");

  const int dim = n + 1;
  auto elementary = [&](int a, int b) {
    ComplexMatrix<Scalar> m = ComplexMatrix<Scalar>::Zero(dim, dim);
    m(a, b) = std::complex<Scalar>(1);
    return m;
  };
  std::vector<ComplexMatrix<Scalar>> seeds{elementary(1, 1), elementary(2, 2),
                                           elementary(1, 2) + elementary(2, 1)};

  // integrate each seed across the requested sample times
  const detail::MasterEquationRhs<Scalar> rhs(params, loss);
  std::vector<std::vector<ComplexMatrix<Scalar>>> sampled(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    ComplexMatrix<Scalar> rho = seeds[s];
    const std::complex<Scalar> seed_trace = seeds[s].trace();
    Scalar current = 0;
    for (Scalar target : times) {
      const Scalar span = target - current;
      if (span > Scalar(0)) {
        const auto steps =
            static_cast<long>(std::ceil(static_cast<double>(span) / opts.dt - 1e-12));
        const Scalar h = span / Scalar(steps);
        for (long step = 0; step < steps; ++step) detail::rk4_step(rho, h, rhs);
        current = target;
      }
      // the flow preserves the trace of any seed matrix
      if (std::abs(rho.trace() - seed_trace) > Scalar(opts.trace_drift_tol))
        throw trace_drift_error("trace drift " +
                                std::to_string(static_cast<double>(std::abs(rho.trace() - seed_trace))) +
                                " at t = " + std::to_string(static_cast<double>(current)) +
                                "; reduce the integration step");
      sampled[s].push_back(rho);
    }
  }

  TransferSweep<Scalar> sweep;
  sweep.thetas = thetas;
  sweep.times = times;
  sweep.probabilities =
      DenseMatrix<Scalar>(static_cast<Eigen::Index>(thetas.size()),
                          static_cast<Eigen::Index>(times.size()));
  for (std::size_t it = 0; it < times.size(); ++it) {
    for (std::size_t ia = 0; ia < thetas.size(); ++ia) {
      const Scalar sin_t = std::sin(thetas[ia]);
      const Scalar cos_t = std::cos(thetas[ia]);
      ComplexMatrix<Scalar> rho = sin_t * sin_t * sampled[0][it] +
                                  cos_t * cos_t * sampled[1][it] +
                                  sin_t * cos_t * sampled[2][it];
      ComplexVector<Scalar> target = ComplexVector<Scalar>::Zero(dim);
      target(n - 1) = sin_t;
      target(n) = cos_t;
      sweep.probabilities(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(it)) =
          (target.adjoint() * rho * target).value().real();
      sweep.max_trace_error =
          std::max(sweep.max_trace_error, std::abs(rho.trace() - std::complex<Scalar>(1)));
      sweep.max_hermiticity_error =
          std::max(sweep.max_hermiticity_error, Scalar(hermiticity_error(rho)));
      Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> solver(rho);
      sweep.min_eigenvalue = std::min(sweep.min_eigenvalue, solver.eigenvalues().minCoeff());
    }
  }
  return sweep;
}

}  // namespace cca
