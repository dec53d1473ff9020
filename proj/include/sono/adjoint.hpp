#pragma once

/** \file adjoint.hpp
 *  \brief Gradients through a fixed-step ODE solve.
 *
 * Two independent routes:
 *
 *  - grad_adjoint: the continuous adjoint. The augmented state [z, a, g]
 *    (state, adjoint dL/dz, parameter-gradient accumulator) is integrated
 *    backwards from t_end to t0 in a single solver call using
 *        dz/dt = f(z, t)
 *        da/dt = -a^T df/dz
 *        dg/dt = -a^T df/dtheta
 *    seeded with a(t_end) = dL/dz(t_end), g(t_end) = 0. Memory is constant
 *    in the step count; z is re-integrated rather than stored.
 *
 *  - grad_discrete: exact reverse-mode differentiation of the unrolled Euler
 *    or RK4 computation, retaining every stage input. Used as an oracle.
 */

#include <cstddef>
#include <functional>

#include "sono/linalg.hpp"
#include "sono/odeint.hpp"
#include "sono/vectorfield.hpp"

namespace sono {

/// A parameterized first-order system z' = f(z, t; theta).
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t param_count() const = 0;

  virtual void eval(ConstSpan z, double t, MutSpan dz) const = 0;

  /// grad_z = c^T df/dz (overwritten); grad_params += alpha * c^T df/dtheta.
  /// When dz is non-empty it also receives f(z, t).
  virtual void vjp(ConstSpan z, double t, ConstSpan c, MutSpan dz, MutSpan grad_z,
                   MutSpan grad_params, double alpha) const = 0;

  Rhs as_rhs() const;
};

/// The stacked system [x, v]' = [v, S(x, v, t)] over an acceleration MLP.
class SecondOrderDynamics final : public Dynamics {
 public:
  explicit SecondOrderDynamics(const Mlp& field);

  std::size_t state_dim() const override { return 2 * dim_; }
  std::size_t param_count() const override { return field_->param_count(); }
  void eval(ConstSpan z, double t, MutSpan dz) const override;
  void vjp(ConstSpan z, double t, ConstSpan c, MutSpan dz, MutSpan grad_z, MutSpan grad_params,
           double alpha) const override;

 private:
  const Mlp* field_;
  std::size_t dim_;
};

struct GradientReport {
  Vector grad_params;
  Vector grad_z0;
  double loss = 0.0;
  /// z(t_end) from the forward pass.
  Vector z_end;
  /// z(t0) as re-integrated by the backward pass (adjoint route only).
  Vector z0_reconstructed;
};

/// Scalar loss of the terminal state; writes dL/dz_end into grad.
using TerminalLoss = std::function<double(ConstSpan z_end, MutSpan grad)>;

/// L = c . z_end, so dL/dz_end = c.
TerminalLoss linear_terminal_loss(Vector cotangent);

/// Time derivative of the augmented state [z, a, g] (lengths n, n, P).
Vector augmented_rhs(const Dynamics& dyn, ConstSpan aug, double t);
void augmented_rhs(const Dynamics& dyn, ConstSpan aug, double t, MutSpan out);

/// Backward augmented solve from a known z(t_end). Uses the same method and
/// step count as the forward configuration.
GradientReport grad_adjoint_from_end(const Dynamics& dyn, ConstSpan z_end,
                                     ConstSpan loss_grad_at_end, const SolverConfig& config);

/// Forward solve, evaluate the loss, then the backward augmented solve.
GradientReport grad_adjoint(const Dynamics& dyn, ConstSpan z0, const TerminalLoss& loss,
                            const SolverConfig& config);

/// Exact gradient of the unrolled solver. Euler and RK4 only (UnsupportedMethod otherwise).
GradientReport grad_discrete(const Dynamics& dyn, ConstSpan z0, const TerminalLoss& loss,
                             const SolverConfig& config);

}  // namespace sono
