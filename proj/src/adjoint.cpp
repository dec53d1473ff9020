#include "sono/adjoint.hpp"

#include <algorithm>
#include <string>

#include "sono/kernels.hpp"

namespace sono {

Rhs Dynamics::as_rhs() const {
  return [this](ConstSpan z, double t, MutSpan out) { eval(z, t, out); };
}

SecondOrderDynamics::SecondOrderDynamics(const Mlp& field)
    : field_(&field), dim_(field.output_dim()) {
  if (field.input_dim() != 2 * dim_ + 1) {
    throw Error(ErrorCode::ShapeMismatch, "acceleration network must map 2d+1 inputs to d outputs");
  }
}

void SecondOrderDynamics::eval(ConstSpan z, double t, MutSpan dz) const {
  stacked_rhs(*field_, z, t, dz);
}

void SecondOrderDynamics::vjp(ConstSpan z, double t, ConstSpan c, MutSpan dz, MutSpan grad_z,
                              MutSpan grad_params, double alpha) const {
  const std::size_t d = dim_;
  if (z.size() != 2 * d || c.size() != 2 * d || grad_z.size() != 2 * d) {
    throw Error(ErrorCode::ShapeMismatch, "stacked vjp expects length-2d vectors");
  }
  Vector input(2 * d + 1);
  std::copy(z.begin(), z.end(), input.begin());
  input[2 * d] = t;
  MlpTape tape;
  const Vector accel = mlp_forward(*field_, input, &tape);
  if (!dz.empty()) {
    std::copy(z.begin() + d, z.end(), dz.begin());
    std::copy(accel.begin(), accel.end(), dz.begin() + d);
  }
  // d[v, S]/d[x, v] = [[0, I], [dS/dx, dS/dv]]
  Vector grad_in(2 * d + 1);
  mlp_backward(*field_, tape, c.subspan(d, d), grad_in, grad_params, alpha);
  for (std::size_t i = 0; i < d; ++i) {
    grad_z[i] = grad_in[i];
    grad_z[d + i] = c[i] + grad_in[d + i];
  }
}

TerminalLoss linear_terminal_loss(Vector cotangent) {
  return [c = std::move(cotangent)](ConstSpan z_end, MutSpan grad) {
    require_same_dim(c.size(), z_end.size(), "linear_terminal_loss");
    std::copy(c.begin(), c.end(), grad.begin());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * z_end[i];
    return s;
  };
}

void augmented_rhs(const Dynamics& dyn, ConstSpan aug, double t, MutSpan out) {
  const std::size_t n = dyn.state_dim();
  const std::size_t p = dyn.param_count();
  if (aug.size() != 2 * n + p || out.size() != aug.size()) {
    throw Error(ErrorCode::ShapeMismatch, "augmented state length " + std::to_string(aug.size()) +
                                              ", expected " + std::to_string(2 * n + p));
  }
  MutSpan dz = out.subspan(0, n);
  MutSpan da = out.subspan(n, n);
  MutSpan dg = out.subspan(2 * n, p);
  std::fill(dg.begin(), dg.end(), 0.0);
  dyn.vjp(aug.subspan(0, n), t, aug.subspan(n, n), dz, da, dg, -1.0);
  for (double& x : da) x = -x;
}

Vector augmented_rhs(const Dynamics& dyn, ConstSpan aug, double t) {
  Vector out(aug.size());
  augmented_rhs(dyn, aug, t, out);
  return out;
}

GradientReport grad_adjoint_from_end(const Dynamics& dyn, ConstSpan z_end,
                                     ConstSpan loss_grad_at_end, const SolverConfig& config) {
  config.validate();
  const std::size_t n = dyn.state_dim();
  const std::size_t p = dyn.param_count();
  require_same_dim(z_end.size(), n, "grad_adjoint z_end");
  require_same_dim(loss_grad_at_end.size(), n, "grad_adjoint loss gradient");

  Vector aug(2 * n + p, 0.0);
  std::copy(z_end.begin(), z_end.end(), aug.begin());
  std::copy(loss_grad_at_end.begin(), loss_grad_at_end.end(), aug.begin() + n);

  const Rhs rhs = [&dyn](ConstSpan s, double t, MutSpan out) { augmented_rhs(dyn, s, t, out); };
  const Vector back = integrate_span(rhs, aug, config.t_end, config.t0, config.steps, config.method);

  GradientReport report;
  report.z_end.assign(z_end.begin(), z_end.end());
  report.z0_reconstructed.assign(back.begin(), back.begin() + n);
  report.grad_z0.assign(back.begin() + n, back.begin() + 2 * n);
  report.grad_params.assign(back.begin() + 2 * n, back.end());
  return report;
}

GradientReport grad_adjoint(const Dynamics& dyn, ConstSpan z0, const TerminalLoss& loss,
                            const SolverConfig& config) {
  const Vector z_end = integrate(dyn.as_rhs(), z0, config);
  Vector g(z_end.size());
  const double value = loss(z_end, g);
  GradientReport report = grad_adjoint_from_end(dyn, z_end, g, config);
  report.loss = value;
  return report;
}

GradientReport grad_discrete(const Dynamics& dyn, ConstSpan z0, const TerminalLoss& loss,
                             const SolverConfig& config) {
  config.validate();
  if (config.method != Method::Euler && config.method != Method::Rk4) {
    throw Error(ErrorCode::UnsupportedMethod, "discrete gradients support euler and rk4 only");
  }
  const std::size_t n = dyn.state_dim();
  require_same_dim(z0.size(), n, "grad_discrete z0");
  const auto& k = kernels::active();
  const int steps = config.steps;
  const double h = config.step_size();
  const bool rk4 = config.method == Method::Rk4;
  const std::size_t stages = rk4 ? 4 : 1;

  // stage_inputs[i * stages + s] is the state fed to stage s of step i.
  std::vector<Vector> stage_inputs;
  stage_inputs.reserve(static_cast<std::size_t>(steps) * stages);
  Vector z(z0.begin(), z0.end());
  Vector k1(n), k2(n), k3(n), k4(n);
  for (int i = 0; i < steps; ++i) {
    const double t = config.t0 + i * h;
    if (!rk4) {
      stage_inputs.push_back(z);
      dyn.eval(z, t, k1);
      k.axpy(z.data(), h, k1.data(), n);
    } else {
      Vector s = z;
      stage_inputs.push_back(s);
      dyn.eval(s, t, k1);
      s = z;
      k.axpy(s.data(), 0.5 * h, k1.data(), n);
      stage_inputs.push_back(s);
      dyn.eval(s, t + 0.5 * h, k2);
      s = z;
      k.axpy(s.data(), 0.5 * h, k2.data(), n);
      stage_inputs.push_back(s);
      dyn.eval(s, t + 0.5 * h, k3);
      s = z;
      k.axpy(s.data(), h, k3.data(), n);
      stage_inputs.push_back(s);
      dyn.eval(s, t + h, k4);
      k.axpy(z.data(), h / 6.0, k1.data(), n);
      k.axpy(z.data(), h / 3.0, k2.data(), n);
      k.axpy(z.data(), h / 3.0, k3.data(), n);
      k.axpy(z.data(), h / 6.0, k4.data(), n);
    }
    if (!all_finite(z)) {
      throw Error(ErrorCode::NonFiniteState, "forward pass diverged at step " + std::to_string(i));
    }
  }

  GradientReport report;
  report.z_end = z;
  Vector zbar(n);
  report.loss = loss(z, zbar);
  report.grad_params.assign(dyn.param_count(), 0.0);

  Vector u(n);
  for (int i = steps; i-- > 0;) {
    const double t = config.t0 + i * h;
    const Vector* in = &stage_inputs[static_cast<std::size_t>(i) * stages];
    if (!rk4) {
      dyn.vjp(in[0], t, zbar, {}, u, report.grad_params, h);
      k.axpy(zbar.data(), h, u.data(), n);
      continue;
    }
    Vector k1b(n), k2b(n), k3b(n), k4b(n);
    for (std::size_t j = 0; j < n; ++j) {
      k1b[j] = h / 6.0 * zbar[j];
      k2b[j] = h / 3.0 * zbar[j];
      k3b[j] = h / 3.0 * zbar[j];
      k4b[j] = h / 6.0 * zbar[j];
    }
    Vector next = zbar;
    dyn.vjp(in[3], t + h, k4b, {}, u, report.grad_params, 1.0);
    k.axpy(next.data(), 1.0, u.data(), n);
    k.axpy(k3b.data(), h, u.data(), n);
    dyn.vjp(in[2], t + 0.5 * h, k3b, {}, u, report.grad_params, 1.0);
    k.axpy(next.data(), 1.0, u.data(), n);
    k.axpy(k2b.data(), 0.5 * h, u.data(), n);
    dyn.vjp(in[1], t + 0.5 * h, k2b, {}, u, report.grad_params, 1.0);
    k.axpy(next.data(), 1.0, u.data(), n);
    k.axpy(k1b.data(), 0.5 * h, u.data(), n);
    dyn.vjp(in[0], t, k1b, {}, u, report.grad_params, 1.0);
    k.axpy(next.data(), 1.0, u.data(), n);
    zbar.swap(next);
  }
  report.grad_z0 = zbar;
  return report;
}

}  // namespace sono
