#include "sono/odeint.hpp"

#include <string>

#include "sono/kernels.hpp"

namespace sono {

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::Euler: return "euler";
    case Method::Rk4: return "rk4";
    case Method::Ab4: return "ab4";
    case Method::Abm4: return "abm4";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "euler") return Method::Euler;
  if (name == "rk4") return Method::Rk4;
  if (name == "ab4") return Method::Ab4;
  if (name == "abm4") return Method::Abm4;
  throw Error(ErrorCode::InvalidArgument, "unknown solver '" + std::string(name) + "'");
}

bool is_multistep(Method m) noexcept { return m == Method::Ab4 || m == Method::Abm4; }

void SolverConfig::validate() const {
  if (steps < 1 || steps > kMaxSolverSteps) {
    throw Error(ErrorCode::InvalidArgument,
                "solver steps must be in [1, 1000], got " + std::to_string(steps));
  }
  if (is_multistep(method) && steps < 4) {
    throw Error(ErrorCode::InvalidArgument, "multistep solvers need at least 4 steps");
  }
  if (!(t_end > t0)) throw Error(ErrorCode::InvalidArgument, "t_end must exceed t0");
}

void RhsHistory::push(Vector f) {
  entries_.push_back(std::move(f));
  while (entries_.size() > 4) entries_.pop_front();
}

namespace {

Vector eval(const Rhs& rhs, ConstSpan z, double t) {
  Vector out(z.size());
  rhs(z, t, out);
  return out;
}

// Scratch buffers reused across steps so long integrations do not allocate.
struct Workspace {
  explicit Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n), next(n) {}
  Vector k1, k2, k3, k4, tmp, next;
};

// out = z + c * f
void offset(ConstSpan z, double c, const Vector& f, Vector& out) {
  std::copy(z.begin(), z.end(), out.begin());
  kernels::active().axpy(out.data(), c, f.data(), out.size());
}

// ws.next = RK4 step from z; k1 must already hold f(z, t).
void rk4_into(const Rhs& rhs, ConstSpan z, double t, double h, Workspace& ws) {
  const auto& k = kernels::active();
  offset(z, 0.5 * h, ws.k1, ws.tmp);
  rhs(ws.tmp, t + 0.5 * h, ws.k2);
  offset(z, 0.5 * h, ws.k2, ws.tmp);
  rhs(ws.tmp, t + 0.5 * h, ws.k3);
  offset(z, h, ws.k3, ws.tmp);
  rhs(ws.tmp, t + h, ws.k4);
  std::copy(z.begin(), z.end(), ws.next.begin());
  const std::size_t n = ws.next.size();
  k.axpy(ws.next.data(), h / 6.0, ws.k1.data(), n);
  k.axpy(ws.next.data(), h / 3.0, ws.k2.data(), n);
  k.axpy(ws.next.data(), h / 3.0, ws.k3.data(), n);
  k.axpy(ws.next.data(), h / 6.0, ws.k4.data(), n);
}

// Multistep update into ws.next from a full history ending at f(z, t).
void adams_into(const Rhs& rhs, ConstSpan z, double t, double h, Method method,
                const RhsHistory& history, Workspace& ws) {
  const auto& k = kernels::active();
  const std::size_t n = ws.next.size();
  const Vector& f0 = history.at_lag(0);
  const Vector& f1 = history.at_lag(1);
  const Vector& f2 = history.at_lag(2);
  const Vector& f3 = history.at_lag(3);
  const double c = h / 24.0;
  std::copy(z.begin(), z.end(), ws.next.begin());
  k.axpy(ws.next.data(), 55.0 * c, f0.data(), n);
  k.axpy(ws.next.data(), -59.0 * c, f1.data(), n);
  k.axpy(ws.next.data(), 37.0 * c, f2.data(), n);
  k.axpy(ws.next.data(), -9.0 * c, f3.data(), n);
  if (method == Method::Abm4) {
    rhs(ws.next, t + h, ws.k1);
    std::copy(z.begin(), z.end(), ws.next.begin());
    k.axpy(ws.next.data(), 9.0 * c, ws.k1.data(), n);
    k.axpy(ws.next.data(), 19.0 * c, f0.data(), n);
    k.axpy(ws.next.data(), -5.0 * c, f1.data(), n);
    k.axpy(ws.next.data(), c, f2.data(), n);
  }
}

void step_into(const Rhs& rhs, ConstSpan z, double t, double h, Method method,
               RhsHistory* history, Workspace& ws) {
  switch (method) {
    case Method::Euler:
      rhs(z, t, ws.k1);
      offset(z, h, ws.k1, ws.next);
      break;
    case Method::Rk4:
      rhs(z, t, ws.k1);
      rk4_into(rhs, z, t, h, ws);
      break;
    case Method::Ab4:
    case Method::Abm4:
      if (!history || history->size() < 4) {
        throw Error(ErrorCode::InsufficientHistory,
                    "multistep methods need four prior derivative evaluations");
      }
      adams_into(rhs, z, t, h, method, *history, ws);
      break;
  }
  if (!all_finite(ws.next)) {
    throw Error(ErrorCode::NonFiniteState, "non-finite state after step at t=" + std::to_string(t));
  }
}

}  // namespace

Vector step(const Rhs& rhs, ConstSpan z, double t, double h, Method method,
            RhsHistory* history) {
  Workspace ws(z.size());
  step_into(rhs, z, t, h, method, history, ws);
  if (is_multistep(method) && history) history->push(eval(rhs, ws.next, t + h));
  return ws.next;
}

Vector integrate_span(const Rhs& rhs, ConstSpan z0, double t_from, double t_to, int steps,
                      Method method) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be positive");
  const double h = (t_to - t_from) / steps;
  const bool multistep = is_multistep(method);
  Vector z(z0.begin(), z0.end());
  Workspace ws(z.size());
  RhsHistory history;
  if (multistep) history.push(eval(rhs, z, t_from));
  for (int i = 0; i < steps; ++i) {
    const double t = t_from + i * h;
    try {
      if (multistep && history.size() < 4) {
        ws.k1 = history.at_lag(0);
        rk4_into(rhs, z, t, h, ws);
        if (!all_finite(ws.next)) {
          throw Error(ErrorCode::NonFiniteState, "non-finite bootstrap state");
        }
      } else {
        step_into(rhs, z, t, h, method, &history, ws);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteState) throw;
      throw Error(ErrorCode::NonFiniteState,
                  "integration diverged at step " + std::to_string(i) + " of " +
                      std::to_string(steps) + " (t=" + std::to_string(t) + ")");
    }
    z.swap(ws.next);
    if (multistep) history.push(eval(rhs, z, t + h));
  }
  return z;
}

Vector integrate(const Rhs& rhs, ConstSpan z0, const SolverConfig& config) {
  config.validate();
  return integrate_span(rhs, z0, config.t0, config.t_end, config.steps, config.method);
}

void stacked_rhs(const Mlp& field, ConstSpan z, double t, MutSpan out) {
  if (z.size() % 2 != 0 || out.size() != z.size()) {
    throw Error(ErrorCode::ShapeMismatch, "stacked state must have even length");
  }
  const std::size_t d = z.size() / 2;
  if (field.input_dim() != 2 * d + 1 || field.output_dim() != d) {
    throw Error(ErrorCode::ShapeMismatch, "field network does not match state dimension");
  }
  Vector input(2 * d + 1);
  std::copy(z.begin(), z.end(), input.begin());
  input[2 * d] = t;
  const Vector accel = mlp_forward(field, input);
  std::copy(z.begin() + d, z.end(), out.begin());
  std::copy(accel.begin(), accel.end(), out.begin() + d);
}

Vector stacked_rhs(const Mlp& field, ConstSpan z, double t) {
  Vector out(z.size());
  stacked_rhs(field, z, t, out);
  return out;
}

}  // namespace sono
