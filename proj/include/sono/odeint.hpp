#pragma once

/** \file odeint.hpp
 *  \brief Fixed-step initial value problem integrators.
 *
 * Methods: forward Euler, classical RK4, 4-step Adams-Bashforth (AB4), and
 * AB4-predicted / Adams-Moulton-corrected PECE (ABM4, one correction).
 * Multistep methods bootstrap their first three steps with RK4.
 *
 * The grid is uniform: t_i = t_from + i * h with h = (t_to - t_from) / steps.
 * Integration backwards in time (t_to < t_from) is supported internally for
 * the adjoint solve; the public SolverConfig requires t_end > t0.
 */

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <string_view>

#include "sono/linalg.hpp"
#include "sono/vectorfield.hpp"

namespace sono {

enum class Method { Euler, Rk4, Ab4, Abm4 };

std::string_view method_name(Method m) noexcept;
/// Parses euler | rk4 | ab4 | abm4. Throws InvalidArgument.
Method parse_method(std::string_view name);
bool is_multistep(Method m) noexcept;

inline constexpr int kMaxSolverSteps = 1000;

struct SolverConfig {
  Method method = Method::Rk4;
  int steps = 10;
  double t0 = 0.0;
  double t_end = 1.0;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
  double step_size() const noexcept { return (t_end - t0) / steps; }

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Right-hand side f(z, t), written into out (same length as z).
using Rhs = std::function<void(ConstSpan z, double t, MutSpan out)>;

/// Most recent derivative evaluations, newest at the back. A multistep step
/// expects the newest entry to be f at the current (z, t).
class RhsHistory {
 public:
  void push(Vector f);
  std::size_t size() const noexcept { return entries_.size(); }
  /// lag 0 is the newest entry.
  const Vector& at_lag(std::size_t lag) const { return entries_[entries_.size() - 1 - lag]; }
  void clear() noexcept { entries_.clear(); }

 private:
  std::deque<Vector> entries_;
};

/// One step of size h (may be negative). For multistep methods the history
/// must hold four entries ending at f(z, t); on return it ends at f(z_next, t + h).
/// Throws InsufficientHistory or NonFiniteState.
Vector step(const Rhs& rhs, ConstSpan z, double t, double h, Method method,
            RhsHistory* history = nullptr);

/// Integrates from config.t0 to config.t_end and returns z(t_end).
Vector integrate(const Rhs& rhs, ConstSpan z0, const SolverConfig& config);

/// Integrates over an arbitrary (possibly reversed) span with a fixed step count.
Vector integrate_span(const Rhs& rhs, ConstSpan z0, double t_from, double t_to, int steps,
                      Method method);

/// z' = [v, S(x, v, t)] for z = [x, v].
void stacked_rhs(const Mlp& field, ConstSpan z, double t, MutSpan out);
Vector stacked_rhs(const Mlp& field, ConstSpan z, double t);

}  // namespace sono
