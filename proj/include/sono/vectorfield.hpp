#pragma once

/** \file vectorfield.hpp
 *  \brief Learnable dynamics for the second-order feature refiner.
 *
 * The acceleration field S(x, v, t) is an MLP over the concatenation
 * [x, v, t] (length 2d+1) returning a length-d acceleration. The velocity
 * initializer g(x) is an MLP from R^d to R^d. Hidden layers use tanh, the
 * output layer is affine. Gradients are hand-derived layer-wise
 * vector-Jacobian products; there is no tape autodiff.
 *
 * Flat parameter order is layer by layer, each layer's weight (row-major,
 * out x in) followed by its bias.
 */

#include <cstddef>
#include <vector>

#include "sono/linalg.hpp"
#include "sono/philox.hpp"

namespace sono {

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  /// All-zero network with the given layer widths (input first, output last).
  static Mlp zeros(const std::vector<std::size_t>& widths);
  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
  static Mlp glorot(const std::vector<std::size_t>& widths, Philox& rng);

  std::size_t input_dim() const noexcept;
  std::size_t output_dim() const noexcept;
  std::size_t param_count() const noexcept;
  std::size_t layer_count() const noexcept { return layers_.size(); }
  std::vector<std::size_t> widths() const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }

  Vector flatten() const;
  void assign(ConstSpan flat);

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

/// Per-layer activations retained by a forward pass; index 0 is the input.
struct MlpTape {
  std::vector<Vector> activations;
};

/// Forward pass. Fills the tape when one is given.
Vector mlp_forward(const Mlp& net, ConstSpan input, MlpTape* tape = nullptr);

/// Reverse pass over a recorded tape.
/// grad_input receives cotangent^T dOut/dInput (overwritten, may be empty to skip);
/// grad_params receives alpha * cotangent^T dOut/dParams (accumulated, may be empty to skip).
void mlp_backward(const Mlp& net, const MlpTape& tape, ConstSpan cotangent, MutSpan grad_input,
                  MutSpan grad_params, double alpha = 1.0);

/// Widths of the acceleration network: [2d+1, hidden, hidden, d].
std::vector<std::size_t> field_widths(std::size_t dim, std::size_t hidden);
/// Widths of the velocity initializer: [d, hidden, d].
std::vector<std::size_t> velocity_widths(std::size_t dim, std::size_t hidden);

struct FieldInput {
  Vector x;
  Vector v;
  double t = 0.0;
};

struct FieldVjpResult {
  Vector grad_x;
  Vector grad_v;
  double grad_t = 0.0;
  Vector grad_params;
};

/// Acceleration S(x, v, t).
Vector field_eval(const Mlp& params, const FieldInput& input);

/// Initial velocity g(x0).
Vector velocity_init(const Mlp& params, ConstSpan x0);

/// cotangent^T times the Jacobian of field_eval w.r.t. x, v, t and the parameters.
FieldVjpResult field_vjp(const Mlp& params, const FieldInput& input, ConstSpan cotangent);

}  // namespace sono
