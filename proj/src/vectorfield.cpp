#include "sono/vectorfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sono/kernels.hpp"

namespace sono {

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::ShapeMismatch, "an MLP needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weight.rows() == 0 || layer.weight.cols() == 0 ||
        layer.bias.size() != layer.weight.rows()) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(l) + " bias/weight shape");
    }
    if (l > 0 && layers_[l - 1].weight.rows() != layer.weight.cols()) {
      throw Error(ErrorCode::ShapeMismatch,
                  "layer " + std::to_string(l) + " does not compose with its predecessor");
    }
  }
}

Mlp Mlp::zeros(const std::vector<std::size_t>& widths) {
  if (widths.size() < 2) throw Error(ErrorCode::ShapeMismatch, "need at least two widths");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    layers.push_back({Matrix(widths[l + 1], widths[l]), Vector(widths[l + 1], 0.0)});
  }
  return Mlp(std::move(layers));
}

Mlp Mlp::glorot(const std::vector<std::size_t>& widths, Philox& rng) {
  Mlp net = zeros(widths);
  for (auto& layer : net.layers_) {
    const double fan_in = static_cast<double>(layer.weight.cols());
    const double fan_out = static_cast<double>(layer.weight.rows());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : layer.weight.flat()) w = rng.uniform(-limit, limit);
  }
  return net;
}

std::size_t Mlp::input_dim() const noexcept {
  return layers_.empty() ? 0 : layers_.front().weight.cols();
}

std::size_t Mlp::output_dim() const noexcept {
  return layers_.empty() ? 0 : layers_.back().weight.rows();
}

std::size_t Mlp::param_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<std::size_t> Mlp::widths() const {
  std::vector<std::size_t> w;
  if (layers_.empty()) return w;
  w.push_back(input_dim());
  for (const auto& layer : layers_) w.push_back(layer.weight.rows());
  return w;
}

Vector Mlp::flatten() const {
  Vector flat;
  flat.reserve(param_count());
  for (const auto& layer : layers_) {
    flat.insert(flat.end(), layer.weight.flat().begin(), layer.weight.flat().end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return flat;
}

void Mlp::assign(ConstSpan flat) {
  if (flat.size() != param_count()) {
    throw Error(ErrorCode::ShapeMismatch, "flat parameter vector has " +
                                              std::to_string(flat.size()) + " entries, expected " +
                                              std::to_string(param_count()));
  }
  std::size_t off = 0;
  for (auto& layer : layers_) {
    auto w = layer.weight.flat();
    std::copy_n(flat.begin() + off, w.size(), w.begin());
    off += w.size();
    std::copy_n(flat.begin() + off, layer.bias.size(), layer.bias.begin());
    off += layer.bias.size();
  }
}

Vector mlp_forward(const Mlp& net, ConstSpan input, MlpTape* tape) {
  if (input.size() != net.input_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "network expects input of length " +
                                              std::to_string(net.input_dim()) + ", got " +
                                              std::to_string(input.size()));
  }
  const auto& k = kernels::active();
  const auto& layers = net.layers();
  if (tape) {
    tape->activations.resize(layers.size() + 1);
    tape->activations[0].assign(input.begin(), input.end());
  }
  Vector current(input.begin(), input.end());
  Vector next;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    next.resize(layer.weight.rows());
    k.gemv(layer.weight.data(), layer.weight.rows(), layer.weight.cols(), current.data(),
           layer.bias.data(), next.data());
    if (l + 1 < layers.size()) {
      for (double& a : next) a = std::tanh(a);
    }
    if (tape) tape->activations[l + 1] = next;
    current.swap(next);
  }
  return current;
}

void mlp_backward(const Mlp& net, const MlpTape& tape, ConstSpan cotangent, MutSpan grad_input,
                  MutSpan grad_params, double alpha) {
  const auto& layers = net.layers();
  if (cotangent.size() != net.output_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "cotangent length does not match network output");
  }
  if (tape.activations.size() != layers.size() + 1) {
    throw Error(ErrorCode::ShapeMismatch, "tape does not belong to this network");
  }
  if (!grad_input.empty() && grad_input.size() != net.input_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "grad_input length does not match network input");
  }
  if (!grad_params.empty() && grad_params.size() != net.param_count()) {
    throw Error(ErrorCode::ShapeMismatch, "grad_params length does not match parameter count");
  }
  const auto& k = kernels::active();

  // Offset of each layer's block in the flat parameter vector.
  std::vector<std::size_t> offsets(layers.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offsets[l] = off;
    off += layers[l].weight.size() + layers[l].bias.size();
  }

  Vector delta(cotangent.begin(), cotangent.end());
  Vector upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const Vector& in = tape.activations[l];
    const std::size_t rows = layer.weight.rows();
    const std::size_t cols = layer.weight.cols();
    if (!grad_params.empty()) {
      double* gw = grad_params.data() + offsets[l];
      k.ger_acc(gw, rows, cols, alpha, delta.data(), in.data());
      k.axpy(gw + rows * cols, alpha, delta.data(), rows);
    }
    if (l == 0 && grad_input.empty()) break;
    upstream.assign(cols, 0.0);
    k.gemv_t_acc(layer.weight.data(), rows, cols, delta.data(), upstream.data());
    if (l > 0) {
      // in = tanh(pre), dtanh = 1 - in^2
      for (std::size_t i = 0; i < cols; ++i) upstream[i] *= 1.0 - in[i] * in[i];
    }
    delta.swap(upstream);
  }
  if (!grad_input.empty()) std::copy(delta.begin(), delta.end(), grad_input.begin());
}

std::vector<std::size_t> field_widths(std::size_t dim, std::size_t hidden) {
  return {2 * dim + 1, hidden, hidden, dim};
}

std::vector<std::size_t> velocity_widths(std::size_t dim, std::size_t hidden) {
  return {dim, hidden, dim};
}

namespace {

Vector pack_field_input(const Mlp& params, const FieldInput& input) {
  if (input.x.size() != input.v.size()) {
    throw Error(ErrorCode::ShapeMismatch, "position and velocity lengths differ");
  }
  if (params.input_dim() != 2 * input.x.size() + 1 ||
      params.output_dim() != input.x.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "field network shape does not match input dimension " +
                    std::to_string(input.x.size()));
  }
  Vector packed;
  packed.reserve(2 * input.x.size() + 1);
  packed.insert(packed.end(), input.x.begin(), input.x.end());
  packed.insert(packed.end(), input.v.begin(), input.v.end());
  packed.push_back(input.t);
  return packed;
}

}  // namespace

Vector field_eval(const Mlp& params, const FieldInput& input) {
  return mlp_forward(params, pack_field_input(params, input));
}

Vector velocity_init(const Mlp& params, ConstSpan x0) {
  if (params.output_dim() != x0.size()) {
    throw Error(ErrorCode::ShapeMismatch, "velocity network output must match feature dimension");
  }
  return mlp_forward(params, x0);
}

FieldVjpResult field_vjp(const Mlp& params, const FieldInput& input, ConstSpan cotangent) {
  const Vector packed = pack_field_input(params, input);
  if (cotangent.size() != input.x.size()) {
    throw Error(ErrorCode::ShapeMismatch, "cotangent length must equal the feature dimension");
  }
  MlpTape tape;
  mlp_forward(params, packed, &tape);
  const std::size_t d = input.x.size();
  Vector grad_in(packed.size());
  FieldVjpResult out;
  out.grad_params.assign(params.param_count(), 0.0);
  mlp_backward(params, tape, cotangent, grad_in, out.grad_params);
  out.grad_x.assign(grad_in.begin(), grad_in.begin() + d);
  out.grad_v.assign(grad_in.begin() + d, grad_in.begin() + 2 * d);
  out.grad_t = grad_in[2 * d];
  return out;
}

}  // namespace sono
