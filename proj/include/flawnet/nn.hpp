#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flawnet/matrix.hpp"

namespace flawnet {

/// Negative slope shared by every LeakyReLU in the library.
inline constexpr double kLeakySlope = 0.01;

inline Matrix leaky_relu(Matrix z, double slope) {
  for (double& v : z.data())
    if (v < 0.0) v *= slope;
  return z;
}

/// A named view of one parameter block. `key` identifies the underlying
/// storage; tied layers surface the same key once.
struct ParamRef {
  std::string name;
  double* data = nullptr;
  std::size_t size = 0;
  const void* key = nullptr;
};

/// Accumulates parameter gradients keyed by storage identity, so weights
/// shared between layers collect contributions from every use.
class GradStore {
 public:
  void add(const void* key, std::span<const double> g) {
    auto& slot = grads_[key];
    if (slot.empty()) slot.assign(g.begin(), g.end());
    else {
      if (slot.size() != g.size()) throw ShapeError("GradStore::add: size mismatch");
      for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
    }
  }

  const std::vector<double>* find(const void* key) const {
    auto it = grads_.find(key);
    return it == grads_.end() ? nullptr : &it->second;
  }

  /// Gradients in the order of `params`; zero for parameters never touched.
  std::vector<std::vector<double>> aligned(const std::vector<ParamRef>& params) const {
    std::vector<std::vector<double>> out;
    out.reserve(params.size());
    for (const auto& p : params) {
      if (const auto* g = find(p.key)) {
        if (g->size() != p.size) throw ShapeError("GradStore::aligned: size mismatch for " + p.name);
        out.push_back(*g);
      } else {
        out.emplace_back(p.size, 0.0);
      }
    }
    return out;
  }

 private:
  std::unordered_map<const void*, std::vector<double>> grads_;
};

inline std::vector<double> snapshot_params(const std::vector<ParamRef>& params) {
  std::vector<double> out;
  for (const auto& p : params) out.insert(out.end(), p.data, p.data + p.size);
  return out;
}

inline void restore_params(const std::vector<ParamRef>& params, const std::vector<double>& snap) {
  std::size_t off = 0;
  for (const auto& p : params) {
    if (off + p.size > snap.size()) throw ShapeError("restore_params: snapshot too short");
    for (std::size_t i = 0; i < p.size; ++i) p.data[i] = snap[off + i];
    off += p.size;
  }
  if (off != snap.size()) throw ShapeError("restore_params: snapshot size mismatch");
}

/// One dense layer computing y = x · Wᵀ + b with W in out×in orientation.
/// The weight lives behind shared storage so two layers can be exact
/// transposes of each other at all times (`transposed` views).
class LinearLayer {
 public:
  LinearLayer(std::size_t in_dim, std::size_t out_dim)
      : weight_(std::make_shared<Matrix>(out_dim, in_dim)), bias_(out_dim, 0.0) {}

  /// A layer whose effective weight is the transpose of `base`'s, sharing
  /// storage. It maps base.out_dim() inputs to base.in_dim() outputs and owns
  /// its bias.
  static LinearLayer transposed_view_of(const LinearLayer& base) {
    LinearLayer l;
    l.weight_ = base.weight_;
    l.transposed_ = true;
    l.bias_.assign(base.in_dim(), 0.0);
    return l;
  }

  std::size_t in_dim() const { return transposed_ ? weight_->rows() : weight_->cols(); }
  std::size_t out_dim() const { return transposed_ ? weight_->cols() : weight_->rows(); }
  bool transposed() const { return transposed_; }

  Matrix& stored_weight() { return *weight_; }
  const Matrix& stored_weight() const { return *weight_; }
  const void* weight_key() const { return weight_.get(); }
  bool shares_weight_with(const LinearLayer& o) const { return weight_ == o.weight_; }

  /// Weight in this layer's out×in orientation (copies when transposed).
  Matrix effective_weight() const { return transposed_ ? transpose(*weight_) : *weight_; }

  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }
  const void* bias_key() const { return &bias_; }

  Matrix forward(const Matrix& x) const {
    if (x.cols() != in_dim())
      throw ShapeError("LinearLayer::forward: input cols " + std::to_string(x.cols()) +
                       " != in_dim " + std::to_string(in_dim()));
    Matrix z = transposed_ ? matmul(x, *weight_) : matmul_nt(x, *weight_);
    return add_row_vector(std::move(z), bias_);
  }

  /// Backward for upstream gradient d (batch×out). Parameter gradients go
  /// into `gs` (stored-weight orientation); returns gradient w.r.t. input.
  Matrix backward(const Matrix& input, const Matrix& d, GradStore& gs) const {
    Matrix dw = transposed_ ? matmul_tn(input, d)   // in×out, matching storage
                            : matmul_tn(d, input);  // out×in
    gs.add(weight_key(), dw.data());
    gs.add(bias_key(), col_sums(d));
    return transposed_ ? matmul_nt(d, *weight_) : matmul(d, *weight_);
  }

  std::size_t param_count() const { return weight_->size() + bias_.size(); }

  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + ".weight", weight_->data().data(), weight_->size(), weight_key()});
    out.push_back({prefix + ".bias", bias_.data(), bias_.size(), bias_key()});
  }

 private:
  LinearLayer() = default;

  std::shared_ptr<Matrix> weight_;
  bool transposed_ = false;
  std::vector<double> bias_;
};

/// Cached activations from one forward pass, consumed by backward.
struct MlpTrace {
  std::vector<Matrix> inputs;   // input to each layer
  std::vector<Matrix> preacts;  // pre-activation output of each layer
  bool valid = false;
};

/// A stack of LinearLayers with LeakyReLU after every layer except the last
/// (unless `activate_last` is set).
class Mlp {
 public:
  Mlp() = default;

  /// dims = [in, h1, ..., out]; builds dims.size()-1 layers.
  explicit Mlp(const std::vector<std::size_t>& dims, bool activate_last = false,
               double slope = kLeakySlope)
      : activate_last_(activate_last), slope_(slope) {
    if (slope <= 0.0 || slope >= 1.0) throw ConfigError("Mlp: slope must be in (0, 1)");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) layers_.emplace_back(dims[i], dims[i + 1]);
  }

  void push_layer(LinearLayer l) {
    if (!layers_.empty() && layers_.back().out_dim() != l.in_dim())
      throw ShapeError("Mlp::push_layer: dimension chain broken");
    layers_.push_back(std::move(l));
  }

  bool empty() const { return layers_.empty(); }
  std::size_t layer_count() const { return layers_.size(); }
  LinearLayer& layer(std::size_t i) { return layers_[i]; }
  const LinearLayer& layer(std::size_t i) const { return layers_[i]; }
  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }
  double slope() const { return slope_; }
  bool activate_last() const { return activate_last_; }

  Matrix forward(const Matrix& x, MlpTrace& trace) const {
    trace.inputs.clear();
    trace.preacts.clear();
    Matrix cur = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      trace.inputs.push_back(cur);
      Matrix z = layers_[i].forward(cur);
      trace.preacts.push_back(z);
      cur = activated(i) ? leaky_relu(std::move(z), slope_) : std::move(z);
    }
    trace.valid = true;
    return cur;
  }

  /// Stateful convenience: caches the trace internally for backward().
  Matrix forward(const Matrix& x) { return forward(x, cache_); }

  /// Forward without touching the internal cache.
  Matrix forward_inference(const Matrix& x) const {
    MlpTrace t;
    return forward(x, t);
  }

  /// Backpropagates `upstream` (gradient w.r.t. the output) through the
  /// cached pass. Parameter gradients accumulate into `gs`; returns the
  /// gradient w.r.t. the input batch.
  Matrix backward(const MlpTrace& trace, const Matrix& upstream, GradStore& gs) const {
    if (!trace.valid) throw StateError("Mlp::backward called before forward");
    if (trace.inputs.size() != layers_.size())
      throw StateError("Mlp::backward: trace does not match layer count");
    Matrix d = upstream;
    for (std::size_t ii = layers_.size(); ii-- > 0;) {
      if (activated(ii)) {
        const Matrix& z = trace.preacts[ii];
        d.require_same_shape(z, "Mlp::backward");
        for (std::size_t k = 0; k < d.size(); ++k)
          if (z.data()[k] < 0.0) d.data()[k] *= slope_;
      }
      d = layers_[ii].backward(trace.inputs[ii], d, gs);
    }
    return d;
  }

  Matrix backward(const Matrix& upstream, GradStore& gs) const {
    return backward(cache_, upstream, gs);
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.param_count();
    return n;
  }

  void collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
      layers_[i].collect_params(prefix + "." + std::to_string(i), out);
  }

 private:
  bool activated(std::size_t layer_index) const {
    return layer_index + 1 < layers_.size() || activate_last_;
  }

  std::vector<LinearLayer> layers_;
  bool activate_last_ = false;
  double slope_ = kLeakySlope;
  MlpTrace cache_;
};

/// Total parameter count of a deduplicated ParamRef list.
inline std::size_t param_count(const std::vector<ParamRef>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size;
  return n;
}

inline std::size_t param_count(const Mlp& m) { return m.param_count(); }

}  // namespace flawnet
