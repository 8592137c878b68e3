#pragma once

// Trainable parameters (two disentangled chunks), intent embeddings and the
// two attention maps: relation attention per intent and intent attention per
// user.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ukgc/error.hpp"
#include "ukgc/matrix.hpp"
#include "ukgc/random.hpp"
#include "ukgc/ukg.hpp"

namespace ukgc {

struct ModelDims {
  std::size_t dim = 32;  // per chunk; the fused representation has the same width
  std::size_t n_users = 1;
  std::size_t n_pois = 1;
  std::size_t n_geo_entities = 0;
  std::size_t n_func_entities = 0;
  std::size_t n_geo_relations = 5;
  std::size_t n_func_relations = 11;
  std::size_t n_intents_geo = 4;
  std::size_t n_intents_func = 4;
  std::size_t n_layers = 3;

  void validate() const {
    if (dim == 0 || n_users == 0 || n_pois == 0 || n_geo_relations == 0 ||
        n_func_relations == 0 || n_intents_geo == 0 || n_intents_func == 0) {
      throw Error(ErrorCode::InvalidConfig, "model dimensions must be >= 1: " + describe());
    }
  }

  std::string describe() const {
    std::ostringstream os;
    os << "dim=" << dim << " users=" << n_users << " pois=" << n_pois
       << " geo_entities=" << n_geo_entities << " func_entities=" << n_func_entities
       << " geo_relations=" << n_geo_relations << " func_relations=" << n_func_relations
       << " geo_intents=" << n_intents_geo << " func_intents=" << n_intents_func
       << " layers=" << n_layers;
    return os.str();
  }

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Dimensions implied by a pair of propagation graphs (geo chunk, func chunk).
inline ModelDims dims_for(const SubGraph& geo, const SubGraph& func, std::size_t n_users,
                          std::size_t dim, std::size_t n_intents, std::size_t n_layers) {
  ModelDims d;
  d.dim = dim;
  d.n_users = n_users;
  d.n_pois = geo.n_pois;
  d.n_geo_entities = geo.n_entities;
  d.n_func_entities = func.n_entities;
  d.n_geo_relations = geo.n_relations;
  d.n_func_relations = func.n_relations;
  d.n_intents_geo = n_intents;
  d.n_intents_func = n_intents;
  d.n_layers = n_layers;
  return d;
}

// One disentangled chunk.
struct ChannelParams {
  Matrix embeddings;     // [users | POIs | non-POI entities] x dim
  Matrix relations;      // relations x dim
  Matrix intent_scores;  // intents x relations

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct ModelParams {
  ChannelParams geo;
  ChannelParams func;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Gradients share the parameter layout.
using Gradients = ModelParams;

// Visits the six tensors in a fixed order with their canonical names.
template <class Params, class Fn>
void for_each_tensor(Params& params, Fn&& fn) {
  fn("E_g", params.geo.embeddings);
  fn("R_g", params.geo.relations);
  fn("S_g", params.geo.intent_scores);
  fn("E_f", params.func.embeddings);
  fn("R_f", params.func.relations);
  fn("S_f", params.func.intent_scores);
}

template <class A, class B, class Fn>
void for_each_tensor_pair(A& a, B& b, Fn&& fn) {
  fn("E_g", a.geo.embeddings, b.geo.embeddings);
  fn("R_g", a.geo.relations, b.geo.relations);
  fn("S_g", a.geo.intent_scores, b.geo.intent_scores);
  fn("E_f", a.func.embeddings, b.func.embeddings);
  fn("R_f", a.func.relations, b.func.relations);
  fn("S_f", a.func.intent_scores, b.func.intent_scores);
}

inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z;
  for_each_tensor_pair(z, p, [](std::string_view, Matrix& dst, const Matrix& src) {
    dst = Matrix(src.rows(), src.cols());
  });
  return z;
}

inline ModelParams zero_params(const ModelDims& dims) {
  ModelParams p;
  const std::size_t geo_rows = dims.n_users + dims.n_pois + dims.n_geo_entities;
  const std::size_t func_rows = dims.n_users + dims.n_pois + dims.n_func_entities;
  p.geo = {Matrix(geo_rows, dims.dim), Matrix(dims.n_geo_relations, dims.dim),
           Matrix(dims.n_intents_geo, dims.n_geo_relations)};
  p.func = {Matrix(func_rows, dims.dim), Matrix(dims.n_func_relations, dims.dim),
            Matrix(dims.n_intents_func, dims.n_func_relations)};
  return p;
}

inline void xavier_uniform(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.flat()) v = rng.uniform(-bound, bound);
}

// Xavier-uniform for every tensor, fans = (rows, cols). Intent scores are
// random too: with identical rows every intent receives identical gradients
// and the intents can never separate.
inline ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  dims.validate();
  ModelParams p = zero_params(dims);
  Rng rng(derive_seed(seed, stream::kInit));
  for_each_tensor(p, [&](std::string_view, Matrix& m) { xavier_uniform(m, rng); });
  return p;
}

inline void softmax_inplace(std::span<double> v) {
  if (v.empty()) return;
  const double top = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - top);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

struct IntentSet {
  Matrix alpha;    // intents x relations, rows are probability vectors
  Matrix intents;  // intents x dim
};

// alpha = row-softmax(S); intents = alpha * R.
inline IntentSet intent_embeddings(const Matrix& scores, const Matrix& relations) {
  if (scores.cols() != relations.rows()) {
    throw Error(ErrorCode::DimsMismatch, "intent scores have " + std::to_string(scores.cols()) +
                                             " columns, relations have " +
                                             std::to_string(relations.rows()) + " rows");
  }
  IntentSet set{scores, Matrix(scores.rows(), relations.cols())};
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    softmax_inplace(set.alpha.row(i));
    for (std::size_t j = 0; j < relations.rows(); ++j) {
      axpy(set.alpha(i, j), relations.row(j), set.intents.row(i));
    }
  }
  return set;
}

// beta_j = softmax_j(intent_j . u0)
inline std::vector<double> user_intent_attention(std::span<const double> base_user,
                                                 const IntentSet& intents) {
  std::vector<double> beta(intents.intents.rows());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    beta[j] = dot(intents.intents.row(j), base_user);
  }
  softmax_inplace(beta);
  return beta;
}

// Checkpoint format (text, line oriented):
//   ukgc-checkpoint 1
//   dims dim=.. users=.. pois=.. geo_entities=.. func_entities=.. geo_relations=..
//        func_relations=.. geo_intents=.. func_intents=.. layers=..   (one line)
//   tensor <name> <rows> <cols>        then <rows> lines of <cols> values
//   ... for E_g R_g S_g E_f R_f S_f in that order
//   end
// Values use the shortest round-trip decimal form, so save/load is exact.
inline std::string save_checkpoint(const ModelParams& params, const ModelDims& dims) {
  std::string out = "ukgc-checkpoint 1\ndims " + dims.describe() + "\n";
  char buf[64];
  for_each_tensor(params, [&](std::string_view name, const Matrix& m) {
    out += "tensor " + std::string(name) + " " + std::to_string(m.rows()) + " " +
           std::to_string(m.cols()) + "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        auto res = std::to_chars(buf, buf + sizeof buf, m(r, c));
        if (c) out += ' ';
        out.append(buf, res.ptr);
      }
      out += '\n';
    }
  });
  out += "end\n";
  return out;
}

struct Checkpoint {
  ModelDims dims;
  ModelParams params;
};

inline Checkpoint load_checkpoint(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto bad = [](const std::string& why) { return Error(ErrorCode::BadCheckpoint, why); };
  std::string line;
  if (!std::getline(in, line) || line != "ukgc-checkpoint 1") throw bad("missing header");
  if (!std::getline(in, line) || line.rfind("dims ", 0) != 0) throw bad("missing dims line");

  Checkpoint ck;
  {
    std::istringstream ds(line.substr(5));
    std::string tok;
    while (ds >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw bad("bad dims token " + tok);
      const std::string key = tok.substr(0, eq);
      auto value = detail::parse_uint<std::size_t>(std::string_view(tok).substr(eq + 1));
      if (!value) throw bad("bad dims value " + tok);
      if (key == "dim") ck.dims.dim = *value;
      else if (key == "users") ck.dims.n_users = *value;
      else if (key == "pois") ck.dims.n_pois = *value;
      else if (key == "geo_entities") ck.dims.n_geo_entities = *value;
      else if (key == "func_entities") ck.dims.n_func_entities = *value;
      else if (key == "geo_relations") ck.dims.n_geo_relations = *value;
      else if (key == "func_relations") ck.dims.n_func_relations = *value;
      else if (key == "geo_intents") ck.dims.n_intents_geo = *value;
      else if (key == "func_intents") ck.dims.n_intents_func = *value;
      else if (key == "layers") ck.dims.n_layers = *value;
      else throw bad("unknown dims key " + key);
    }
  }
  ck.dims.validate();
  ck.params = zero_params(ck.dims);
  for_each_tensor(ck.params, [&](std::string_view name, Matrix& m) {
    std::string tag, got_name;
    std::size_t rows = 0, cols = 0;
    if (!std::getline(in, line)) throw bad("truncated before tensor " + std::string(name));
    std::istringstream hs(line);
    if (!(hs >> tag >> got_name >> rows >> cols) || tag != "tensor" || got_name != name ||
        rows != m.rows() || cols != m.cols()) {
      throw bad("expected tensor " + std::string(name) + " " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ", got '" + line + "'");
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) throw bad("truncated tensor " + std::string(name));
      auto fields = detail::split(line, ' ');
      if (fields.size() != cols) throw bad("wrong column count in " + std::string(name));
      for (std::size_t c = 0; c < cols; ++c) {
        double v = 0.0;
        auto res = std::from_chars(fields[c].data(), fields[c].data() + fields[c].size(), v);
        if (res.ec != std::errc{} || res.ptr != fields[c].data() + fields[c].size() ||
            !std::isfinite(v)) {
          throw bad("bad value in " + std::string(name));
        }
        m(r, c) = v;
      }
    }
  });
  if (!std::getline(in, line) || line != "end") throw bad("missing end marker");
  return ck;
}

}  // namespace ukgc
