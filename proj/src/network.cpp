#include "mvgt/network.hpp"

#include <random>

#include "mvgt/errors.hpp"

namespace mvgt {

using nlohmann::json;

std::string to_string(Backbone b) { return b == Backbone::Gine ? "gine" : "egnn"; }

Backbone backbone_from_string(const std::string& name) {
  if (name == "gine") return Backbone::Gine;
  if (name == "egnn") return Backbone::Egnn;
  throw ConfigError("unknown backbone '" + name + "'");
}

json NetworkSpec::to_json() const {
  return json{{"backbone", to_string(backbone)},
              {"node_in", node_in},
              {"edge_in", edge_in},
              {"hidden", hidden},
              {"layers", layers},
              {"views", views},
              {"targets", targets},
              {"head_layers", head_layers},
              {"coord_norm", coord_norm == CoordNorm::MeanDegree ? "mean_degree" : "constant"},
              {"coord_scale", coord_scale}};
}

NetworkSpec NetworkSpec::from_json(const json& j) {
  NetworkSpec s;
  s.backbone = backbone_from_string(j.at("backbone").get<std::string>());
  s.node_in = j.at("node_in").get<std::size_t>();
  s.edge_in = j.at("edge_in").get<std::size_t>();
  s.hidden = j.at("hidden").get<std::size_t>();
  s.layers = j.at("layers").get<std::size_t>();
  s.views = j.at("views").get<std::size_t>();
  s.targets = j.at("targets").get<std::size_t>();
  s.head_layers = j.at("head_layers").get<std::size_t>();
  const auto norm = j.value("coord_norm", std::string("mean_degree"));
  if (norm != "mean_degree" && norm != "constant") throw ConfigError("unknown coord_norm '" + norm + "'");
  s.coord_norm = norm == "mean_degree" ? CoordNorm::MeanDegree : CoordNorm::Constant;
  s.coord_scale = j.value("coord_scale", 1.0);
  return s;
}

Network::Network(const NetworkSpec& spec, std::uint64_t seed) : spec_(spec) {
  if (spec.hidden == 0 || spec.layers == 0 || spec.views == 0 || spec.targets == 0 || spec.head_layers == 0 ||
      spec.node_in == 0) {
    throw ConfigError("network: all widths and counts must be positive");
  }
  std::mt19937_64 rng(seed);
  encoder_ = Mlp({spec.node_in, spec.hidden}, Activation::ReLU, false, rng);
  for (std::size_t l = 0; l < spec.layers; ++l) {
    if (spec.backbone == Backbone::Gine) {
      gine_.push_back(GineGtParams::make(spec.views, spec.hidden, spec.edge_in, rng));
    } else {
      EgnnGtParams p = EgnnGtParams::make(spec.views, spec.hidden, spec.edge_in, rng);
      p.egcl.norm = spec.coord_norm;
      p.egcl.coord_scale = spec.coord_scale;
      egnn_.push_back(std::move(p));
    }
  }
  std::vector<std::size_t> dims(spec.head_layers, spec.hidden);
  dims.push_back(spec.targets);
  head_ = Mlp(dims, spec.backbone == Backbone::Gine ? Activation::ReLU : Activation::SiLU, false, rng);
}

Tensor Network::forward(const GraphInput& input, NetworkCache* cache) const {
  const std::size_t n = input.tuple.num_nodes();
  if (input.node_feat.rows() != n) throw DimensionError("network: node feature rows do not match the graph");
  if (cache) {
    cache->gine.assign(gine_.size(), GineGtCache());
    cache->egnn.assign(egnn_.size(), EgnnGtCache());
    cache->nodes = n;
  }
  Tensor h = mlp_forward(encoder_, input.node_feat, cache ? &cache->encoder : nullptr);
  if (spec_.backbone == Backbone::Gine) {
    for (std::size_t l = 0; l < gine_.size(); ++l) {
      h = gine_gt_layer(h, input.tuple, gine_[l], cache ? &cache->gine[l] : nullptr);
    }
  } else {
    Tensor x = input.positions;
    for (std::size_t l = 0; l < egnn_.size(); ++l) {
      EgnnGtResult r = egnn_gt_layer(h, x, input.tuple, egnn_[l], cache ? &cache->egnn[l] : nullptr);
      h = std::move(r.h);
      x = std::move(r.x);
    }
  }
  return predict_head(global_mean_pool(h), head_, cache ? &cache->head : nullptr);
}

void Network::backward(const GraphInput& input, const NetworkCache& cache, const Tensor& d_pred) {
  const Tensor d_row = mlp_backward(head_, cache.head, d_pred.reshaped({1, d_pred.size()}));
  Tensor dh = global_mean_pool_backward(d_row.reshaped({d_row.size()}), cache.nodes);
  if (spec_.backbone == Backbone::Gine) {
    for (std::size_t l = gine_.size(); l-- > 0;) dh = gine_gt_backward(gine_[l], input.tuple, cache.gine[l], dh);
  } else {
    Tensor dx({cache.nodes, 3});
    for (std::size_t l = egnn_.size(); l-- > 0;) {
      EgnnGtGrads g = egnn_gt_backward(egnn_[l], input.tuple, cache.egnn[l], dh, dx);
      dh = std::move(g.h);
      dx = std::move(g.x);
    }
  }
  mlp_backward(encoder_, cache.encoder, dh);
}

ParamList Network::collect() const {
  auto* self = const_cast<Network*>(this);
  ParamList out;
  self->encoder_.collect(out);
  for (GineGtParams& p : self->gine_) p.collect(out);
  for (EgnnGtParams& p : self->egnn_) p.collect(out);
  self->head_.collect(out);
  return out;
}

ParamList Network::parameters() { return collect(); }

std::vector<Tensor> Network::snapshot() const {
  std::vector<Tensor> out;
  for (const Param* p : collect()) out.push_back(p->value);
  return out;
}

void Network::restore(const std::vector<Tensor>& values) {
  ParamList params = collect();
  if (values.size() != params.size()) throw DimensionError("network: snapshot does not match parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i]->value, values[i], "network restore");
    params[i]->value = values[i];
  }
}

json Network::to_json() const {
  json params = json::array();
  for (const Param* p : collect()) params.push_back(p->value.storage());
  return json{{"spec", spec_.to_json()}, {"parameters", params}};
}

Network Network::from_json(const json& j) {
  Network net(NetworkSpec::from_json(j.at("spec")), 0);
  const json& values = j.at("parameters");
  ParamList params = net.collect();
  if (!values.is_array() || values.size() != params.size()) {
    throw SchemaError("model file: expected " + std::to_string(params.size()) + " parameter arrays");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto data = values[i].get<std::vector<double>>();
    if (data.size() != params[i]->value.size()) throw SchemaError("model file: parameter size mismatch");
    params[i]->value = Tensor(params[i]->value.shape(), std::move(data));
  }
  return net;
}

}  // namespace mvgt
