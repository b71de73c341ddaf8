#include "span/model/inputs.hpp"

#include <cmath>
#include <limits>

namespace span::model {

template <typename Real>
PaddingMask<Real> PaddingMask<Real>::make(std::size_t n, std::size_t k) {
  if (n == 0 || n > k) throw std::invalid_argument("padding mask needs 1 <= n <= k");
  PaddingMask m;
  m.n = n;
  m.k = k;
  m.rows.assign(k, Real(0));
  std::vector<Real> bias(k * k, Real(0));
  for (std::size_t i = 0; i < k; ++i) {
    m.rows[i] = i < n ? Real(1) : Real(0);
    for (std::size_t j = n; j < k; ++j) bias[i * k + j] = -std::numeric_limits<Real>::infinity();
  }
  m.bias = Tensor<Real>::from_values(k, k, std::move(bias));
  return m;
}

EncodedSubgraph encode_pair(const sampling::SubgraphPair& pair, const graph::Snapshot& current, std::size_t k) {
  const std::size_t n = pair.size();
  if (n == 0 || n > k) {
    throw std::invalid_argument("subgraph of size " + std::to_string(n) + " does not fit k = " + std::to_string(k));
  }
  EncodedSubgraph enc;
  enc.n = n;
  enc.k = k;
  enc.node_ids.assign(k, -1);
  enc.type_ids.assign(k, -1);
  enc.degree_feature.assign(k, 0.0);
  enc.context.assign(k * k, 0.0);
  enc.next_adjacency.assign(k * k, 0.0);

  const double log_max = std::log1p(static_cast<double>(current.max_degree()));
  const auto types = current.node_types();
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = pair.nodes[i];
    if (v >= current.num_nodes()) throw std::out_of_range("node id outside latent matrix");
    enc.node_ids[i] = v;
    if (!types.empty()) enc.type_ids[i] = types[v];
    enc.degree_feature[i] = log_max > 0.0 ? std::log1p(static_cast<double>(current.degree(v))) / log_max : 0.0;

    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += pair.attention(i, j);
    for (std::size_t j = 0; j < n; ++j) {
      enc.context[i * k + j] = row_sum > 0.0 ? pair.attention(i, j) / row_sum : 0.0;
      enc.next_adjacency[i * k + j] = pair.next.edge(i, j) ? 1.0 : 0.0;
    }
  }
  return enc;
}

template <typename Real>
ModelInputs<Real> build_inputs(Tape<Real>& tape, const SpanModel<Real>& model, const EncodedSubgraph& enc) {
  const std::size_t k = enc.k, d = model.config().dim;
  for (auto id : enc.node_ids) {
    if (id >= static_cast<std::int64_t>(model.latent().rows())) {
      throw std::out_of_range("node id " + std::to_string(id) + " outside latent matrix");
    }
  }

  std::vector<Real> keep(k * d, Real(1));
  std::vector<Real> degree(k * d, Real(0));
  for (std::size_t i = 0; i < k; ++i) {
    keep[i * d] = Real(0);
    degree[i * d] = static_cast<Real>(enc.degree_feature[i]);
  }

  auto y = tape.gather_rows(model.latent(), enc.node_ids);
  y = tape.mul(y, Tensor<Real>::from_values(k, d, std::move(keep)));
  y = tape.add(y, Tensor<Real>::from_values(k, d, std::move(degree)));
  if (model.type_table().defined()) {
    y = tape.add(y, tape.gather_rows(model.type_table(), enc.type_ids));
  }

  std::vector<Real> context(enc.context.begin(), enc.context.end());
  auto c = tape.matmul(Tensor<Real>::from_values(k, k, std::move(context)), y);
  return {y, c, PaddingMask<Real>::make(enc.n, k)};
}

template struct PaddingMask<float>;
template struct PaddingMask<double>;
template ModelInputs<float> build_inputs<float>(Tape<float>&, const SpanModel<float>&, const EncodedSubgraph&);
template ModelInputs<double> build_inputs<double>(Tape<double>&, const SpanModel<double>&, const EncodedSubgraph&);

}  // namespace span::model
