#include <Eigen/Dense>
#include <algorithm>
#include <numeric>

#include "json_util.hpp"
#include "lipgan/data.hpp"
#include "lipgan/errors.hpp"

namespace lipgan {

PcaModel pca_fit(const SampleBatch& data, std::size_t k) {
  const std::size_t m = data.count(), d = data.dim();
  if (k == 0 || k > d) {
    throw ConfigError("pca_fit: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(d) + "]");
  }
  if (m <= k) throw ConfigError("pca_fit: need more samples than components");

  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMatrix> x(data.values.values().data(), static_cast<Eigen::Index>(m),
                                static_cast<Eigen::Index>(d));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const RowMatrix centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericError("pca_fit: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; take from the top.
  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + d);
  model.components = Tensor(k, d);
  model.explained_variance.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(d - 1 - c);
    model.explained_variance[c] = std::max(0.0, eig.eigenvalues()(col));
    for (std::size_t j = 0; j < d; ++j) model.components(c, j) = eig.eigenvectors()(static_cast<Eigen::Index>(j), col);
  }
  return model;
}

SampleBatch pca_transform(const PcaModel& model, const SampleBatch& batch) {
  const std::size_t d = model.input_dim(), k = model.output_dim();
  if (batch.dim() != d) {
    throw ShapeError("pca_transform: batch has dimension " + std::to_string(batch.dim()) + ", model expects " +
                     std::to_string(d));
  }
  SampleBatch out{Tensor(batch.count(), k), batch.tag};
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const auto row = batch.values.row(i);
    for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - model.mean[j];
    for (std::size_t c = 0; c < k; ++c) {
      const auto comp = model.components.row(c);
      out.values(i, c) = std::inner_product(centered.begin(), centered.end(), comp.begin(), 0.0);
    }
  }
  return out;
}

SampleBatch pca_inverse_transform(const PcaModel& model, const SampleBatch& projected) {
  const std::size_t d = model.input_dim(), k = model.output_dim();
  if (projected.dim() != k) throw ShapeError("pca_inverse_transform: dimension mismatch");
  SampleBatch out{matmul(projected.values, model.components), projected.tag};
  for (std::size_t i = 0; i < out.count(); ++i)
    for (std::size_t j = 0; j < d; ++j) out.values(i, j) += model.mean[j];
  return out;
}

std::string pca_to_json(const PcaModel& model) {
  detail::json j;
  j["mean"] = model.mean;
  j["components"] = std::vector<double>(model.components.values().begin(), model.components.values().end());
  j["k"] = model.output_dim();
  j["d"] = model.input_dim();
  j["explained_variance"] = model.explained_variance;
  return j.dump();
}

PcaModel pca_from_json(const std::string& text) {
  const auto j = detail::parse_json(text, "pca");
  detail::StrictObject o(j, "pca");
  o.allow_only({"mean", "components", "k", "d", "explained_variance"});
  const auto k = o.get<std::size_t>("k");
  const auto d = o.get<std::size_t>("d");
  PcaModel model;
  model.mean = o.at("mean").get<std::vector<double>>();
  model.explained_variance = o.at("explained_variance").get<std::vector<double>>();
  auto comps = o.at("components").get<std::vector<double>>();
  if (model.mean.size() != d || model.explained_variance.size() != k || comps.size() != k * d) {
    throw ConfigError("pca: array lengths do not match k and d");
  }
  model.components = Tensor(k, d, std::move(comps));
  return model;
}

}  // namespace lipgan
