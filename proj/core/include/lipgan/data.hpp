#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lipgan/rng.hpp"
#include "lipgan/tensor.hpp"

namespace lipgan {

enum class SampleTag { Real, Generated, Noise };

/// m x d samples plus where they came from.
struct SampleBatch {
  Tensor values;
  SampleTag tag = SampleTag::Real;

  std::size_t count() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }
};

/// Point on the roll for parameter z: (z cos 4 pi z, z sin 4 pi z).
std::pair<double, double> swiss_roll_point(double z);

/// m samples with z ~ Uniform[0.25, 1]. If `z_out` is non-null it receives the z of each row.
SampleBatch swiss_roll(std::size_t m, CounterRng& rng, std::vector<double>* z_out = nullptr);

/// m x r i.i.d. standard normals (Box-Muller), tagged as noise.
SampleBatch gaussian_noise(std::size_t m, std::size_t r, CounterRng& rng);

/// Rows [0, count) of a batch.
SampleBatch head(const SampleBatch& batch, std::size_t count);
/// Rows [begin, end) of a batch.
SampleBatch slice_rows(const SampleBatch& batch, std::size_t begin, std::size_t end);

struct MnistData {
  SampleBatch images;  // n x 784, pixels scaled to p / 127.5 - 1
  std::vector<std::uint8_t> labels;
};

/// Parses big-endian IDX image (magic 0x00000803) and label (0x00000801)
/// files. Throws FormatError naming the byte offset on bad magic, truncation
/// or an image/label count mismatch.
MnistData mnist_load(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Pixel byte to [-1, 1].
constexpr double scale_pixel(std::uint8_t p) noexcept { return static_cast<double>(p) / 127.5 - 1.0; }

/// Principal components of a real-data batch.
struct PcaModel {
  std::vector<double> mean;               // d
  Tensor components;                      // k x d, orthonormal rows
  std::vector<double> explained_variance; // k, descending

  std::size_t input_dim() const noexcept { return mean.size(); }
  std::size_t output_dim() const noexcept { return components.rows(); }
};

/// Centers the data and takes the top-k eigenvectors of the sample covariance
/// (divisor m - 1), sorted by descending eigenvalue. Requires m > k and k <= d.
PcaModel pca_fit(const SampleBatch& data, std::size_t k);

/// (x - mean) * components^T.
SampleBatch pca_transform(const PcaModel& model, const SampleBatch& batch);
/// y * components + mean.
SampleBatch pca_inverse_transform(const PcaModel& model, const SampleBatch& projected);

std::string pca_to_json(const PcaModel& model);
PcaModel pca_from_json(const std::string& text);

/// Reads a headerless or headed CSV of numbers into a batch. Lines whose first
/// field is not numeric are treated as a header and skipped.
SampleBatch read_csv_points(const std::filesystem::path& path);
void write_csv_points(const SampleBatch& batch, const std::filesystem::path& path);

}  // namespace lipgan
