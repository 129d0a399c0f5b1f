#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "lipgan/data.hpp"
#include "lipgan/errors.hpp"
#include "oracles.hpp"

using namespace lipgan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lipgan_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> idx_images(std::uint32_t n, std::uint8_t fill_base) {
  std::vector<std::uint8_t> b;
  put_u32(b, 0x00000803);
  put_u32(b, n);
  put_u32(b, 28);
  put_u32(b, 28);
  for (std::uint32_t i = 0; i < n * 784; ++i) b.push_back(static_cast<std::uint8_t>(fill_base + i % 7));
  return b;
}

std::vector<std::uint8_t> idx_labels(std::uint32_t n) {
  std::vector<std::uint8_t> b;
  put_u32(b, 0x00000801);
  put_u32(b, n);
  for (std::uint32_t i = 0; i < n; ++i) b.push_back(static_cast<std::uint8_t>(i % 10));
  return b;
}

}  // namespace

TEST(SwissRoll, ParametricPoints) {
  const auto [x1, y1] = swiss_roll_point(0.5);
  EXPECT_NEAR(x1, 0.5, 1e-15);
  EXPECT_NEAR(y1, 0.0, 1e-15);
  const auto [x2, y2] = swiss_roll_point(0.25);
  EXPECT_NEAR(x2, -0.25, 1e-15);
  EXPECT_NEAR(y2, 0.0, 1e-15);
}

TEST(SwissRoll, NormEqualsGeneratingZ) {
  CounterRng rng(1);
  std::vector<double> z;
  const SampleBatch b = swiss_roll(5000, rng, &z);
  ASSERT_EQ(z.size(), 5000u);
  EXPECT_EQ(b.tag, SampleTag::Real);
  for (std::size_t i = 0; i < 5000; ++i) {
    EXPECT_GE(z[i], 0.25);
    EXPECT_LE(z[i], 1.0);
    EXPECT_NEAR(b.values(i, 0) * b.values(i, 0) + b.values(i, 1) * b.values(i, 1), z[i] * z[i], 1e-15);
  }
}

TEST(Samplers, ReplayIsBitIdentical) {
  CounterRng a = CounterRng::stream(5, "data"), b = CounterRng::stream(5, "data");
  EXPECT_EQ(swiss_roll(100, a).values, swiss_roll(100, b).values);
  EXPECT_EQ(gaussian_noise(100, 3, a).values, gaussian_noise(100, 3, b).values);
  CounterRng c = CounterRng::stream(5, "noise");
  EXPECT_FALSE(gaussian_noise(10, 2, a).values == gaussian_noise(10, 2, c).values);
}

TEST(GaussianNoise, MomentsAtOneMillionDraws) {
  CounterRng rng(2);
  const SampleBatch b = gaussian_noise(500000, 2, rng);
  EXPECT_EQ(b.tag, SampleTag::Noise);
  for (std::size_t c = 0; c < 2; ++c) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < b.count(); ++i) s += b.values(i, c);
    const double mean = s / 500000.0;
    for (std::size_t i = 0; i < b.count(); ++i) ss += (b.values(i, c) - mean) * (b.values(i, c) - mean);
    EXPECT_LE(std::abs(mean), 4.0 / std::sqrt(500000.0));
    const double var = ss / 499999.0;
    EXPECT_GE(var, 0.98);
    EXPECT_LE(var, 1.02);
  }
  double s = 0.0;
  for (double v : b.values.values()) s += v;
  EXPECT_LE(std::abs(s / 1e6), 4.0 / std::sqrt(1e6));
}

TEST(CounterRng, DocumentedAlgorithm) {
  // First output of key k is the SplitMix64 finalizer of k + golden.
  CounterRng r(42);
  std::uint64_t z = 42 + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  EXPECT_EQ(r.next_u64(), z);
  // Known SplitMix64 reference value for seed 0.
  CounterRng zero(0);
  EXPECT_EQ(zero.next_u64(), 0xE220A8397B1DCDAFull);
}

TEST(CounterRng, BelowAndUniformRanges) {
  CounterRng r(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Mnist, PixelScaling) {
  EXPECT_EQ(scale_pixel(0), -1.0);
  EXPECT_EQ(scale_pixel(255), 1.0);
  EXPECT_NEAR(scale_pixel(127), -1.0 / 255.0, 1e-15);
}

TEST(Mnist, ParsesIdx) {
  const fs::path dir = temp_dir("idx_ok");
  write_bytes(dir / "img", idx_images(3, 250));
  write_bytes(dir / "lab", idx_labels(3));
  const MnistData d = mnist_load(dir / "img", dir / "lab");
  ASSERT_EQ(d.images.count(), 3u);
  EXPECT_EQ(d.images.dim(), 784u);
  EXPECT_EQ(d.labels, (std::vector<std::uint8_t>{0, 1, 2}));
  EXPECT_EQ(d.images.values(0, 0), scale_pixel(250));
  EXPECT_EQ(d.images.values(0, 5), scale_pixel(255));
  EXPECT_EQ(d.images.values(1, 0), scale_pixel(static_cast<std::uint8_t>(250 + 784 % 7)));
}

TEST(Mnist, FormatErrorsNameTheOffset) {
  const fs::path dir = temp_dir("idx_bad");
  auto bad_magic = idx_images(2, 0);
  bad_magic[3] = 0x01;
  write_bytes(dir / "magic", bad_magic);
  auto truncated = idx_images(2, 0);
  truncated.resize(truncated.size() - 10);
  write_bytes(dir / "short", truncated);
  write_bytes(dir / "img", idx_images(2, 0));
  write_bytes(dir / "lab", idx_labels(2));
  write_bytes(dir / "lab3", idx_labels(3));

  auto message = [](auto&& fn) {
    try {
      fn();
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message([&] { mnist_load(dir / "magic", dir / "lab"); }).find("offset 0"), std::string::npos);
  EXPECT_NE(message([&] { mnist_load(dir / "short", dir / "lab"); }).find("offset"), std::string::npos);
  EXPECT_NE(message([&] { mnist_load(dir / "img", dir / "lab3"); }).find("offset"), std::string::npos);
  EXPECT_NE(message([&] { mnist_load(dir / "img", dir / "img"); }).find("offset 0"), std::string::npos);
}

TEST(Mnist, OfficialTrainHeaderWhenAvailable) {
  const char* env = std::getenv("LIPGAN_DATA_DIR");
  const fs::path p = fs::path(env ? env : "data") / "train-images-idx3-ubyte";
  if (!fs::exists(p)) GTEST_SKIP() << "MNIST not present";
  std::ifstream f(p, std::ios::binary);
  unsigned char h[8];
  f.read(reinterpret_cast<char*>(h), 8);
  const std::uint32_t n = (std::uint32_t{h[4]} << 24) | (std::uint32_t{h[5]} << 16) | (std::uint32_t{h[6]} << 8) | h[7];
  EXPECT_EQ(n, 60000u);
}

TEST(Pca, AxisAlignedData) {
  CounterRng rng(4);
  Tensor x(2000, 2);
  for (std::size_t i = 0; i < 2000; ++i) x(i, 0) = rng.normal();
  const PcaModel m = pca_fit(SampleBatch{x}, 1);
  EXPECT_NEAR(std::abs(m.components(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(m.components(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(m.explained_variance[0], 1.0, 0.1);
}

TEST(Pca, IsotropicVariancesAreClose) {
  CounterRng rng(5);
  const PcaModel m = pca_fit(gaussian_noise(100000, 3, rng), 3);
  EXPECT_LE(m.explained_variance.front() / m.explained_variance.back(), 1.2);
  EXPECT_GE(m.explained_variance[0], m.explained_variance[1]);
  EXPECT_GE(m.explained_variance[1], m.explained_variance[2]);
}

TEST(Pca, MatchesJacobiOracleAndRowsAreOrthonormal) {
  CounterRng rng(6);
  Tensor x = oracle::random_tensor(400, 6, rng);
  for (std::size_t i = 0; i < 400; ++i) x(i, 2) = 3.0 * x(i, 0) + 1e-7 * x(i, 2);  // ill-conditioned
  const PcaModel m = pca_fit(SampleBatch{x}, 6);
  const Tensor gram = oracle::naive_matmul(m.components, oracle::naive_transpose(m.components));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(gram(i, j), i == j ? 1.0 : 0.0, 1e-8);

  Tensor cov(6, 6);
  std::vector<double> mean(6, 0.0);
  for (std::size_t i = 0; i < 400; ++i)
    for (std::size_t j = 0; j < 6; ++j) mean[j] += x(i, j) / 400.0;
  for (std::size_t i = 0; i < 400; ++i)
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t b = 0; b < 6; ++b) cov(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]) / 399.0;
  auto ev = oracle::jacobi_eigen(cov);
  std::sort(ev.rbegin(), ev.rend());
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(m.explained_variance[k], ev[k], 1e-9);
}

TEST(Pca, TransformAndInverse) {
  CounterRng rng(7);
  const SampleBatch x{oracle::random_tensor(50, 4, rng)};
  const PcaModel m = pca_fit(x, 4);
  const SampleBatch back = pca_inverse_transform(m, pca_transform(m, x));
  for (std::size_t i = 0; i < x.values.size(); ++i) EXPECT_NEAR(back.values[i], x.values[i], 1e-8);
  const SampleBatch at_mean = pca_transform(m, SampleBatch{Tensor(1, 4, m.mean)});
  for (double v : at_mean.values.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Pca, ProjectionIsNonExpansive) {
  CounterRng rng(8);
  const SampleBatch x{oracle::random_tensor(200, 8, rng)};
  const PcaModel m = pca_fit(x, 3);
  const SampleBatch t = pca_transform(m, x);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t i = rng.below(200), j = rng.below(200);
    double din = 0.0, dout = 0.0;
    for (std::size_t k = 0; k < 8; ++k) din += std::pow(x.values(i, k) - x.values(j, k), 2);
    for (std::size_t k = 0; k < 3; ++k) dout += std::pow(t.values(i, k) - t.values(j, k), 2);
    EXPECT_LE(std::sqrt(dout), std::sqrt(din) + 1e-9);
  }
}

TEST(Pca, ErrorsAndJsonRoundTrip) {
  CounterRng rng(9);
  const SampleBatch x{oracle::random_tensor(10, 3, rng)};
  EXPECT_THROW(pca_fit(x, 4), ConfigError);
  EXPECT_THROW(pca_fit(SampleBatch{oracle::random_tensor(3, 3, rng)}, 3), ConfigError);
  const PcaModel m = pca_fit(x, 2);
  EXPECT_THROW(pca_transform(m, SampleBatch{Tensor(2, 5)}), ShapeError);
  const PcaModel back = pca_from_json(pca_to_json(m));
  EXPECT_EQ(back.mean, m.mean);
  EXPECT_EQ(back.components, m.components);
  EXPECT_EQ(back.explained_variance, m.explained_variance);
}

TEST(Csv, RoundTripWithHeader) {
  const fs::path dir = temp_dir("csv");
  CounterRng rng(10);
  const SampleBatch x{oracle::random_tensor(20, 3, rng)};
  write_csv_points(x, dir / "p.csv");
  EXPECT_EQ(read_csv_points(dir / "p.csv").values, x.values);
  std::ofstream(dir / "h.csv") << "x,y\n1,2\n3.5,-4\n";
  EXPECT_EQ(read_csv_points(dir / "h.csv").values, Tensor::from_rows({{1, 2}, {3.5, -4}}));
  std::ofstream(dir / "ragged.csv") << "1,2\n3\n";
  EXPECT_THROW(read_csv_points(dir / "ragged.csv"), FormatError);
}
