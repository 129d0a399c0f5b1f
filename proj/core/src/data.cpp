#include "lipgan/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "lipgan/errors.hpp"

namespace lipgan {

std::pair<double, double> swiss_roll_point(double z) {
  const double angle = 4.0 * std::numbers::pi * z;
  return {z * std::cos(angle), z * std::sin(angle)};
}

SampleBatch swiss_roll(std::size_t m, CounterRng& rng, std::vector<double>* z_out) {
  if (m == 0) throw ConfigError("swiss_roll: m must be >= 1");
  SampleBatch batch{Tensor(m, 2), SampleTag::Real};
  if (z_out) z_out->resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = rng.uniform(0.25, 1.0);
    const auto [x, y] = swiss_roll_point(z);
    batch.values(i, 0) = x;
    batch.values(i, 1) = y;
    if (z_out) (*z_out)[i] = z;
  }
  return batch;
}

SampleBatch gaussian_noise(std::size_t m, std::size_t r, CounterRng& rng) {
  if (m == 0 || r == 0) throw ConfigError("gaussian_noise: m and r must be >= 1");
  SampleBatch batch{Tensor(m, r), SampleTag::Noise};
  for (double& v : batch.values.values()) v = rng.normal();
  return batch;
}

SampleBatch head(const SampleBatch& batch, std::size_t count) { return slice_rows(batch, 0, count); }

SampleBatch slice_rows(const SampleBatch& batch, std::size_t begin, std::size_t end) {
  if (begin > end || end > batch.count()) throw ShapeError("slice_rows: range out of bounds");
  const std::size_t d = batch.dim();
  std::vector<double> data(batch.values.values().begin() + static_cast<std::ptrdiff_t>(begin * d),
                           batch.values.values().begin() + static_cast<std::ptrdiff_t>(end * d));
  return SampleBatch{Tensor(end - begin, d, std::move(data)), batch.tag};
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) {
    throw FormatError(path.string() + ": truncated header at offset " + std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void expect_magic(const std::vector<std::uint8_t>& bytes, std::uint32_t magic,
                  const std::filesystem::path& path) {
  const std::uint32_t got = read_be32(bytes, 0, path);
  if (got != magic) {
    std::ostringstream os;
    os << path.string() << ": bad magic 0x" << std::hex << got << " at offset 0, expected 0x" << magic;
    throw FormatError(os.str());
  }
}

}  // namespace

MnistData mnist_load(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const auto img = read_file(images_path);
  expect_magic(img, 0x00000803u, images_path);
  const std::uint32_t count = read_be32(img, 4, images_path);
  const std::uint32_t rows = read_be32(img, 8, images_path);
  const std::uint32_t cols = read_be32(img, 12, images_path);
  const std::size_t pixels = std::size_t{rows} * cols;
  const std::size_t need = 16 + std::size_t{count} * pixels;
  if (img.size() < need) {
    throw FormatError(images_path.string() + ": truncated pixel data at offset " + std::to_string(img.size()) +
                      ", expected " + std::to_string(need) + " bytes");
  }

  const auto lab = read_file(labels_path);
  expect_magic(lab, 0x00000801u, labels_path);
  const std::uint32_t label_count = read_be32(lab, 4, labels_path);
  if (label_count != count) {
    throw FormatError(labels_path.string() + ": item count " + std::to_string(label_count) +
                      " at offset 4 does not match " + std::to_string(count) + " images");
  }
  if (lab.size() < 8 + std::size_t{count}) {
    throw FormatError(labels_path.string() + ": truncated label data at offset " + std::to_string(lab.size()));
  }

  MnistData data;
  data.images = SampleBatch{Tensor(count, pixels), SampleTag::Real};
  auto out = data.images.values.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_pixel(img[16 + i]);
  data.labels.assign(lab.begin() + 8, lab.begin() + 8 + count);
  return data;
}

SampleBatch read_csv_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    bool numeric = true;
    while (std::getline(ss, field, ',')) {
      const char* b = field.data();
      while (*b == ' ') ++b;
      double v = 0.0;
      const auto res = std::from_chars(b, field.data() + field.size(), v);
      if (res.ec != std::errc()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows == 0) continue;  // header
      throw FormatError(path.string() + ": non-numeric field on line " + std::to_string(line_no));
    }
    if (cols == 0) cols = row.size();
    if (row.size() != cols) {
      throw FormatError(path.string() + ": line " + std::to_string(line_no) + " has " +
                        std::to_string(row.size()) + " fields, expected " + std::to_string(cols));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw FormatError(path.string() + ": no data rows");
  return SampleBatch{Tensor(rows, cols, std::move(values)), SampleTag::Real};
}

void write_csv_points(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (std::size_t i = 0; i < batch.count(); ++i) {
    const auto row = batch.values.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

}  // namespace lipgan
