#include "coldstart/ingest.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "coldstart/rng.hpp"

namespace coldstart {
namespace {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("failed reading '" + path + "'");
  return bytes;
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("failed reading '" + path + "'");
  return text;
}

std::uint32_t read_u32_be(std::span<const std::uint8_t> bytes,
                          std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

constexpr std::uint32_t kIdxImagesMagic = 2051;
constexpr std::uint32_t kIdxLabelsMagic = 2049;
constexpr char kEmbeddingMagic[] = "GLEMB1\n";
constexpr std::size_t kEmbeddingMagicLen = 7;

}  // namespace

Pool parse_mnist_idx(std::span<const std::uint8_t> image_bytes,
                     std::span<const std::uint8_t> label_bytes) {
  if (image_bytes.size() < 16) {
    throw std::runtime_error("mnist: image file shorter than its header");
  }
  if (label_bytes.size() < 8) {
    throw std::runtime_error("mnist: label file shorter than its header");
  }
  const std::uint32_t image_magic = read_u32_be(image_bytes, 0);
  if (image_magic != kIdxImagesMagic) {
    throw std::runtime_error("mnist: bad image magic " +
                             std::to_string(image_magic));
  }
  const std::uint32_t label_magic = read_u32_be(label_bytes, 0);
  if (label_magic != kIdxLabelsMagic) {
    throw std::runtime_error("mnist: bad label magic " +
                             std::to_string(label_magic));
  }
  const std::uint32_t count = read_u32_be(image_bytes, 4);
  const std::uint32_t rows = read_u32_be(image_bytes, 8);
  const std::uint32_t cols = read_u32_be(image_bytes, 12);
  const std::uint32_t label_count = read_u32_be(label_bytes, 4);
  if (count != label_count) {
    throw std::runtime_error("mnist: " + std::to_string(count) +
                             " images vs " + std::to_string(label_count) +
                             " labels");
  }
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (pixels == 0) throw std::runtime_error("mnist: zero image dimensions");
  if (image_bytes.size() != 16 + static_cast<std::size_t>(count) * pixels) {
    throw std::runtime_error("mnist: image payload size mismatch");
  }
  if (label_bytes.size() != 8 + static_cast<std::size_t>(count)) {
    throw std::runtime_error("mnist: label payload size mismatch");
  }

  Pool pool;
  pool.class_count = 10;
  pool.feature_dim = static_cast<std::int32_t>(pixels);
  pool.source = "mnist";
  pool.instances.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint8_t label = label_bytes[8 + i];
    if (label > 9) {
      throw std::runtime_error("mnist: label " + std::to_string(label) +
                               " at index " + std::to_string(i));
    }
    Instance& inst = pool.instances[i];
    inst.id = static_cast<std::int32_t>(i);
    inst.label = label;
    inst.features.resize(pixels);
    const std::uint8_t* src = image_bytes.data() + 16 +
                              static_cast<std::size_t>(i) * pixels;
    for (std::size_t j = 0; j < pixels; ++j) {
      inst.features[j] = static_cast<float>(src[j]) / 255.0f;
    }
  }
  pool.validate();
  return pool;
}

Pool load_mnist_idx(const std::string& images_path,
                    const std::string& labels_path) {
  const std::vector<std::uint8_t> images = read_file_bytes(images_path);
  const std::vector<std::uint8_t> labels = read_file_bytes(labels_path);
  return parse_mnist_idx(images, labels);
}

std::vector<AgNewsRecord> parse_agnews_csv(std::string_view content) {
  std::vector<AgNewsRecord> records;
  std::vector<std::string> fields;
  std::string field;
  std::size_t row = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();

  auto finish_row = [&](bool force) {
    if (!force && fields.empty() && field.empty()) return;  // blank line
    fields.push_back(std::move(field));
    field.clear();
    if (fields.size() != 3) {
      throw std::runtime_error("agnews: row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) +
                               " fields, expected 3");
    }
    int cls = 0;
    try {
      cls = std::stoi(fields[0]);
    } catch (const std::exception&) {
      throw std::runtime_error("agnews: row " + std::to_string(row) +
                               " has non-numeric class '" + fields[0] + "'");
    }
    if (cls < 1 || cls > 4) {
      throw std::runtime_error("agnews: row " + std::to_string(row) +
                               " class " + std::to_string(cls) +
                               " outside 1..4");
    }
    records.push_back({cls - 1, std::move(fields[1]), std::move(fields[2])});
    fields.clear();
    ++row;
  };

  while (i < n) {
    const char c = content[i];
    if (c == '"') {
      ++i;  // quoted field; doubled quotes embed a literal quote
      while (true) {
        if (i >= n) {
          throw std::runtime_error("agnews: row " + std::to_string(row) +
                                   " has an unterminated quote");
        }
        if (content[i] == '"') {
          if (i + 1 < n && content[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          field.push_back(content[i]);
          ++i;
        }
      }
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      ++i;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < n && content[i + 1] == '\n') ++i;
      ++i;
      finish_row(!fields.empty() || !field.empty());
    } else {
      field.push_back(c);
      ++i;
    }
  }
  if (!fields.empty() || !field.empty()) finish_row(true);
  return records;
}

std::vector<AgNewsRecord> load_agnews_csv(const std::string& path) {
  return parse_agnews_csv(read_file_text(path));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<float> featurize_text_hashing(std::string_view text,
                                          std::uint32_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument(
        "featurize_text_hashing: dim must be a power of two");
  }
  std::vector<float> v(dim, 0.0f);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    v[fnv1a64(token) & (dim - 1)] += 1.0f;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  double norm_sq = 0.0;
  for (float x : v) norm_sq += static_cast<double>(x) * x;
  if (norm_sq > 0.0) {
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (float& x : v) x *= inv;
  }
  return v;
}

Pool load_agnews_pool(const std::string& path, std::uint32_t hash_dim) {
  const std::vector<AgNewsRecord> records = load_agnews_csv(path);
  Pool pool;
  pool.class_count = 4;
  pool.feature_dim = static_cast<std::int32_t>(hash_dim);
  pool.source = "agnews";
  pool.instances.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Instance& inst = pool.instances[i];
    inst.id = static_cast<std::int32_t>(i);
    inst.label = records[i].label;
    inst.features = featurize_text_hashing(
        records[i].title + " " + records[i].description, hash_dim);
  }
  pool.validate();
  return pool;
}

Pool load_embeddings(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  if (bytes.size() < kEmbeddingMagicLen + 12) {
    throw std::runtime_error("embeddings: '" + path + "' is too short");
  }
  if (std::memcmp(bytes.data(), kEmbeddingMagic, kEmbeddingMagicLen) != 0) {
    throw std::runtime_error("embeddings: bad magic in '" + path + "'");
  }
  const std::uint8_t* p = bytes.data() + kEmbeddingMagicLen;
  const std::uint32_t n = read_u32_le(p);
  const std::uint32_t dim = read_u32_le(p + 4);
  const std::uint32_t classes = read_u32_le(p + 8);
  if (n == 0 || dim == 0 || classes == 0) {
    throw std::runtime_error("embeddings: zero count, dim or classes");
  }
  const std::size_t expected = kEmbeddingMagicLen + 12 +
                               static_cast<std::size_t>(n) * dim * 4 +
                               static_cast<std::size_t>(n);
  if (bytes.size() != expected) {
    throw std::runtime_error(
        "embeddings: declared " + std::to_string(n) + "x" +
        std::to_string(dim) + " needs " + std::to_string(expected) +
        " bytes, file has " + std::to_string(bytes.size()));
  }

  Pool pool;
  pool.class_count = static_cast<std::int32_t>(classes);
  pool.feature_dim = static_cast<std::int32_t>(dim);
  pool.source = "embeddings";
  pool.instances.resize(n);
  const std::uint8_t* row = p + 12;
  for (std::uint32_t i = 0; i < n; ++i) {
    Instance& inst = pool.instances[i];
    inst.id = static_cast<std::int32_t>(i);
    inst.features.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j) {
      const std::uint32_t raw = read_u32_le(row + static_cast<std::size_t>(j) * 4);
      const float f = std::bit_cast<float>(raw);
      if (!std::isfinite(f)) {
        throw std::runtime_error("embeddings: non-finite value at row " +
                                 std::to_string(i));
      }
      inst.features[j] = f;
    }
    row += static_cast<std::size_t>(dim) * 4;
  }
  const std::uint8_t* labels = row;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (labels[i] >= classes) {
      throw std::runtime_error("embeddings: label " +
                               std::to_string(labels[i]) + " at row " +
                               std::to_string(i) + " outside [0, " +
                               std::to_string(classes) + ")");
    }
    pool.instances[i].label = labels[i];
  }
  pool.validate();
  return pool;
}

void save_embeddings(const Pool& pool, const std::string& path) {
  pool.validate();
  if (pool.class_count > 256) {
    throw std::invalid_argument("embeddings: labels must fit one byte");
  }
  std::string out;
  out.reserve(kEmbeddingMagicLen + 12 +
              pool.size() * (static_cast<std::size_t>(pool.feature_dim) * 4 + 1));
  out.append(kEmbeddingMagic, kEmbeddingMagicLen);
  append_u32_le(out, static_cast<std::uint32_t>(pool.size()));
  append_u32_le(out, static_cast<std::uint32_t>(pool.feature_dim));
  append_u32_le(out, static_cast<std::uint32_t>(pool.class_count));
  for (const Instance& inst : pool.instances) {
    for (float f : inst.features) {
      append_u32_le(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  for (const Instance& inst : pool.instances) {
    out.push_back(static_cast<char>(inst.label));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

MarginDataset generate_margin_dataset(int n, int dim, double radius,
                                      double margin, std::uint64_t seed) {
  if (n < 1 || dim < 1) {
    throw std::invalid_argument("margin dataset: n and dim must be positive");
  }
  if (!(margin > 0.0) || !(margin < radius)) {
    throw std::invalid_argument(
        "margin dataset: need 0 < margin < radius (margin " +
        std::to_string(margin) + ", radius " + std::to_string(radius) + ")");
  }
  Rng rng = Rng::derive(seed, Stream::Data);

  std::vector<double> normal(static_cast<std::size_t>(dim));
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (double& v : normal) {
      v = rng.normal();
      norm_sq += v * v;
    }
  } while (norm_sq == 0.0);
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (double& v : normal) v *= inv_norm;

  MarginDataset data;
  data.hyperplane = normal;
  data.pool.class_count = 2;
  data.pool.feature_dim = dim;
  data.pool.source = "margin";
  data.pool.instances.resize(static_cast<std::size_t>(n));

  std::vector<double> x(static_cast<std::size_t>(dim));
  for (int i = 0; i < n; ++i) {
    // Uniform in the radius-R ball, rejected until clear of the margin strip.
    double dot = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100000) {
        throw std::runtime_error(
            "margin dataset: rejection sampling failed; margin too close to "
            "radius for this dimension");
      }
      double len_sq = 0.0;
      for (double& v : x) {
        v = rng.normal();
        len_sq += v * v;
      }
      if (len_sq == 0.0) continue;
      const double r =
          radius * std::pow(rng.uniform_real(), 1.0 / dim) / std::sqrt(len_sq);
      dot = 0.0;
      for (int j = 0; j < dim; ++j) {
        x[j] *= r;
        dot += normal[j] * x[j];
      }
      if (std::abs(dot) >= margin) break;
    }
    Instance& inst = data.pool.instances[static_cast<std::size_t>(i)];
    inst.id = i;
    inst.label = dot > 0.0 ? 1 : 0;
    inst.features.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      inst.features[j] = static_cast<float>(x[j]);
    }
  }
  data.pool.validate();
  return data;
}

Pool make_blobs(int n, int classes, int dim, double spread,
                std::uint64_t seed) {
  if (n < 1 || classes < 1 || dim < 1) {
    throw std::invalid_argument("blobs: n, classes and dim must be positive");
  }
  if (!(spread >= 0.0)) {
    throw std::invalid_argument("blobs: spread must be >= 0");
  }
  Rng rng = Rng::derive(seed, Stream::Data);

  std::vector<std::vector<double>> means(static_cast<std::size_t>(classes));
  for (auto& m : means) {
    m.resize(static_cast<std::size_t>(dim));
    for (double& v : m) v = rng.normal();
  }

  Pool pool;
  pool.class_count = classes;
  pool.feature_dim = dim;
  pool.source = "blobs";
  pool.instances.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int label = i % classes;  // round-robin keeps classes balanced
    Instance& inst = pool.instances[static_cast<std::size_t>(i)];
    inst.id = i;
    inst.label = label;
    inst.features.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      inst.features[j] = static_cast<float>(
          means[static_cast<std::size_t>(label)][static_cast<std::size_t>(j)] +
          spread * rng.normal());
    }
  }
  pool.validate();
  return pool;
}

}  // namespace coldstart
