#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldstart/types.hpp"

namespace coldstart {

// IDX image/label pair (big-endian, magics 2051/2049). Pixels are scaled to
// [0,1]; labels must lie in [0,9]. Any malformed input throws with a
// diagnostic message and never yields a partial pool.
Pool parse_mnist_idx(std::span<const std::uint8_t> image_bytes,
                     std::span<const std::uint8_t> label_bytes);
Pool load_mnist_idx(const std::string& images_path,
                    const std::string& labels_path);

struct AgNewsRecord {
  std::int32_t label = 0;  // already remapped to 0..3
  std::string title;
  std::string description;
};

// 3-column CSV (class 1..4, title, description) with standard quoting.
std::vector<AgNewsRecord> parse_agnews_csv(std::string_view content);
std::vector<AgNewsRecord> load_agnews_csv(const std::string& path);

// 64-bit FNV-1a, the pinned token hash for text featurization.
std::uint64_t fnv1a64(std::string_view bytes);

// Hashing bag-of-words: lowercase, split on non-alphanumerics, hash each token
// with FNV-1a into one of `dim` buckets (dim must be a power of two),
// accumulate counts, L2-normalize. Empty text yields the zero vector.
std::vector<float> featurize_text_hashing(std::string_view text,
                                          std::uint32_t dim);

// AG News test CSV featurized with the hashing trick (title + description).
Pool load_agnews_pool(const std::string& path, std::uint32_t hash_dim);

// Embedding container: magic "GLEMB1\n", little-endian u32 N/dim/C, N rows of
// dim float32, then N label bytes. Declared sizes must match the payload
// exactly and all floats must be finite.
Pool load_embeddings(const std::string& path);
void save_embeddings(const Pool& pool, const std::string& path);

struct MarginDataset {
  Pool pool;                      // C = 2, labels by side of the hyperplane
  std::vector<double> hyperplane; // hidden unit normal, for audits
};

// Linearly separable binary set: every point has norm <= radius and signed
// distance >= margin from a hidden unit-normal hyperplane through the origin.
// Throws when margin >= radius (infeasible).
MarginDataset generate_margin_dataset(int n, int dim, double radius,
                                      double margin, std::uint64_t seed);

// Balanced Gaussian blobs: class means drawn unit-scale, points jittered by
// `spread`, labels assigned round-robin. Stands in for precomputed embedding
// pools in tests and fixtures.
Pool make_blobs(int n, int classes, int dim, double spread, std::uint64_t seed);

}  // namespace coldstart
