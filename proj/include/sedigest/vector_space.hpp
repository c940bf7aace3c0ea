#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sedigest/prep.hpp"

namespace sedigest::vector_space {

struct EmbedderSpec {
    enum class Kind { hashed_tfidf, external_file };

    Kind kind = Kind::hashed_tfidf;
    int dimension = 256;          // hashed_tfidf bucket count, >= 16
    std::uint64_t seed = 0;
    std::optional<std::string> path;  // external_file source

    void validate() const;  // throws UsageError
};

EmbedderSpec::Kind embedder_kind_from_string(std::string_view s);
std::string to_string(EmbedderSpec::Kind kind);

struct DocVector {
    std::int64_t post_id = 0;
    Eigen::VectorXf full;
    Eigen::VectorXf reduced;  // size 0 until reduce() fills it
};

// Corpus document frequencies; sentences are embedded against this table.
struct DfTable {
    std::map<std::string, std::int64_t> doc_freq;
    std::int64_t doc_count = 0;

    // ln(1 + N/df); unseen terms count as df = 1.
    double idf(std::string_view term) const;
};

DfTable build_df(const std::vector<prep::CleanDocument>& docs);

// Seeded signed-bucket tf-idf vector, L2-normalized (zero stays zero).
Eigen::VectorXf embed_tokens(const std::vector<std::string>& tokens,
                             const EmbedderSpec& spec, const DfTable& df);

std::vector<DocVector> embed_corpus(const std::vector<prep::CleanDocument>& docs,
                                    const EmbedderSpec& spec);

// Tokenizes each sentence like prep::normalize and embeds it as a one-off
// document against the corpus df table. hashed_tfidf only.
std::vector<Eigen::VectorXf> embed_sentences(const std::vector<std::string>& sentences,
                                             const EmbedderSpec& spec, const DfTable& df,
                                             const prep::Stopwords& stops);

// rows x cols matrix with N(0, 1/cols) entries from the seeded generator.
Eigen::MatrixXf projection_matrix(int rows, int cols, std::uint64_t seed);

// Gaussian random projection of the full vectors into target_dim.
std::vector<DocVector> reduce(std::vector<DocVector> vectors, int target_dim,
                              std::uint64_t seed);

// Project centroids to 2-D and affine-scale into [0,1]^2 (degenerate axes
// collapse to 0.5).
std::vector<std::array<double, 2>> map_coordinates(
    const std::vector<Eigen::VectorXf>& centroids, std::uint64_t seed);

// 0 when either vector is zero; clamped to [-1, 1].
double cosine(const Eigen::VectorXf& a, const Eigen::VectorXf& b);

// Binary embedding file: magic "EMBD", u32 count, u32 dim, then count
// records of (u64 post_id, dim x f32), all little-endian.
void write_embd(const std::string& path, const std::vector<DocVector>& vectors);
std::vector<DocVector> read_embd(const std::string& path);

// External embeddings: EMBD binary or JSONL lines {"id":…,"vec":[…]},
// auto-detected by the magic bytes.
std::map<std::int64_t, Eigen::VectorXf> load_external(const std::string& path);

}  // namespace sedigest::vector_space
