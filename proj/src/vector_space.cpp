#include "sedigest/vector_space.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "json.hpp"

#include "sedigest/common.hpp"
#include "sedigest/porter.hpp"
#include "sedigest/rng.hpp"

namespace sedigest::vector_space {
namespace {

// Stream tags deriving independent hash/generator seeds from one spec seed.
constexpr std::uint64_t kBucketStream = 0xb0c4e7;
constexpr std::uint64_t kSignStream = 0x516e;

Eigen::VectorXf l2_normalized(Eigen::VectorXf v) {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) norm += double(v[i]) * double(v[i]);
    norm = std::sqrt(norm);
    if (norm > 0.0) v /= static_cast<float>(norm);
    return v;
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

std::uint64_t get_u64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
    return v;
}

float get_f32(const char* p) {
    std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

void EmbedderSpec::validate() const {
    if (kind == Kind::hashed_tfidf && dimension < 16) {
        throw UsageError("hashed_tfidf embedder requires dimension >= 16, got " +
                         std::to_string(dimension));
    }
    if (kind == Kind::external_file && (!path || path->empty())) {
        throw UsageError("external_file embedder requires a path");
    }
    if (dimension <= 0) throw UsageError("embedder dimension must be positive");
}

EmbedderSpec::Kind embedder_kind_from_string(std::string_view s) {
    if (s == "hashed_tfidf") return EmbedderSpec::Kind::hashed_tfidf;
    if (s == "external_file") return EmbedderSpec::Kind::external_file;
    throw UsageError("unknown embedder kind: " + std::string(s) +
                     " (expected hashed_tfidf or external_file)");
}

std::string to_string(EmbedderSpec::Kind kind) {
    return kind == EmbedderSpec::Kind::hashed_tfidf ? "hashed_tfidf" : "external_file";
}

double DfTable::idf(std::string_view term) const {
    std::int64_t df = 1;
    if (auto it = doc_freq.find(std::string(term)); it != doc_freq.end()) df = it->second;
    return std::log(1.0 + double(doc_count) / double(df));
}

DfTable build_df(const std::vector<prep::CleanDocument>& docs) {
    DfTable table;
    table.doc_count = static_cast<std::int64_t>(docs.size());
    std::set<std::string_view> seen;
    for (const auto& doc : docs) {
        seen.clear();
        for (const auto& token : doc.tokens) {
            if (seen.insert(token).second) ++table.doc_freq[token];
        }
    }
    return table;
}

Eigen::VectorXf embed_tokens(const std::vector<std::string>& tokens,
                             const EmbedderSpec& spec, const DfTable& df) {
    Eigen::VectorXf v = Eigen::VectorXf::Zero(spec.dimension);
    if (tokens.empty()) return v;
    std::map<std::string_view, int> tf;
    for (const auto& t : tokens) ++tf[t];
    const std::uint64_t bucket_seed = rng::mix_seed(spec.seed, kBucketStream);
    const std::uint64_t sign_seed = rng::mix_seed(spec.seed, kSignStream);
    for (const auto& [term, count] : tf) {
        auto idx = static_cast<Eigen::Index>(rng::hash64(term, bucket_seed) %
                                             std::uint64_t(spec.dimension));
        float sign = (rng::hash64(term, sign_seed) & 1u) ? 1.0f : -1.0f;
        v[idx] += sign * static_cast<float>(count * df.idf(term));
    }
    return l2_normalized(std::move(v));
}

std::vector<DocVector> embed_corpus(const std::vector<prep::CleanDocument>& docs,
                                    const EmbedderSpec& spec) {
    spec.validate();
    if (docs.empty()) throw UsageError("cannot embed an empty corpus");
    std::vector<DocVector> out;
    out.reserve(docs.size());
    if (spec.kind == EmbedderSpec::Kind::external_file) {
        auto vectors = load_external(*spec.path);
        Eigen::Index dim = -1;
        for (const auto& doc : docs) {
            auto it = vectors.find(doc.post_id);
            if (it == vectors.end()) {
                throw UsageError("external embedding file " + *spec.path +
                                 " is missing post id " + std::to_string(doc.post_id));
            }
            if (dim < 0) dim = it->second.size();
            if (it->second.size() != dim) {
                throw UsageError("external embedding dimension mismatch at post id " +
                                 std::to_string(doc.post_id));
            }
            out.push_back({doc.post_id, it->second, {}});
        }
        return out;
    }
    DfTable df = build_df(docs);
    for (const auto& doc : docs) {
        out.push_back({doc.post_id, embed_tokens(doc.tokens, spec, df), {}});
    }
    return out;
}

std::vector<Eigen::VectorXf> embed_sentences(const std::vector<std::string>& sentences,
                                             const EmbedderSpec& spec, const DfTable& df,
                                             const prep::Stopwords& stops) {
    if (spec.kind != EmbedderSpec::Kind::hashed_tfidf) {
        throw UsageError("sentence embedding requires the hashed_tfidf embedder");
    }
    std::vector<Eigen::VectorXf> out;
    out.reserve(sentences.size());
    for (const auto& sentence : sentences) {
        prep::CleanDocument doc = prep::normalize(0, sentence, stops);
        out.push_back(embed_tokens(doc.tokens, spec, df));
    }
    return out;
}

Eigen::MatrixXf projection_matrix(int rows, int cols, std::uint64_t seed) {
    rng::Gaussian gaussian(seed);
    const float scale = 1.0f / std::sqrt(static_cast<float>(cols));
    Eigen::MatrixXf m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = static_cast<float>(gaussian.next()) * scale;
        }
    }
    return m;
}

std::vector<DocVector> reduce(std::vector<DocVector> vectors, int target_dim,
                              std::uint64_t seed) {
    if (vectors.empty()) throw UsageError("reduce requires at least one vector");
    const auto dim = static_cast<int>(vectors.front().full.size());
    if (target_dim >= dim) {
        throw UsageError("reduction target " + std::to_string(target_dim) +
                         " must be below the embedding dimension " + std::to_string(dim));
    }
    Eigen::MatrixXf projection = projection_matrix(dim, target_dim, seed);
    for (auto& v : vectors) {
        if (v.full.size() != dim) {
            throw UsageError("inconsistent embedding dimension at post id " +
                             std::to_string(v.post_id));
        }
        v.reduced = projection.transpose() * v.full;
    }
    return vectors;
}

std::vector<std::array<double, 2>> map_coordinates(
    const std::vector<Eigen::VectorXf>& centroids, std::uint64_t seed) {
    if (centroids.empty()) throw UsageError("map_coordinates requires at least one centroid");
    const auto dim = static_cast<int>(centroids.front().size());
    std::vector<std::array<double, 2>> points(centroids.size());
    if (dim > 2) {
        Eigen::MatrixXf projection = projection_matrix(dim, 2, seed);
        for (std::size_t i = 0; i < centroids.size(); ++i) {
            Eigen::Vector2f p = projection.transpose() * centroids[i];
            points[i] = {double(p[0]), double(p[1])};
        }
    } else {
        for (std::size_t i = 0; i < centroids.size(); ++i) {
            points[i] = {double(centroids[i][0]), dim > 1 ? double(centroids[i][1]) : 0.0};
        }
    }
    for (int axis = 0; axis < 2; ++axis) {
        double lo = points[0][axis], hi = points[0][axis];
        for (const auto& p : points) {
            lo = std::min(lo, p[axis]);
            hi = std::max(hi, p[axis]);
        }
        for (auto& p : points) {
            p[axis] = hi > lo ? (p[axis] - lo) / (hi - lo) : 0.5;
        }
    }
    return points;
}

double cosine(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    if (a.size() != b.size()) throw UsageError("cosine of vectors with different dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::min(1.0, std::max(-1.0, c));
}

void write_embd(const std::string& path, const std::vector<DocVector>& vectors) {
    std::string buf;
    buf.reserve(16 + vectors.size() * (8 + (vectors.empty() ? 0 : vectors[0].full.size() * 4)));
    buf += "EMBD";
    put_u32(buf, static_cast<std::uint32_t>(vectors.size()));
    const auto dim = vectors.empty() ? 0u : static_cast<std::uint32_t>(vectors[0].full.size());
    put_u32(buf, dim);
    for (const auto& v : vectors) {
        if (static_cast<std::uint32_t>(v.full.size()) != dim) {
            throw UsageError("inconsistent embedding dimension at post id " +
                             std::to_string(v.post_id));
        }
        put_u64(buf, static_cast<std::uint64_t>(v.post_id));
        for (Eigen::Index i = 0; i < v.full.size(); ++i) put_f32(buf, v.full[i]);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write embedding file: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw UsageError("failed writing embedding file: " + path);
}

std::vector<DocVector> read_embd(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open embedding file: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 12 || buf.compare(0, 4, "EMBD") != 0) {
        throw UsageError(path + ": not an EMBD embedding file");
    }
    const std::uint32_t count = get_u32(buf.data() + 4);
    const std::uint32_t dim = get_u32(buf.data() + 8);
    const std::size_t record = 8 + std::size_t(dim) * 4;
    if (buf.size() != 12 + std::size_t(count) * record) {
        throw UsageError(path + ": truncated embedding file");
    }
    std::vector<DocVector> out;
    out.reserve(count);
    const char* p = buf.data() + 12;
    for (std::uint32_t r = 0; r < count; ++r, p += record) {
        DocVector v;
        v.post_id = static_cast<std::int64_t>(get_u64(p));
        v.full.resize(dim);
        for (std::uint32_t i = 0; i < dim; ++i) {
            float f = get_f32(p + 8 + std::size_t(i) * 4);
            if (!std::isfinite(f)) {
                throw UsageError(path + ": non-finite value at post id " +
                                 std::to_string(v.post_id));
            }
            v.full[static_cast<Eigen::Index>(i)] = f;
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::map<std::int64_t, Eigen::VectorXf> load_external(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw UsageError("cannot open embedding file: " + path);
    char magic[4] = {};
    probe.read(magic, 4);
    std::map<std::int64_t, Eigen::VectorXf> out;
    if (probe.gcount() == 4 && std::memcmp(magic, "EMBD", 4) == 0) {
        probe.close();
        for (auto& v : read_embd(path)) {
            if (!out.emplace(v.post_id, std::move(v.full)).second) {
                throw UsageError(path + ": duplicate post id " + std::to_string(v.post_id));
            }
        }
        return out;
    }
    probe.seekg(0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(probe, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(path + ": line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("vec") || !j["vec"].is_array()) {
            throw UsageError(path + ": line " + std::to_string(lineno) +
                             ": expected {\"id\":…,\"vec\":[…]}");
        }
        auto id = j["id"].get<std::int64_t>();
        Eigen::VectorXf v(j["vec"].size());
        Eigen::Index i = 0;
        for (const auto& x : j["vec"]) {
            if (!x.is_number()) {
                throw UsageError(path + ": line " + std::to_string(lineno) +
                                 ": vec holds a non-number");
            }
            float f = x.get<float>();
            if (!std::isfinite(f)) {
                throw UsageError(path + ": non-finite value at post id " + std::to_string(id));
            }
            v[i++] = f;
        }
        if (!out.emplace(id, std::move(v)).second) {
            throw UsageError(path + ": duplicate post id " + std::to_string(id));
        }
    }
    return out;
}

}  // namespace sedigest::vector_space
