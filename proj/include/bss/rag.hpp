#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bss {

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> tags;
};

struct RetrievalHit {
  Document document;
  double score = 0.0;
};

/// Text-to-vector contract. Implementations must be deterministic or store
/// their vectors; the shipped hash embedder is deterministic.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  /// Empty text is an input error. A text with no tokens at all embeds to
  /// the zero vector (cosine then treats it as similar to nothing).
  virtual std::vector<double> embed(const std::string& text) const = 0;
};

/// Bag-of-words test embedder: lowercase alphanumeric tokens, FNV-1a
/// hashed into `dim` buckets, L2-normalized counts. Dependency-free and
/// fully deterministic.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(int dim = 256) : dim_(dim) {
    if (dim <= 0) throw std::invalid_argument("embedder dimension must be positive");
  }

  std::string name() const override { return "hash_bow"; }
  int dimension() const override { return dim_; }

  std::vector<double> embed(const std::string& text) const override {
    if (text.empty()) throw std::invalid_argument("cannot embed empty text");
    std::vector<double> v(dim_, 0.0);
    for (const std::string& token : tokenize(text)) v[bucket(token)] += 1.0;
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (double& x : v) x *= inv;
    }
    return v;
  }

  /// Exposed so tests can verify bucket disjointness directly.
  int bucket(const std::string& token) const {
    return static_cast<int>(fnv1a(token) % static_cast<std::uint64_t>(dim_));
  }

  static std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char ch : text) {
      if (std::isalnum(ch)) {
        current.push_back(static_cast<char>(std::tolower(ch)));
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
  }

 private:
  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  int dim_;
};

inline double cosine_similarity(const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

/// Exhaustive-scan vector store over a document collection. Scales to the
/// hundreds of knowledge snippets this toolkit deals in; anything larger
/// belongs in a real vector database.
class RagStore {
 public:
  explicit RagStore(std::shared_ptr<const Embedder> embedder =
                        std::make_shared<HashEmbedder>())
      : embedder_(std::move(embedder)) {}

  const Embedder& embedder() const { return *embedder_; }
  std::size_t size() const { return docs_.size(); }
  const std::vector<Document>& documents() const { return docs_; }

  void add(Document doc) {
    if (doc.id.empty() || doc.id.find_first_of(" \t\n") != std::string::npos)
      throw std::invalid_argument("document id must be non-empty without whitespace");
    if (doc.text.empty()) throw std::invalid_argument("document text must be non-empty");
    if (is_header_line_present(doc.text))
      throw std::invalid_argument("document text may not contain a '#id ' header line");
    for (const std::string& tag : doc.tags)
      if (tag.empty() || tag.find(',') != std::string::npos)
        throw std::invalid_argument("tags must be non-empty and comma-free");
    for (const Document& d : docs_)
      if (d.id == doc.id) throw std::invalid_argument("duplicate document id: " + doc.id);
    vectors_.push_back(embedder_->embed(doc.text));
    docs_.push_back(std::move(doc));
  }

  bool remove(const std::string& id) {
    for (std::size_t i = 0; i < docs_.size(); ++i) {
      if (docs_[i].id == id) {
        docs_.erase(docs_.begin() + static_cast<std::ptrdiff_t>(i));
        vectors_.erase(vectors_.begin() + static_cast<std::ptrdiff_t>(i));
        return true;
      }
    }
    return false;
  }

  /// Top-k by cosine similarity, descending; equal scores rank by
  /// ascending document id. k larger than the store returns everything.
  std::vector<RetrievalHit> retrieve(const std::string& query, int k) const {
    if (k <= 0) throw std::invalid_argument("retrieve: k must be positive");
    const std::vector<double> q = embedder_->embed(query);
    std::vector<RetrievalHit> hits;
    hits.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i)
      hits.push_back({docs_[i], cosine_similarity(q, vectors_[i])});
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.document.id < b.document.id;
    });
    if (hits.size() > static_cast<std::size_t>(k)) hits.resize(static_cast<std::size_t>(k));
    return hits;
  }

  /// One file: a `#store` header naming the embedder, then one record per
  /// document. Vectors are recomputed on load (the embedder is
  /// deterministic), so persisted results are bit-stable.
  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "#store embedder:" << embedder_->name() << " dim:" << embedder_->dimension()
        << "\n";
    for (const Document& d : docs_) {
      out << "#id " << d.id << " tags:";
      for (std::size_t i = 0; i < d.tags.size(); ++i)
        out << (i ? "," : "") << d.tags[i];
      out << "\n" << d.text << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
  }

  static RagStore load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("#store ", 0) != 0)
      throw std::runtime_error(path + ": missing '#store' header");
    const std::string name = field_after(line, "embedder:", path);
    const int dim = std::stoi(field_after(line, "dim:", path));
    if (name != "hash_bow")
      throw std::runtime_error(path + ": unknown embedder '" + name + "'");
    RagStore store(std::make_shared<HashEmbedder>(dim));
    append_records(in, path, store);
    return store;
  }

  /// Ingests a knowledge-base file (records only, no `#store` header) into
  /// this store. Returns the number of documents added.
  int ingest_kb_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path + " for reading");
    const std::size_t before = docs_.size();
    append_records(in, path, *this);
    return static_cast<int>(docs_.size() - before);
  }

 private:
  static bool is_header_line_present(const std::string& text) {
    std::string_view rest = text;
    while (!rest.empty()) {
      const std::size_t eol = rest.find('\n');
      const std::string_view line = rest.substr(0, eol);
      if (line.rfind("#id ", 0) == 0 || line.rfind("#store ", 0) == 0) return true;
      if (eol == std::string_view::npos) break;
      rest = rest.substr(eol + 1);
    }
    return false;
  }

  static std::string field_after(const std::string& line, const std::string& key,
                                 const std::string& path) {
    const std::size_t pos = line.find(key);
    if (pos == std::string::npos)
      throw std::runtime_error(path + ": header missing '" + key + "'");
    const std::size_t start = pos + key.size();
    const std::size_t end = line.find(' ', start);
    return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
  }

  static void append_records(std::istream& in, const std::string& path, RagStore& store) {
    std::string line;
    Document current;
    std::string text;
    bool open = false;
    auto flush = [&]() {
      if (!open) return;
      if (!text.empty() && text.back() == '\n') text.pop_back();
      current.text = text;
      store.add(current);
      current = Document{};
      text.clear();
    };
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.rfind("#id ", 0) == 0) {
        flush();
        open = true;
        const std::size_t tags_pos = line.find(" tags:");
        if (tags_pos == std::string::npos)
          throw std::runtime_error(path + ": record header missing 'tags:'");
        current.id = line.substr(4, tags_pos - 4);
        std::string tags = line.substr(tags_pos + 6);
        while (!tags.empty()) {
          const std::size_t comma = tags.find(',');
          const std::string tag = tags.substr(0, comma);
          if (!tag.empty()) current.tags.push_back(tag);
          if (comma == std::string::npos) break;
          tags.erase(0, comma + 1);
        }
      } else if (open) {
        text += line;
        text += '\n';
      } else if (!line.empty()) {
        throw std::runtime_error(path + ": text before first '#id' header");
      }
    }
    flush();
  }

  std::shared_ptr<const Embedder> embedder_;
  std::vector<Document> docs_;
  std::vector<std::vector<double>> vectors_;
};

/// Query, separator, then hit texts in rank order, each prefixed with its
/// document id. The character budget caps the whole string; when it runs
/// out, the lowest-ranked hits lose text first (the query and separator
/// are never dropped).
inline std::string augment_prompt(const std::string& query,
                                  const std::vector<RetrievalHit>& hits,
                                  std::size_t budget = 4000) {
  std::string out = query + "\n---\n";
  for (const RetrievalHit& hit : hits) {
    if (out.size() >= budget) break;
    std::string piece = "[" + hit.document.id + "] " + hit.document.text + "\n";
    if (out.size() + piece.size() > budget) piece.resize(budget - out.size());
    out += piece;
  }
  return out;
}

}  // namespace bss
