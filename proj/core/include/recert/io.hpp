#pragma once

// File formats: GloVe-style text embeddings, JSON model files, JSONL
// datasets, the synthetic task generator and certification reports.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "recert/attacks.hpp"
#include "recert/certifier.hpp"
#include "recert/model.hpp"

namespace recert::io {

/// Malformed input, with the source name and 1-based line when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// An output file could not be written.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// Token -> vector map, standardized per dimension over the vocabulary.
/// Out-of-vocabulary tokens get a reproducible Uniform[-0.1, 0.1] vector
/// derived from (seed, token) alone.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

    /// Adds a raw (unstandardized) vector. Throws on dimension mismatch.
    void add(const std::string& token, std::vector<double> vec);
    /// z-scores every dimension over the vocabulary; zero-variance columns are only centered.
    void standardize();

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(const std::string& token) const { return index_.count(token) != 0; }

    std::vector<double> lookup(const std::string& token) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return stddev_; }
    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::size_t dim_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::string> tokens_;
    std::vector<std::vector<double>> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> mean_;
    std::vector<double> stddev_;
};

/// Reads "token v_1 ... v_d" lines and standardizes.
EmbeddingTable parse_embeddings(std::istream& in, std::uint64_t seed, const std::string& source = "<stream>");
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::uint64_t seed);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const Model<double>& model);
Model<double> model_from_json(const std::string& text, const std::string& source = "<model>");
void save_model(const Model<double>& model, const std::filesystem::path& path);
Model<double> load_model(const std::filesystem::path& path);

struct DatasetRecord {
    std::vector<std::string> tokens;
    std::size_t label = 0;
};

std::vector<DatasetRecord> parse_dataset(std::istream& in, const std::string& source = "<stream>");
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);
void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);

/// Maps tokens through the table. Throws ParseError if a label is >= classes.
Dataset to_samples(const std::vector<DatasetRecord>& records, const EmbeddingTable& table, std::size_t classes);

struct SynthConfig {
    std::size_t frames = 4;
    std::size_t dim = 4;
    std::size_t classes = 2;
    std::size_t train_n = 200;
    std::size_t test_n = 100;
    double margin = 0.5;
    std::size_t vocab_size = 64;
};

/// Vocabulary vectors are standardized already, so loading them back through
/// load_embeddings leaves them (numerically) unchanged. Labels are
/// 1 iff w . sum_t x_t > 0 with |w . sum_t x_t| >= margin (w a unit vector),
/// and classes alternate so both are equally represented.
struct SynthTask {
    SynthConfig config;
    std::uint64_t seed = 0;
    std::vector<std::string> vocab;
    std::vector<std::vector<double>> vectors;
    std::vector<double> direction;
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> test;
};

SynthTask gen_synth(const SynthConfig& cfg, std::uint64_t seed);

/// Writes embeddings.txt, train.jsonl, test.jsonl and task.json into `dir`.
void write_synth(const SynthTask& task, const std::filesystem::path& dir);

std::string embeddings_to_text(const std::vector<std::string>& tokens, const std::vector<std::vector<double>>& vectors);

/// Materializes a task in memory as it would be seen after a write/load cycle.
EmbeddingTable synth_embeddings(const SynthTask& task);

struct ReportMeta {
    std::string command;
    std::string domain;
    double epsilon = 0.0;
    std::string strategy;
    std::uint64_t seed = 0;
};

/// JSON report; wall-clock data lives only under the "timing" key.
std::string certification_report(const DatasetCertification& result, const ReportMeta& meta);
std::string comparison_report_json(const DomainComparison& result, const ReportMeta& meta);
/// sample_id,zono_certified,interzono_certified,zono_ms,interzono_ms
std::string comparison_report_csv(const DomainComparison& result);
std::string attack_report(const EmpiricalRobustness& result, const ReportMeta& meta, int steps, int restarts);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace recert::io
