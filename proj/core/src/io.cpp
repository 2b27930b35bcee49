#include "recert/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"

namespace recert::io {

using nlohmann::json;

namespace {

std::string located(const std::string& source, std::size_t line, const std::string& message) {
    std::ostringstream os;
    os << source;
    if (line > 0) {
        os << ":" << line;
    }
    os << ": " << message;
    return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

constexpr char kBase64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::vector<std::uint8_t> doubles_to_le_bytes(const std::vector<double>& values) {
    std::vector<std::uint8_t> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (int b = 0; b < 8; ++b) {
            bytes[i * 8 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
        }
    }
    return bytes;
}

std::vector<double> le_bytes_to_doubles(const std::vector<std::uint8_t>& bytes) {
    std::vector<double> values(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) {
            bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        }
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

json encode_array(std::size_t rows, std::size_t cols, const std::vector<double>& data, bool is_vector) {
    json shape = is_vector ? json::array({rows}) : json::array({rows, cols});
    return json{{"shape", shape}, {"data", base64_encode(doubles_to_le_bytes(data))}};
}

std::vector<double> decode_array(const json& weights, const std::string& name, std::size_t rows, std::size_t cols,
                                 bool is_vector, const std::string& source) {
    if (!weights.contains(name)) {
        throw ParseError(source, 0, "missing weight '" + name + "'");
    }
    const json& entry = weights.at(name);
    if (!entry.is_object() || !entry.contains("shape") || !entry.contains("data")) {
        throw ParseError(source, 0, "weight '" + name + "' needs 'shape' and 'data'");
    }
    const json expected = is_vector ? json::array({rows}) : json::array({rows, cols});
    if (entry.at("shape") != expected) {
        throw ParseError(source, 0,
                         "weight '" + name + "' has shape " + entry.at("shape").dump() + ", expected " + expected.dump());
    }
    if (!entry.at("data").is_string()) {
        throw ParseError(source, 0, "weight '" + name + "' data must be a base64 string");
    }
    std::vector<std::uint8_t> bytes;
    try {
        bytes = base64_decode(entry.at("data").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, 0, "weight '" + name + "': " + e.what());
    }
    if (bytes.size() != rows * cols * 8) {
        throw ParseError(source, 0,
                         "weight '" + name + "' holds " + std::to_string(bytes.size()) + " bytes, expected " +
                             std::to_string(rows * cols * 8));
    }
    return le_bytes_to_doubles(bytes);
}

std::vector<std::string> weight_names(CellKind kind) {
    std::vector<std::string> names;
    for (const auto& g : gate_names(kind)) {
        names.push_back("W_x" + g);
        names.push_back("b_x" + g);
        names.push_back("W_h" + g);
        names.push_back("b_h" + g);
    }
    names.push_back("W_o");
    names.push_back("b_o");
    return names;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(located(source, line, message)), line_(line) {}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += kBase64Alphabet[(v >> 6) & 63];
        out += kBase64Alphabet[v & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = bytes[i] << 16;
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += kBase64Alphabet[(v >> 18) & 63];
        out += kBase64Alphabet[(v >> 12) & 63];
        out += kBase64Alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    std::array<int, 256> lookup{};
    lookup.fill(-1);
    for (int k = 0; k < 64; ++k) {
        lookup[static_cast<unsigned char>(kBase64Alphabet[k])] = k;
    }
    if (text.size() % 4 != 0) {
        throw std::invalid_argument("base64 length is not a multiple of 4");
    }
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=' && i + 4 == text.size() && k >= 2) {
                vals[k] = 0;
                ++pad;
                continue;
            }
            if (pad > 0 || lookup[static_cast<unsigned char>(c)] < 0) {
                throw std::invalid_argument("invalid base64 character");
            }
            vals[k] = lookup[static_cast<unsigned char>(c)];
        }
        const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

void EmbeddingTable::add(const std::string& token, std::vector<double> vec) {
    if (vec.size() != dim_) {
        throw ShapeError("embedding for '" + token + "' has dimension " + std::to_string(vec.size()) + ", expected " +
                         std::to_string(dim_));
    }
    const auto it = index_.find(token);
    if (it != index_.end()) {
        vectors_[it->second] = std::move(vec);
        return;
    }
    index_.emplace(token, tokens_.size());
    tokens_.push_back(token);
    vectors_.push_back(std::move(vec));
}

void EmbeddingTable::standardize() {
    mean_.assign(dim_, 0.0);
    stddev_.assign(dim_, 0.0);
    if (vectors_.empty()) {
        return;
    }
    const double n = static_cast<double>(vectors_.size());
    for (const auto& v : vectors_) {
        for (std::size_t j = 0; j < dim_; ++j) {
            mean_[j] += v[j];
        }
    }
    for (auto& m : mean_) {
        m /= n;
    }
    for (const auto& v : vectors_) {
        for (std::size_t j = 0; j < dim_; ++j) {
            stddev_[j] += (v[j] - mean_[j]) * (v[j] - mean_[j]);
        }
    }
    for (auto& s : stddev_) {
        s = std::sqrt(s / n);
    }
    for (auto& v : vectors_) {
        for (std::size_t j = 0; j < dim_; ++j) {
            v[j] -= mean_[j];
            if (stddev_[j] > 1e-12) {
                v[j] /= stddev_[j];
            }
        }
    }
}

std::vector<double> EmbeddingTable::lookup(const std::string& token) const {
    const auto it = index_.find(token);
    if (it != index_.end()) {
        return vectors_[it->second];
    }
    std::mt19937_64 rng(splitmix(seed_ ^ fnv1a(token)));
    std::uniform_real_distribution<double> dist(-0.1, 0.1);
    std::vector<double> v(dim_);
    for (auto& x : v) {
        x = dist(rng);
    }
    return v;
}

EmbeddingTable parse_embeddings(std::istream& in, std::uint64_t seed, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        std::vector<double> vec;
        std::string field;
        while (fields >> field) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(field, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != field.size() || used == 0) {
                throw ParseError(source, line_no, "invalid number '" + field + "'");
            }
            vec.push_back(v);
        }
        if (vec.empty()) {
            throw ParseError(source, line_no, "token '" + token + "' has no vector");
        }
        if (dim == 0) {
            dim = vec.size();
        } else if (vec.size() != dim) {
            throw ParseError(source, line_no,
                             "ragged embedding: " + std::to_string(vec.size()) + " values, expected " +
                                 std::to_string(dim));
        }
        rows.emplace_back(std::move(token), std::move(vec));
    }
    if (rows.empty()) {
        throw ParseError(source, line_no, "no embeddings found");
    }
    EmbeddingTable table(dim, seed);
    for (auto& [token, vec] : rows) {
        table.add(token, std::move(vec));
    }
    table.standardize();
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open embeddings file");
    }
    return parse_embeddings(in, seed, path.string());
}

std::string model_to_json(const Model<double>& model) {
    validate(model);
    json weights = json::object();
    const auto& names = gate_names(model.cell.kind);
    for (std::size_t g = 0; g < names.size(); ++g) {
        const auto& gate = model.cell.gates[g];
        weights["W_x" + names[g]] = encode_array(gate.wx.rows(), gate.wx.cols(), gate.wx.data(), false);
        weights["b_x" + names[g]] = encode_array(gate.bx.size(), 1, gate.bx, true);
        weights["W_h" + names[g]] = encode_array(gate.wh.rows(), gate.wh.cols(), gate.wh.data(), false);
        weights["b_h" + names[g]] = encode_array(gate.bh.size(), 1, gate.bh, true);
    }
    weights["W_o"] = encode_array(model.output.w.rows(), model.output.w.cols(), model.output.w.data(), false);
    weights["b_o"] = encode_array(model.output.b.size(), 1, model.output.b, true);
    json doc{{"format_version", kModelFormatVersion},
             {"kind", std::string(to_string(model.cell.kind))},
             {"input_size", model.input_size()},
             {"hidden_size", model.hidden_size()},
             {"classes", model.classes()},
             {"weights", weights}};
    return doc.dump(2) + "\n";
}

Model<double> model_from_json(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) {
            throw ParseError(source, 0, "model file must be a JSON object");
        }
        if (!doc.contains("format_version") || doc.at("format_version") != kModelFormatVersion) {
            throw ParseError(source, 0,
                             "unsupported format_version " +
                                 (doc.contains("format_version") ? doc.at("format_version").dump() : "<missing>"));
        }
        CellKind kind;
        try {
            kind = parse_cell_kind(doc.at("kind").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, 0, e.what());
        }
        const auto input = doc.at("input_size").get<std::size_t>();
        const auto hidden = doc.at("hidden_size").get<std::size_t>();
        const auto classes = doc.at("classes").get<std::size_t>();
        if (input == 0 || hidden == 0 || classes < 2) {
            throw ParseError(source, 0, "input_size and hidden_size must be positive and classes >= 2");
        }
        const json& weights = doc.at("weights");
        if (!weights.is_object()) {
            throw ParseError(source, 0, "'weights' must be an object");
        }
        const auto expected = weight_names(kind);
        for (const auto& [name, _] : weights.items()) {
            if (std::find(expected.begin(), expected.end(), name) == expected.end()) {
                throw ParseError(source, 0, "unexpected weight '" + name + "' for a " + std::string(to_string(kind)) +
                                                " cell");
            }
        }
        Model<double> model = make_model(kind, input, hidden, classes);
        const auto& names = gate_names(kind);
        for (std::size_t g = 0; g < names.size(); ++g) {
            auto& gate = model.cell.gates[g];
            gate.wx = Matrix<double>(hidden, input, decode_array(weights, "W_x" + names[g], hidden, input, false, source));
            gate.bx = decode_array(weights, "b_x" + names[g], hidden, 1, true, source);
            gate.wh = Matrix<double>(hidden, hidden, decode_array(weights, "W_h" + names[g], hidden, hidden, false, source));
            gate.bh = decode_array(weights, "b_h" + names[g], hidden, 1, true, source);
        }
        model.output.w = Matrix<double>(classes, hidden, decode_array(weights, "W_o", classes, hidden, false, source));
        model.output.b = decode_array(weights, "b_o", classes, 1, true, source);
        validate(model);
        return model;
    } catch (const json::exception& e) {
        throw ParseError(source, 0, std::string("malformed model document: ") + e.what());
    }
}

void save_model(const Model<double>& model, const std::filesystem::path& path) {
    write_text(path, model_to_json(model));
}

Model<double> load_model(const std::filesystem::path& path) { return model_from_json(read_text(path), path.string()); }

std::vector<DatasetRecord> parse_dataset(std::istream& in, const std::string& source) {
    std::vector<DatasetRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object() || !rec.contains("tokens") || !rec.contains("label")) {
            throw ParseError(source, line_no, "record needs 'tokens' and 'label'");
        }
        const json& tokens = rec.at("tokens");
        if (!tokens.is_array() || tokens.empty()) {
            throw ParseError(source, line_no, "'tokens' must be a non-empty list of strings");
        }
        DatasetRecord r;
        for (const auto& t : tokens) {
            if (!t.is_string()) {
                throw ParseError(source, line_no, "'tokens' must contain only strings");
            }
            r.tokens.push_back(t.get<std::string>());
        }
        const json& label = rec.at("label");
        if (!label.is_number_integer() || label.get<long long>() < 0) {
            throw ParseError(source, line_no, "'label' must be a non-negative integer");
        }
        r.label = label.get<std::size_t>();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open dataset file");
    }
    return parse_dataset(in, path.string());
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
    std::ostringstream os;
    for (const auto& r : records) {
        os << json{{"tokens", r.tokens}, {"label", r.label}}.dump() << "\n";
    }
    write_text(path, os.str());
}

Dataset to_samples(const std::vector<DatasetRecord>& records, const EmbeddingTable& table, std::size_t classes) {
    Dataset out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.label >= classes) {
            throw ParseError("<dataset>", i + 1,
                             "label " + std::to_string(r.label) + " >= class count " + std::to_string(classes));
        }
        Sample s;
        s.label = r.label;
        for (const auto& t : r.tokens) {
            s.frames.push_back(table.lookup(t));
        }
        out.push_back(std::move(s));
    }
    return out;
}

SynthTask gen_synth(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.classes != 2) {
        throw std::invalid_argument("gen_synth: only 2-class tasks are supported");
    }
    if (cfg.frames == 0 || cfg.dim == 0 || cfg.vocab_size < 2) {
        throw std::invalid_argument("gen_synth: frames, dim must be positive and vocab_size >= 2");
    }
    if (cfg.margin < 0.0) {
        throw std::invalid_argument("gen_synth: margin must be non-negative");
    }
    SynthTask task;
    task.config = cfg;
    task.seed = seed;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    EmbeddingTable staging(cfg.dim, seed);
    for (std::size_t v = 0; v < cfg.vocab_size; ++v) {
        std::vector<double> vec(cfg.dim);
        for (auto& x : vec) {
            x = normal(rng);
        }
        staging.add("w" + std::to_string(v), std::move(vec));
    }
    staging.standardize();
    for (const auto& t : staging.tokens()) {
        task.vocab.push_back(t);
        task.vectors.push_back(staging.lookup(t));
    }

    task.direction.resize(cfg.dim);
    double norm = 0.0;
    for (auto& w : task.direction) {
        w = normal(rng);
        norm += w * w;
    }
    norm = std::sqrt(norm);
    for (auto& w : task.direction) {
        w /= norm;
    }

    std::uniform_int_distribution<std::size_t> pick(0, cfg.vocab_size - 1);
    auto make = [&](std::size_t target) {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            DatasetRecord r;
            double score = 0.0;
            for (std::size_t t = 0; t < cfg.frames; ++t) {
                const std::size_t v = pick(rng);
                r.tokens.push_back(task.vocab[v]);
                for (std::size_t j = 0; j < cfg.dim; ++j) {
                    score += task.direction[j] * task.vectors[v][j];
                }
            }
            const bool positive = score > 0.0;
            if (std::fabs(score) >= cfg.margin && positive == (target == 1)) {
                r.label = target;
                return r;
            }
        }
        throw std::invalid_argument("gen_synth: margin too large for the vocabulary; no sample found");
    };
    auto make_split = [&](std::size_t n) {
        std::vector<DatasetRecord> split;
        split.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            split.push_back(make(i % 2));
        }
        std::shuffle(split.begin(), split.end(), rng);
        return split;
    };
    task.train = make_split(cfg.train_n);
    task.test = make_split(cfg.test_n);
    return task;
}

std::string embeddings_to_text(const std::vector<std::string>& tokens, const std::vector<std::vector<double>>& vectors) {
    std::ostringstream os;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        os << tokens[i];
        for (double v : vectors[i]) {
            os << ' ' << format_double(v);
        }
        os << '\n';
    }
    return os.str();
}

EmbeddingTable synth_embeddings(const SynthTask& task) {
    std::istringstream in(embeddings_to_text(task.vocab, task.vectors));
    return parse_embeddings(in, task.seed, "<synth>");
}

void write_synth(const SynthTask& task, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text(dir / "embeddings.txt", embeddings_to_text(task.vocab, task.vectors));
    save_dataset(task.train, dir / "train.jsonl");
    save_dataset(task.test, dir / "test.jsonl");
    const json truth{{"frames", task.config.frames},
                     {"dim", task.config.dim},
                     {"classes", task.config.classes},
                     {"train_n", task.config.train_n},
                     {"test_n", task.config.test_n},
                     {"margin", task.config.margin},
                     {"vocab_size", task.config.vocab_size},
                     {"seed", task.seed},
                     {"direction", task.direction},
                     {"rule", "label = 1 iff direction . sum_t x_t > 0, |direction . sum_t x_t| >= margin"}};
    write_text(dir / "task.json", truth.dump(2) + "\n");
}

std::string certification_report(const DatasetCertification& result, const ReportMeta& meta) {
    json samples = json::array();
    json per_sample_ms = json::array();
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& r = result.samples[i];
        json margins = json::array();
        for (const auto& m : r.margins.margins) {
            margins.push_back(json{{"class", m.other_class}, {"lower", m.lower}});
        }
        json entry{{"id", i}, {"certified", r.certified}, {"clean_correct", r.clean_correct}, {"margins", margins}};
        if (!r.margins.margins.empty()) {
            entry["min_margin"] = r.margins.min_lower();
        }
        if (r.diagnostic) {
            entry["diagnostic"] = *r.diagnostic;
        }
        samples.push_back(std::move(entry));
        per_sample_ms.push_back(r.elapsed_seconds * 1e3);
    }
    json doc{{"command", meta.command},
             {"domain", meta.domain},
             {"epsilon", meta.epsilon},
             {"strategy", meta.strategy},
             {"seed", meta.seed},
             {"num_samples", result.samples.size()},
             {"certified_accuracy", result.certified_accuracy},
             {"clean_accuracy", result.clean_accuracy},
             {"invariant_violations", result.invariant_violations},
             {"samples", samples},
             {"timing", json{{"total_ms", result.total_seconds * 1e3}, {"per_sample_ms", per_sample_ms}}}};
    return doc.dump(2) + "\n";
}

std::string comparison_report_json(const DomainComparison& result, const ReportMeta& meta) {
    json rows = json::array();
    json zono_ms = json::array();
    json inter_ms = json::array();
    for (const auto& r : result.rows) {
        rows.push_back(json{{"sample_id", r.sample_id},
                            {"zono_certified", r.zonotope_certified},
                            {"interzono_certified", r.interzono_certified}});
        zono_ms.push_back(r.zonotope_ms);
        inter_ms.push_back(r.interzono_ms);
    }
    const double ratio = result.zonotope_seconds > 0.0 ? result.interzono_seconds / result.zonotope_seconds : 0.0;
    json doc{{"command", meta.command},
             {"epsilon", meta.epsilon},
             {"strategy", meta.strategy},
             {"seed", meta.seed},
             {"num_samples", result.rows.size()},
             {"zonotope_certified_accuracy", result.zonotope_accuracy},
             {"interzono_certified_accuracy", result.interzono_accuracy},
             {"invariant_violations", result.invariant_violations},
             {"rows", rows},
             {"timing", json{{"zono_total_ms", result.zonotope_seconds * 1e3},
                             {"interzono_total_ms", result.interzono_seconds * 1e3},
                             {"interzono_over_zono", ratio},
                             {"zono_ms", zono_ms},
                             {"interzono_ms", inter_ms}}}};
    return doc.dump(2) + "\n";
}

std::string comparison_report_csv(const DomainComparison& result) {
    std::ostringstream os;
    os << "sample_id,zono_certified,interzono_certified,zono_ms,interzono_ms\n";
    for (const auto& r : result.rows) {
        os << r.sample_id << ',' << (r.zonotope_certified ? 1 : 0) << ',' << (r.interzono_certified ? 1 : 0) << ','
           << format_double(r.zonotope_ms) << ',' << format_double(r.interzono_ms) << '\n';
    }
    return os.str();
}

std::string attack_report(const EmpiricalRobustness& result, const ReportMeta& meta, int steps, int restarts) {
    json robust = json::array();
    for (bool b : result.robust) {
        robust.push_back(b);
    }
    json doc{{"command", meta.command},
             {"epsilon", meta.epsilon},
             {"strategy", meta.strategy},
             {"seed", meta.seed},
             {"steps", steps},
             {"restarts", restarts},
             {"num_samples", result.robust.size()},
             {"empirical_robust_accuracy", result.robust_accuracy},
             {"clean_accuracy", result.clean_accuracy},
             {"robust", robust}};
    return doc.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FileError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw FileError("write failed for " + path.string());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace recert::io
