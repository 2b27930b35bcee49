#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "recert/attacks.hpp"
#include "recert/certifier.hpp"
#include "recert/io.hpp"
#include "recert/trainer.hpp"

namespace recert::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad user input that is not tied to a line of a specific file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised after a report is written when some sample hit an invariant violation.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DataOptions {
    std::string model;
    std::string data;
    std::string embeddings;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("--model", d.model, "model JSON file")->required();
    cmd->add_option("--data", d.data, "dataset JSONL file")->required();
    cmd->add_option("--embeddings", d.embeddings, "GloVe-style text embeddings")->required();
}

struct Loaded {
    Model<double> model;
    Dataset data;
};

Dataset load_samples(const std::string& data, const io::EmbeddingTable& table, std::size_t input_size,
                     std::size_t classes) {
    if (table.dim() != input_size) {
        throw InputError("embedding dimension " + std::to_string(table.dim()) + " does not match model input_size " +
                         std::to_string(input_size));
    }
    Dataset out = io::to_samples(io::load_dataset(data), table, classes);
    if (out.empty()) {
        throw InputError(data + ": dataset is empty");
    }
    return out;
}

Loaded load_inputs(const DataOptions& d, std::uint64_t seed) {
    Loaded l{io::load_model(d.model), {}};
    const io::EmbeddingTable table = io::load_embeddings(d.embeddings, seed);
    l.data = load_samples(d.data, table, l.model.input_size(), l.model.classes());
    return l;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        io::write_text(path, text);
    }
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

void check_epsilon(double eps) {
    if (!(eps >= 0.0)) {
        throw InputError("--eps must be non-negative");
    }
}

PerturbationSpec spec_from(const std::string& strategy, double eps) {
    try {
        return parse_strategy(strategy, eps);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

void check_frame(const PerturbationSpec& spec, const Dataset& data) {
    if (spec.strategy != Strategy::one_frame) {
        return;
    }
    for (const auto& s : data) {
        if (spec.frame >= s.frames.size()) {
            throw InputError("--strategy frame " + std::to_string(spec.frame) + " is beyond a sample of length " +
                             std::to_string(s.frames.size()));
        }
    }
}

DomainKind domain_from(const std::string& text) {
    try {
        return parse_domain_kind(text);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

// ---- certify ---------------------------------------------------------------

struct CertifyOptions {
    DataOptions data;
    double eps = 0.0;
    std::string domain = "interzono";
    std::string strategy = "all-frame";
    std::string out;
};

int do_certify(const CertifyOptions& o, std::uint64_t seed, std::ostream& out) {
    check_epsilon(o.eps);
    const Loaded in = load_inputs(o.data, seed);
    const PerturbationSpec spec = spec_from(o.strategy, o.eps);
    check_frame(spec, in.data);
    const DomainKind domain = domain_from(o.domain);
    const DatasetCertification r = certified_accuracy(in.model, in.data, spec, domain);
    const io::ReportMeta meta{"certify", std::string(to_string(domain)), o.eps, to_string(spec), seed};
    emit(o.out, io::certification_report(r, meta), out);
    if (!o.out.empty()) {
        out << "certified_accuracy " << fixed(r.certified_accuracy) << " clean_accuracy " << fixed(r.clean_accuracy)
            << " samples " << r.samples.size() << "\n";
    }
    if (r.invariant_violations > 0) {
        throw InvariantError(std::to_string(r.invariant_violations) + " sample(s) hit an invariant violation");
    }
    return kExitOk;
}

// ---- compare ---------------------------------------------------------------

struct CompareOptions {
    DataOptions data;
    double eps = 0.0;
    std::string strategy = "all-frame";
    std::string out;
    std::string csv;
};

int do_compare(const CompareOptions& o, std::uint64_t seed, std::ostream& out) {
    check_epsilon(o.eps);
    const Loaded in = load_inputs(o.data, seed);
    const PerturbationSpec spec = spec_from(o.strategy, o.eps);
    check_frame(spec, in.data);
    const DomainComparison r = compare_domains(in.model, in.data, spec);
    const io::ReportMeta meta{"compare", "zonotope,interzono", o.eps, to_string(spec), seed};
    emit(o.out, io::comparison_report_json(r, meta), out);
    if (!o.csv.empty()) {
        io::write_text(o.csv, io::comparison_report_csv(r));
    }
    if (!o.out.empty()) {
        out << "zonotope " << fixed(r.zonotope_accuracy) << " interzono " << fixed(r.interzono_accuracy)
            << " samples " << r.rows.size() << "\n";
    }
    if (r.invariant_violations > 0) {
        throw InvariantError(std::to_string(r.invariant_violations) + " sample(s) hit an invariant violation");
    }
    return kExitOk;
}

// ---- attack ----------------------------------------------------------------

struct AttackOptions {
    DataOptions data;
    double eps = 0.0;
    int steps = 40;
    int restarts = 10;
    double step_size = 0.0;
    std::string strategy = "all-frame";
    std::string out;
};

int do_attack(const AttackOptions& o, std::uint64_t seed, std::ostream& out) {
    check_epsilon(o.eps);
    if (o.steps < 1 || o.restarts < 1) {
        throw InputError("--steps and --restarts must be at least 1");
    }
    if (o.step_size < 0.0) {
        throw InputError("--step-size must be non-negative");
    }
    const Loaded in = load_inputs(o.data, seed);
    const PerturbationSpec spec = spec_from(o.strategy, o.eps);
    check_frame(spec, in.data);
    AttackConfig cfg;
    cfg.epsilon = o.eps;
    cfg.steps = o.steps;
    cfg.restarts = o.restarts;
    cfg.step_size = o.step_size;
    cfg.strategy = spec.strategy;
    cfg.frame = spec.frame;
    cfg.seed = seed;
    const EmpiricalRobustness r = empirical_robust_accuracy(in.model, in.data, cfg);
    const io::ReportMeta meta{"attack", "", o.eps, to_string(spec), seed};
    emit(o.out, io::attack_report(r, meta, o.steps, o.restarts), out);
    if (!o.out.empty()) {
        out << "empirical_robust_accuracy " << fixed(r.robust_accuracy) << " clean_accuracy "
            << fixed(r.clean_accuracy) << " samples " << r.robust.size() << "\n";
    }
    return kExitOk;
}

// ---- radius ----------------------------------------------------------------

struct RadiusOptions {
    DataOptions data;
    double hi = 1.0;
    double tol = 1e-3;
    std::string domain = "interzono";
    std::string strategy = "all-frame";
    std::string out;
};

int do_radius(const RadiusOptions& o, std::uint64_t seed, std::ostream& out) {
    if (!(o.hi > 0.0) || !(o.tol > 0.0)) {
        throw InputError("--hi and --tol must be positive");
    }
    const Loaded in = load_inputs(o.data, seed);
    const PerturbationSpec spec = spec_from(o.strategy, 0.0);
    check_frame(spec, in.data);
    const DomainKind domain = domain_from(o.domain);
    json rows = json::array();
    double sum = 0.0;
    for (std::size_t i = 0; i < in.data.size(); ++i) {
        const RadiusResult r = max_certified_radius(in.model, in.data[i], o.hi, o.tol, domain, spec.strategy,
                                                    spec.frame);
        rows.push_back(json{{"id", i}, {"radius", r.radius}, {"certified_at_lower", r.certified_at_lower}});
        sum += r.radius;
    }
    const double mean = sum / static_cast<double>(in.data.size());
    const json doc{{"command", "radius"},
                   {"domain", std::string(to_string(domain))},
                   {"strategy", to_string(spec)},
                   {"hi", o.hi},
                   {"tol", o.tol},
                   {"seed", seed},
                   {"mean_radius", mean},
                   {"samples", rows}};
    emit(o.out, doc.dump(2) + "\n", out);
    if (!o.out.empty()) {
        out << "mean_radius " << fixed(mean, 6) << " samples " << in.data.size() << "\n";
    }
    return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainOptions {
    std::string config;
    std::string out;
    std::string metrics;
};

template <class T>
T take(json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    T v = doc.at(key).get<T>();
    doc.erase(key);
    return v;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

int do_train(const TrainOptions& o, std::uint64_t seed, std::ostream& out) {
    json doc;
    try {
        doc = json::parse(io::read_text(o.config));
    } catch (const json::parse_error& e) {
        throw io::ParseError(o.config, 0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw io::ParseError(o.config, 0, "train config must be a JSON object");
    }
    const fs::path base = fs::path(o.config).parent_path();

    TrainConfig cfg;
    std::string kind_text;
    std::size_t hidden = 0;
    std::size_t classes = 2;
    std::string embeddings;
    std::string train_path;
    std::string eval_path;
    std::string init_path;
    double init_scale = 0.0;
    try {
        kind_text = take<std::string>(doc, "kind", "lstm");
        hidden = take<std::size_t>(doc, "hidden_size", 8);
        classes = take<std::size_t>(doc, "classes", 2);
        embeddings = take<std::string>(doc, "embeddings", "");
        train_path = take<std::string>(doc, "train", "");
        eval_path = take<std::string>(doc, "eval", "");
        init_path = take<std::string>(doc, "init_model", "");
        init_scale = take<double>(doc, "init_scale", 0.0);
        cfg.mode = parse_train_mode(take<std::string>(doc, "mode", "regular"));
        cfg.domain = parse_domain_kind(take<std::string>(doc, "domain", "interzono"));
        cfg.epochs = take<int>(doc, "epochs", cfg.epochs);
        cfg.batch_size = take<std::size_t>(doc, "batch_size", cfg.batch_size);
        cfg.learning_rate = take<double>(doc, "learning_rate", cfg.learning_rate);
        cfg.momentum = take<double>(doc, "momentum", cfg.momentum);
        cfg.epsilon_train = take<double>(doc, "epsilon_train", cfg.epsilon_train);
        cfg.lambda_max = take<double>(doc, "lambda_max", cfg.lambda_max);
        cfg.ramp_fraction = take<double>(doc, "ramp_fraction", cfg.ramp_fraction);
        cfg.attack_steps = take<int>(doc, "attack_steps", cfg.attack_steps);
    } catch (const json::exception& e) {
        throw io::ParseError(o.config, 0, std::string("bad field type: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw io::ParseError(o.config, 0, e.what());
    }
    if (!doc.empty()) {
        throw io::ParseError(o.config, 0, "unknown key '" + doc.begin().key() + "'");
    }
    if (embeddings.empty() || train_path.empty()) {
        throw io::ParseError(o.config, 0, "'embeddings' and 'train' are required");
    }
    cfg.seed = seed;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw io::ParseError(o.config, 0, e.what());
    }

    const io::EmbeddingTable table = io::load_embeddings(resolve(base, embeddings), seed);
    Model<double> init;
    if (!init_path.empty()) {
        init = io::load_model(resolve(base, init_path));
    } else {
        CellKind kind;
        try {
            kind = parse_cell_kind(kind_text);
        } catch (const std::invalid_argument& e) {
            throw io::ParseError(o.config, 0, e.what());
        }
        if (hidden == 0 || classes < 2) {
            throw io::ParseError(o.config, 0, "hidden_size must be positive and classes >= 2");
        }
        init = make_model(kind, table.dim(), hidden, classes);
        std::mt19937_64 rng(seed);
        randomize(init, rng, init_scale);
    }
    const Dataset train_set =
        load_samples(resolve(base, train_path).string(), table, init.input_size(), init.classes());
    Dataset eval_set;
    if (!eval_path.empty()) {
        eval_set = load_samples(resolve(base, eval_path).string(), table, init.input_size(), init.classes());
    }

    std::ostringstream rows;
    bool aborted = false;
    const Model<double> trained = train(
        init, train_set, cfg,
        [&](const EpochMetrics& m) {
            json row{{"epoch", m.epoch},
                     {"standard_loss", m.standard_loss},
                     {"robust_loss", m.robust_loss},
                     {"combined_loss", m.combined_loss},
                     {"epsilon", m.epsilon},
                     {"lambda", m.lambda},
                     {"clean_acc", m.clean_accuracy}};
            if (m.certified_accuracy) {
                row["certified_acc"] = *m.certified_accuracy;
            }
            if (m.aborted) {
                row["aborted"] = true;
                aborted = true;
            }
            rows << row.dump() << "\n";
            out << "epoch " << m.epoch << " loss " << fixed(m.combined_loss) << " clean " << fixed(m.clean_accuracy);
            if (m.certified_accuracy) {
                out << " certified " << fixed(*m.certified_accuracy);
            }
            out << "\n";
        },
        eval_set.empty() ? nullptr : &eval_set);
    if (!o.metrics.empty()) {
        io::write_text(o.metrics, rows.str());
    }
    io::save_model(trained, o.out);
    if (aborted) {
        throw InvariantError("training diverged (non-finite loss); model saved as of the last finite update");
    }
    return kExitOk;
}

// ---- gen-synth -------------------------------------------------------------

struct SynthOptions {
    std::string config;
    std::string out;
};

int do_gen_synth(const SynthOptions& o, std::uint64_t seed, std::ostream& out) {
    io::SynthConfig cfg;
    if (!o.config.empty()) {
        json doc;
        try {
            doc = json::parse(io::read_text(o.config));
        } catch (const json::parse_error& e) {
            throw io::ParseError(o.config, 0, std::string("invalid JSON: ") + e.what());
        }
        if (!doc.is_object()) {
            throw io::ParseError(o.config, 0, "synth config must be a JSON object");
        }
        try {
            cfg.frames = take<std::size_t>(doc, "frames", cfg.frames);
            cfg.dim = take<std::size_t>(doc, "dim", cfg.dim);
            cfg.classes = take<std::size_t>(doc, "classes", cfg.classes);
            cfg.train_n = take<std::size_t>(doc, "train_n", cfg.train_n);
            cfg.test_n = take<std::size_t>(doc, "test_n", cfg.test_n);
            cfg.margin = take<double>(doc, "margin", cfg.margin);
            cfg.vocab_size = take<std::size_t>(doc, "vocab_size", cfg.vocab_size);
        } catch (const json::exception& e) {
            throw io::ParseError(o.config, 0, std::string("bad field type: ") + e.what());
        }
        if (!doc.empty()) {
            throw io::ParseError(o.config, 0, "unknown key '" + doc.begin().key() + "'");
        }
    }
    io::SynthTask task;
    try {
        task = io::gen_synth(cfg, seed);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    io::write_synth(task, o.out);
    out << "wrote " << task.train.size() << " train and " << task.test.size() << " test samples to " << o.out
        << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certification and certified training for recurrent networks", "recert"};
    app.require_subcommand(1, 1);
    std::uint64_t seed = 0;
    auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "seed for every random choice (default 0)"); };

    CertifyOptions certify_opts;
    auto* certify = app.add_subcommand("certify", "certify a dataset with one abstract domain");
    add_data_options(certify, certify_opts.data);
    certify->add_option("--eps", certify_opts.eps, "l-infinity radius per frame")->required();
    certify->add_option("--domain", certify_opts.domain, "zonotope or interzono");
    certify->add_option("--strategy", certify_opts.strategy, "all-frame or one-frame:<t>");
    certify->add_option("--out", certify_opts.out, "report JSON (stdout if omitted)");
    add_seed(certify);

    CompareOptions compare_opts;
    auto* compare = app.add_subcommand("compare", "certify with both domains, paired per sample");
    add_data_options(compare, compare_opts.data);
    compare->add_option("--eps", compare_opts.eps, "l-infinity radius per frame")->required();
    compare->add_option("--strategy", compare_opts.strategy, "all-frame or one-frame:<t>");
    compare->add_option("--out", compare_opts.out, "report JSON (stdout if omitted)");
    compare->add_option("--csv", compare_opts.csv, "paired rows as CSV");
    add_seed(compare);

    TrainOptions train_opts;
    auto* train_cmd = app.add_subcommand("train", "train a model (regular, at-fgsm, at-pgd or certified)");
    train_cmd->add_option("--config", train_opts.config, "training config JSON")->required();
    train_cmd->add_option("--out", train_opts.out, "output model JSON")->required();
    train_cmd->add_option("--metrics", train_opts.metrics, "per-epoch metrics JSONL");
    add_seed(train_cmd);

    AttackOptions attack_opts;
    auto* attack = app.add_subcommand("attack", "PGD empirical robust accuracy");
    add_data_options(attack, attack_opts.data);
    attack->add_option("--eps", attack_opts.eps, "l-infinity radius per frame")->required();
    attack->add_option("--steps", attack_opts.steps, "PGD iterations (default 40)");
    attack->add_option("--restarts", attack_opts.restarts, "random restarts (default 10)");
    attack->add_option("--step-size", attack_opts.step_size, "step size (default 2.5*eps/steps)");
    attack->add_option("--strategy", attack_opts.strategy, "all-frame or one-frame:<t>");
    attack->add_option("--out", attack_opts.out, "report JSON (stdout if omitted)");
    add_seed(attack);

    RadiusOptions radius_opts;
    auto* radius = app.add_subcommand("radius", "largest certified radius per sample by bisection");
    add_data_options(radius, radius_opts.data);
    radius->add_option("--hi", radius_opts.hi, "upper end of the search interval");
    radius->add_option("--tol", radius_opts.tol, "bisection tolerance");
    radius->add_option("--domain", radius_opts.domain, "zonotope or interzono");
    radius->add_option("--strategy", radius_opts.strategy, "all-frame or one-frame:<t>");
    radius->add_option("--out", radius_opts.out, "report JSON (stdout if omitted)");
    add_seed(radius);

    SynthOptions synth_opts;
    auto* synth = app.add_subcommand("gen-synth", "generate the synthetic linear-functional task");
    synth->add_option("--config", synth_opts.config, "synth config JSON (defaults if omitted)");
    synth->add_option("--out", synth_opts.out, "output directory")->required();
    add_seed(synth);

    std::vector<const char*> argv{"recert"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInputError;
    }

    try {
        if (*certify) return do_certify(certify_opts, seed, out);
        if (*compare) return do_compare(compare_opts, seed, out);
        if (*train_cmd) return do_train(train_opts, seed, out);
        if (*attack) return do_attack(attack_opts, seed, out);
        if (*radius) return do_radius(radius_opts, seed, out);
        if (*synth) return do_gen_synth(synth_opts, seed, out);
    } catch (const InvariantError& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const InvertedBoundsError& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const io::FileError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitInputError;
}

}  // namespace recert::cli
