// extlm: fit, evaluate, inspect and compress with extension language
// models.  Every subcommand is deterministic: identical invocations
// produce identical artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "extlm/codec.hpp"
#include "extlm/eval.hpp"
#include "extlm/mdl.hpp"
#include "extlm/model.hpp"
#include "extlm/select.hpp"
#include "extlm/sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

// Expands directories to their regular files, sorted by path.
std::vector<std::string> expand_inputs(const std::vector<std::string>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> inner;
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file()) inner.push_back(e.path().string());
            std::sort(inner.begin(), inner.end());
            out.insert(out.end(), inner.begin(), inner.end());
        } else {
            out.push_back(p);
        }
    }
    if (out.empty()) throw std::runtime_error("no input files");
    return out;
}

std::vector<extlm::SymbolSequence> ingest_files(const std::vector<std::string>& paths,
                                                const extlm::Alphabet& alphabet) {
    std::vector<extlm::SymbolSequence> out;
    for (const auto& p : paths) out.push_back(extlm::ingest(read_file(p), alphabet));
    return out;
}

extlm::ExtensionModel load_model(const std::string& path) {
    return extlm::ExtensionModel::deserialize(read_file(path));
}

struct CommonOpts {
    std::string alphabet = "printable-ascii-casefolded-70";
    std::size_t order = 10;
    std::uint64_t cmin = 8;
    std::string cost_mode = "mdl";
    double train_frac = 0.9;
    std::size_t threads = 0;

    extlm::SelectionConfig selection() const {
        extlm::SelectionConfig cfg;
        cfg.max_order = order;
        cfg.min_count = cmin;
        cfg.cost_mode = extlm::SelectionConfig::parse_cost_mode(cost_mode, &cfg.constant_bits);
        cfg.threads = threads;
        return cfg;
    }
};

json report_to_json(const extlm::CodelengthReport& r) {
    auto terms = [](const std::vector<std::pair<std::string, double>>& t) {
        json j = json::object();
        for (const auto& [k, v] : t) j[k] = v;
        return j;
    };
    return json{{"dictionary_bits", r.dict_bits},
                {"extensions_bits", r.ext_bits},
                {"counts_bits", r.counts_bits},
                {"data_bits", r.data_bits},
                {"total_bits", r.total},
                {"dictionary_terms", terms(r.dict_terms)},
                {"extensions_terms", terms(r.ext_terms)},
                {"counts_terms", terms(r.counts_terms)}};
}

std::string report_to_csv(const extlm::CodelengthReport& r) {
    std::ostringstream out;
    out << "part,term,bits\n";
    for (const auto& [k, v] : r.dict_terms) out << "dictionary," << k << ',' << v << '\n';
    for (const auto& [k, v] : r.ext_terms) out << "extensions," << k << ',' << v << '\n';
    for (const auto& [k, v] : r.counts_terms) out << "counts," << k << ',' << v << '\n';
    out << "dictionary,subtotal," << r.dict_bits << '\n';
    out << "extensions,subtotal," << r.ext_bits << '\n';
    out << "counts,subtotal," << r.counts_bits << '\n';
    out << "data,subtotal," << r.data_bits << '\n';
    out << "total,total," << r.total << '\n';
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"extension language models: MDL selection, evaluation, compression"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> inputs;
    std::string model_path, out_path, ledger_path, context_arg;
    std::string orders_arg = "0..10", classes_arg = "nem,ngram", cost_modes_arg = "mdl";
    bool as_json = false, as_csv = false;

    auto add_common = [&](CLI::App* cmd, bool with_selection) {
        cmd->add_option("--alphabet", opts.alphabet, "alphabet profile")
            ->capture_default_str();
        if (with_selection) {
            cmd->add_option("--order,-n", opts.order, "maximum context order")
                ->capture_default_str();
            cmd->add_option("--cmin", opts.cmin, "candidate frequency threshold")
                ->capture_default_str();
            cmd->add_option("--cost-mode", opts.cost_mode,
                            "mdl | const:<bits> | exact")
                ->capture_default_str();
        }
        cmd->add_option("--threads", opts.threads, "worker cap (0 = auto, EXTLM_THREADS)");
    };

    auto* fit_cmd = app.add_subcommand("fit", "select and estimate a model from text");
    fit_cmd->add_option("--corpus", inputs, "training files or directories")->required();
    fit_cmd->add_option("--out", model_path, "model file to write")->required();
    fit_cmd->add_option("--ledger", ledger_path, "write the selection ledger as CSV");
    fit_cmd->add_option("--train-frac", opts.train_frac,
                        "per-file prefix used for training")
        ->capture_default_str();
    add_common(fit_cmd, true);

    auto* eval_cmd = app.add_subcommand("eval", "held-out message entropy of a model");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--test", inputs, "test files or directories")->required();
    eval_cmd->add_option("--train-frac", opts.train_frac,
                         "evaluate on the per-file remainder after this prefix "
                         "(0 = whole files)")
        ->capture_default_str();
    eval_cmd->add_flag("--json", as_json, "JSON output");

    auto* report_cmd = app.add_subcommand("report", "two-part codelength of a model on text");
    report_cmd->add_option("--model", model_path, "model file")->required();
    report_cmd->add_option("--corpus", inputs, "text files or directories")->required();
    report_cmd->add_option("--train-frac", opts.train_frac, "per-file prefix to account")
        ->capture_default_str();
    report_cmd->add_flag("--json", as_json, "JSON output");
    report_cmd->add_flag("--csv", as_csv, "CSV output");

    auto* sweep_cmd = app.add_subcommand("sweep", "efficiency data per model class and order");
    sweep_cmd->add_option("--corpus", inputs, "files or directories")->required();
    sweep_cmd->add_option("--orders", orders_arg, "orders, e.g. 0..10 or 0,3,7")
        ->capture_default_str();
    sweep_cmd->add_option("--classes", classes_arg, "comma list: nem,ngram")
        ->capture_default_str();
    sweep_cmd->add_option("--cost-modes", cost_modes_arg, "comma list for nem rows")
        ->capture_default_str();
    sweep_cmd->add_option("--csv", out_path, "CSV file to write (default stdout)");
    sweep_cmd->add_option("--train-frac", opts.train_frac, "per-file training prefix")
        ->capture_default_str();
    add_common(sweep_cmd, true);

    auto* inspect_cmd = app.add_subcommand("inspect", "show one context of a model");
    inspect_cmd->add_option("--model", model_path, "model file")->required();
    inspect_cmd->add_option("--context", context_arg, "context string (escaped)")->required();

    std::string in_file, out_file;
    auto* compress_cmd = app.add_subcommand("compress", "encode text with a fitted model");
    compress_cmd->add_option("input", in_file, "input file")->required();
    compress_cmd->add_option("output", out_file, "output file")->required();
    compress_cmd->add_option("--model", model_path, "model file")->required();

    auto* decompress_cmd = app.add_subcommand("decompress", "decode a coded stream");
    decompress_cmd->add_option("input", in_file, "input file")->required();
    decompress_cmd->add_option("output", out_file, "output file")->required();
    decompress_cmd->add_option("--model", model_path, "model file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit_cmd) {
            extlm::Alphabet alphabet = extlm::Alphabet::from_spec(opts.alphabet);
            auto files = ingest_files(expand_inputs(inputs), alphabet);
            extlm::SplitResult sp = extlm::split(files, {opts.train_frac});
            extlm::FitResult res = extlm::fit(sp.train, alphabet, opts.selection());
            for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
            write_file(model_path, res.model.serialize());
            if (!ledger_path.empty()) {
                std::ofstream lout(ledger_path);
                res.ledger.write_csv(lout, alphabet);
            }
            std::cout << "contexts=" << res.model.context_count()
                      << " parameters=" << res.model.parameter_count()
                      << " considered=" << res.ledger.rows.size()
                      << " accepted=" << res.ledger.accepted_count()
                      << " train_symbols=" << sp.train.size() << "\n";
        } else if (*eval_cmd) {
            extlm::ExtensionModel model = load_model(model_path);
            auto files = ingest_files(expand_inputs(inputs), model.alphabet());
            extlm::SymbolSequence test;
            if (opts.train_frac == 0.0) {
                for (const auto& f : files) test.insert(test.end(), f.begin(), f.end());
            } else {
                if (opts.train_frac >= 1.0)
                    throw std::runtime_error("--train-frac 1.0 leaves no test data");
                test = extlm::split(files, {opts.train_frac}).test;
            }
            extlm::EvalReport r = extlm::evaluate(model, model_path, test);
            if (as_json) {
                json j{{"model", r.model_name},
                       {"parameters", r.parameter_count},
                       {"contexts", r.context_count},
                       {"test_symbols", r.test_symbols},
                       {"test_bits", r.test_bits},
                       {"test_entropy_bits_per_symbol", r.test_entropy}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "test_symbols=" << r.test_symbols << " test_bits=" << r.test_bits
                          << " entropy=" << r.test_entropy << " bits/symbol\n";
            }
        } else if (*report_cmd) {
            extlm::ExtensionModel model = load_model(model_path);
            auto files = ingest_files(expand_inputs(inputs), model.alphabet());
            extlm::SymbolSequence text = extlm::split(files, {opts.train_frac}).train;
            extlm::CodelengthReport r = extlm::total_codelength(model, text);
            if (as_csv)
                std::cout << report_to_csv(r);
            else
                std::cout << report_to_json(r).dump(2) << "\n";
        } else if (*sweep_cmd) {
            extlm::Alphabet alphabet = extlm::Alphabet::from_spec(opts.alphabet);
            auto files = ingest_files(expand_inputs(inputs), alphabet);
            extlm::SplitResult sp = extlm::split(files, {opts.train_frac});

            std::vector<std::size_t> orders;
            if (auto dots = orders_arg.find(".."); dots != std::string::npos) {
                std::size_t lo = std::stoul(orders_arg.substr(0, dots));
                std::size_t hi = std::stoul(orders_arg.substr(dots + 2));
                for (std::size_t k = lo; k <= hi; ++k) orders.push_back(k);
            } else {
                std::istringstream ss(orders_arg);
                for (std::string tok; std::getline(ss, tok, ',');)
                    orders.push_back(std::stoul(tok));
            }
            auto split_list = [](const std::string& s) {
                std::vector<std::string> out;
                std::istringstream ss(s);
                for (std::string tok; std::getline(ss, tok, ',');) out.push_back(tok);
                return out;
            };
            std::vector<extlm::SweepSetting> settings;
            for (const auto& cls : split_list(classes_arg)) {
                for (std::size_t k : orders) {
                    if (cls == "nem") {
                        for (const auto& cm : split_list(cost_modes_arg))
                            settings.push_back({cls, k, cm});
                    } else {
                        settings.push_back({cls, k, "-"});
                    }
                }
            }
            auto rows = extlm::efficiency_sweep(sp.train, sp.test, alphabet, settings,
                                                opts.selection());
            std::string csv = extlm::sweep_csv(rows);
            if (out_path.empty())
                std::cout << csv;
            else
                write_file(out_path, csv);
        } else if (*inspect_cmd) {
            extlm::ExtensionModel model = load_model(model_path);
            std::string raw = extlm::unescape_bytes(context_arg);
            extlm::SymbolSequence ctx = extlm::ingest(raw, model.alphabet());
            std::cout << extlm::inspect(model, ctx);
        } else if (*compress_cmd) {
            extlm::ExtensionModel model = load_model(model_path);
            if (model.alphabet().spec_string() != "byte-256")
                std::cerr << "warning: alphabet '" << model.alphabet().spec_string()
                          << "' folds bytes together; decompression restores representative "
                             "bytes only (use byte-256 for archival round trips)\n";
            std::string text = read_file(in_file);
            extlm::SymbolSequence seq = extlm::ingest(text, model.alphabet());
            extlm::CodedStream stream = extlm::encode(model, seq);
            std::ofstream out(out_file, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + out_file);
            extlm::write_stream(out, stream);
            std::cout << "symbols=" << stream.symbol_count
                      << " payload_bytes=" << stream.payload.size() << "\n";
        } else if (*decompress_cmd) {
            extlm::ExtensionModel model = load_model(model_path);
            std::ifstream in(in_file, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open " + in_file);
            extlm::CodedStream stream = extlm::read_stream(in);
            extlm::SymbolSequence seq = extlm::decode(model, stream);
            std::string text;
            text.reserve(seq.size());
            for (extlm::Sym s : seq)
                text.push_back(static_cast<char>(model.alphabet().symbol_byte(s)));
            write_file(out_file, text);
            std::cout << "symbols=" << seq.size() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << app.get_subcommands().front()->get_name() << ": " << e.what()
                  << "\n";
        return 1;
    }
    return 0;
}
