// Command-line front end: server, format conversion, analysis, drawing,
// generators and archive maintenance.

#include <oga/generators.hpp>
#include <oga/json.hpp>
#include <oga/service/service.hpp>

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace oga;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

formats::FormatId format_or_guess(const std::string& name, const std::string& path, const std::string& bytes) {
    if (!name.empty()) {
        auto f = formats::parse_format_name(name);
        if (!f) throw UnknownFormat("unknown format '" + name + "'");
        return *f;
    }
    try {
        return formats::detect_format(bytes);
    } catch (const UnknownFormat&) {
        return formats::format_from_extension(path);
    }
}

Graph load(const std::string& path, const std::string& format) {
    auto bytes = read_all(path);
    return formats::parse(bytes, format_or_guess(format, path, bytes));
}

Graph with_attr(const Graph& g, const std::string& key, const std::string& value) {
    auto attrs = g.graph_attrs();
    attrs[key] = value;
    return build_graph(g.directed(), g.nodes(), g.edges(), std::move(attrs));
}

generators::MutationConfig mutation_config_from_json(const Json& j) {
    generators::MutationConfig c;
    c.rounds = j.value("rounds", c.rounds);
    c.ops_per_round = j.value("ops_per_round", c.ops_per_round);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.min_n = j.value("min_n", c.min_n);
    c.max_n = j.value("max_n", c.max_n);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    if (j.contains("op_probabilities")) {
        const auto& p = j["op_probabilities"];
        if (p.is_array()) {
            if (p.size() != 5) throw InvalidConfig("op_probabilities needs 5 entries");
            for (std::size_t i = 0; i < 5; ++i) c.op_probabilities[i] = p[i].get<double>();
        } else {
            c.op_probabilities.fill(0);
            for (const auto& [name, v] : p.items()) {
                auto it = std::find(generators::mutation_op_names.begin(), generators::mutation_op_names.end(), name);
                if (it == generators::mutation_op_names.end()) throw InvalidConfig("unknown operation '" + name + "'");
                c.op_probabilities[static_cast<std::size_t>(it - generators::mutation_op_names.begin())] = v.get<double>();
            }
        }
    }
    if (j.contains("filter")) {
        const auto& f = j["filter"];
        c.filter.require_connected = f.value("require_connected", c.filter.require_connected);
        c.filter.density_low = f.value("density_low", c.filter.density_low);
        c.filter.density_high = f.value("density_high", c.filter.density_high);
        c.filter.max_degree_seq_distance = f.value("max_degree_seq_distance", c.filter.max_degree_seq_distance);
    }
    generators::validate(c);
    return c;
}

service::Service* running = nullptr;

void on_signal(int) {
    if (running) running->stop_listening();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open graph archive: HTTP service and graph tools"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "Run the HTTP API (environment: OGA_DATA_DIR, OGA_LISTEN_ADDR, OGA_OPEN_MODE, ...)");
    std::string data_dir, listen;
    bool open_mode = false, access_log = false;
    std::size_t threads = 0;
    serve->add_option("--data-dir", data_dir, "Archive directory");
    serve->add_option("--listen", listen, "host:port");
    serve->add_flag("--open", open_mode, "Accept writes without a token");
    serve->add_option("--threads", threads, "Analysis worker threads");
    serve->add_flag("--access-log", access_log, "Log requests to stderr");

    auto* convert = app.add_subcommand("convert", "Convert between graph formats; the loss report goes to stderr");
    std::string in_path, out_path, from, to;
    convert->add_option("input", in_path)->required();
    convert->add_option("output", out_path)->required();
    convert->add_option("--from", from, "Input format (detected when omitted)");
    convert->add_option("--to", to, "Output format (taken from the output extension when omitted)");

    auto* analyze = app.add_subcommand("analyze", "Print the structural properties of a graph as JSON");
    std::string format;
    std::size_t threshold = analysis::AnalysisConfig{}.vertex_threshold;
    long long budget_ms = analysis::AnalysisConfig{}.time_budget.count();
    analyze->add_option("file", in_path)->required();
    analyze->add_option("--format", format);
    analyze->add_option("--vertex-threshold", threshold);
    analyze->add_option("--time-budget-ms", budget_ms, "0 disables the budget");

    auto* draw = app.add_subcommand("draw", "Force-directed drawing as SVG");
    int iterations = layout::default_iterations;
    std::uint64_t seed = 0;
    draw->add_option("file", in_path)->required();
    draw->add_option("svg", out_path)->required();
    draw->add_option("--format", format);
    draw->add_option("--iterations", iterations);
    draw->add_option("--seed", seed);

    auto* generate = app.add_subcommand("generate", "Synthetic graph collections");
    generate->require_subcommand(1);
    std::string out_dir = ".";
    std::string config_path;
    auto* rome = generate->add_subcommand("rome", "Mutate a seed graph round by round");
    rome->add_option("seed-graph", in_path)->required();
    rome->add_option("--config", config_path, "JSON mutation settings");
    rome->add_option("--seed", seed, "RNG seed (overrides the config)");
    rome->add_option("--out", out_dir);
    std::vector<std::string> inputs;
    auto* north = generate->add_subcommand("north", "Deduplicate, connect and make acyclic a set of digraphs");
    north->add_option("inputs", inputs)->required();
    north->add_option("--seed", seed);
    north->add_option("--out", out_dir);

    auto* import = app.add_subcommand("import", "Import a zip of graph files into an archive");
    std::string owner = "import";
    import->add_option("zip", in_path)->required();
    import->add_option("--data-dir", data_dir, "Archive directory (default: $OGA_DATA_DIR)");
    import->add_option("--owner", owner);

    auto* token = app.add_subcommand("token", "Issue an API token");
    token->add_option("owner", owner)->required();
    token->add_option("--data-dir", data_dir, "Archive directory (default: $OGA_DATA_DIR)");

    auto* audit = app.add_subcommand("audit", "Check stored originals against their checksums and parses");
    audit->add_option("--data-dir", data_dir, "Archive directory (default: $OGA_DATA_DIR)");

    CLI11_PARSE(app, argc, argv);
    if (data_dir.empty() && !*serve) data_dir = service::config_from_env().data_dir.string();

    try {
        if (*serve) {
            auto cfg = service::config_from_env();
            if (!data_dir.empty()) cfg.data_dir = data_dir;
            if (!listen.empty()) std::tie(cfg.listen_host, cfg.listen_port) = service::parse_listen_addr(listen);
            if (open_mode) cfg.open_mode = true;
            if (threads) cfg.worker.threads = threads;
            cfg.access_log = access_log;
            service::Service svc(cfg);
            int port = svc.bind();
            std::cerr << "listening on " << cfg.listen_host << ":" << port << ", data in " << cfg.data_dir.string()
                      << (cfg.open_mode ? " (open mode)" : "") << "\n";
            running = &svc;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            svc.run();
            running = nullptr;
        } else if (*convert) {
            auto bytes = read_all(in_path);
            auto src = format_or_guess(from, in_path, bytes);
            auto dst = to.empty() ? formats::format_from_extension(out_path) : format_or_guess(to, out_path, "");
            auto out = formats::convert(bytes, src, dst);
            write_all(out_path, out.bytes);
            std::cerr << json::to_json(out.report).dump(2) << "\n";
        } else if (*analyze) {
            analysis::AnalysisConfig cfg{threshold, std::chrono::milliseconds(budget_ms)};
            analysis::validate(cfg);
            std::cout << json::to_json(analysis::analyze(load(in_path, format), cfg)).dump(2) << "\n";
        } else if (*draw) {
            Graph g = load(in_path, format);
            write_all(out_path, layout::render_svg(g, layout::layout_force_directed(g, iterations, seed)));
        } else if (*rome) {
            generators::MutationConfig cfg;
            if (!config_path.empty()) cfg = mutation_config_from_json(Json::parse(read_all(config_path)));
            if (rome->count("--seed")) cfg.rng_seed = seed;
            Graph base = load(in_path, "");
            std::string stem = fs::path(in_path).stem().string();
            auto rounds = generators::mutate_rome(base, cfg);
            fs::create_directories(out_dir);
            for (std::size_t i = 0; i < rounds.size(); ++i) {
                Graph g = with_attr(rounds[i], "provenance", generators::provenance(cfg, stem, i + 1));
                auto name = fs::path(out_dir) / (stem + "-r" + std::to_string(i + 1) + ".gml");
                write_all(name, formats::serialize(g, formats::gml).bytes);
                std::cout << name.string() << "\n";
            }
        } else if (*north) {
            std::vector<Graph> graphs;
            for (const auto& p : inputs) graphs.push_back(load(p, ""));
            auto out = generators::sanitize_north(graphs, seed);
            auto prov = generators::north_provenance(seed, graphs.size(), out.size());
            fs::create_directories(out_dir);
            for (std::size_t i = 0; i < out.size(); ++i) {
                auto name = fs::path(out_dir) / ("north-" + std::to_string(i + 1) + ".gml");
                write_all(name, formats::serialize(with_attr(out[i], "provenance", prov), formats::gml).bytes);
                std::cout << name.string() << "\n";
            }
        } else if (*import) {
            archive::Archive store(data_dir);
            archive::ImportOptions opts;
            opts.owner = owner;
            opts.defaults.creator = owner;
            int failed = 0;
            for (const auto& o : store.import_zip(read_all(in_path), opts)) {
                if (o.id) {
                    std::cout << o.filename << "\t" << *o.id << "\n";
                } else {
                    ++failed;
                    std::cout << o.filename << "\tfailed: " << o.error_kind << ": " << o.error_message << "\n";
                }
            }
            return failed ? 2 : 0;
        } else if (*token) {
            archive::Archive store(data_dir);
            std::cout << store.create_token(owner).token << "\n";
        } else if (*audit) {
            archive::Archive store(data_dir);
            auto findings = store.audit();
            for (const auto& f : findings) std::cout << f.id << "\t" << f.problem << "\n";
            std::cerr << store.record_count() << " records, " << findings.size() << " problems\n";
            return findings.empty() ? 0 : 2;
        }
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
