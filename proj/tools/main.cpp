#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "omtest/analyzer.hpp"
#include "omtest/bounds.hpp"
#include "omtest/harness.hpp"
#include "omtest/model.hpp"
#include "omtest/rabin.hpp"

namespace {

using namespace omtest;

std::string fmt(double v) {
    if (std::isinf(v)) return "\"inf\"";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

LabeledMarkovChain load_chain(const std::string& model_path, const std::string& dra_path,
                              int& k_out) {
    LabeledMarkovChain chain = parse_model_file(model_path);
    if (!dra_path.empty()) {
        RabinAutomaton dra = parse_dra_file(dra_path);
        if (chain.marker_labeled())
            throw std::runtime_error("model is already marker-labeled; --dra expects raw labels");
        LabeledMarkovChain prod = product(chain, dra);
        k_out = dra.pair_count();
        return prod;
    }
    if (!chain.marker_labeled())
        throw std::runtime_error("raw-labeled model needs --dra to interpret its observations");
    k_out = chain.marker_count();
    return chain;
}

int cmd_analyze(const std::string& model, const std::string& dra) {
    int k = 0;
    LabeledMarkovChain chain = load_chain(model, dra, k);
    std::cout << profile_json(progress_profile(chain, k)) << "\n";
    return 0;
}

struct TestOptions {
    std::string model, dra;
    int c = 2;
    long long trials = 100;
    std::uint64_t seed = 0;
    long long step_cap = 1'000'000;
    long long quiet = 10'000;
    int jobs = 0;
};

int cmd_test(const TestOptions& opt) {
    int k = 0;
    LabeledMarkovChain chain = load_chain(opt.model, opt.dra, k);
    ExperimentConfig config;
    config.family = std::filesystem::path(opt.model).stem().string();
    config.c = opt.c;
    config.trials = opt.trials;
    config.base_seed = opt.seed;
    config.limits.step_cap = opt.step_cap;
    config.limits.quiet_threshold = opt.quiet;
    config.jobs = opt.jobs > 0 ? opt.jobs
                               : std::max(1u, std::thread::hardware_concurrency());
    std::cout << experiment_csv(run_experiment(chain, config));
    return 0;
}

struct BoundOptions {
    long long rm = 1;
    double pm = 1.0, pgamma = 0.0, pgood = 1.0;
    int c = 1;
};

int cmd_bound(const BoundOptions& opt) {
    auto x = threshold_X(opt.rm, opt.pm, opt.c);
    long long n = static_cast<long long>(std::ceil(x.value));
    GrowthFunction f = poly_growth(opt.c);
    BoundInputs in{opt.rm, opt.pm, opt.pgamma, opt.pgood, opt.c};
    std::cout << "{\n"
              << "  \"X\": " << fmt(x.value) << ",\n"
              << "  \"n\": " << n << ",\n"
              << "  \"incorrect_restart_bound\": "
              << fmt(incorrect_restart_bound(n, f, opt.rm, opt.pm)) << ",\n"
              << "  \"restart_bound\": "
              << fmt(restart_bound(n, f, opt.rm, opt.pm, opt.pgood)) << ",\n"
              << "  \"fragment_bound\": "
              << fmt(fragment_bound(n, f, opt.rm, opt.pm, opt.pgamma)) << ",\n"
              << "  \"total_bound\": " << fmt(total_bound(in)) << "\n"
              << "}\n";
    return 0;
}

struct GenerateOptions {
    std::string family, out;
    double p = 0.5, q = 0.5;
    int m = 2;
    long long b = 1;
};

int cmd_generate(const GenerateOptions& opt) {
    LabeledMarkovChain chain = [&] {
        if (opt.family == "simple") return gen_simple(opt.p, opt.q);
        if (opt.family == "ring") return gen_ring(opt.m, opt.p, opt.q);
        if (opt.family == "ladder") return gen_ladder(opt.m, opt.p);
        if (opt.family == "path") return gen_path(opt.b);
        throw std::runtime_error("unknown family '" + opt.family +
                                 "' (expected simple, ring, ladder or path)");
    }();
    std::ofstream out(opt.out);
    if (!out) throw std::runtime_error("cannot write " + opt.out);
    out << write_lmc(chain);
    return 0;
}

struct SlopeOptions {
    std::string csv, x_col, y_col;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

int cmd_slope(const SlopeOptions& opt) {
    std::ifstream in(opt.csv);
    if (!in) throw std::runtime_error("cannot open " + opt.csv);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    auto header = split_csv(line);
    auto find_col = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        try {
            std::size_t idx = std::stoul(name);
            if (idx < header.size()) return idx;
        } catch (...) {
        }
        throw std::runtime_error("no column '" + name + "' in CSV header");
    };
    std::size_t xi = find_col(opt.x_col), yi = find_col(opt.y_col);
    std::vector<std::pair<double, double>> points;
    while (std::getline(in, line)) {
        auto fields = split_csv(line);
        if (fields.size() != header.size() || fields.empty() || fields[0] == "SUMMARY") continue;
        try {
            points.emplace_back(std::stod(fields[xi]), std::stod(fields[yi]));
        } catch (...) {
            throw std::runtime_error("non-numeric value in column " + std::to_string(xi) + "/" +
                                     std::to_string(yi));
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g\n", loglog_slope(points));
    std::cout << buf;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-box tester for finite-state stochastic systems against omega-regular "
                 "specifications given as deterministic Rabin automata or marker labelings"};
    app.require_subcommand(1);

    std::string analyze_model, analyze_dra;
    auto* analyze = app.add_subcommand("analyze", "print the progress profile of a model as JSON");
    analyze->add_option("MODEL", analyze_model, ".lmc model file")->required();
    analyze->add_option("--dra", analyze_dra, ".dra automaton for raw-labeled models");

    TestOptions test_opt;
    auto* test = app.add_subcommand("test", "run seeded restart-strategy trials, print CSV");
    test->add_option("MODEL", test_opt.model, ".lmc model file")->required();
    test->add_option("--dra", test_opt.dra, ".dra automaton for raw-labeled models");
    test->add_option("-c", test_opt.c, "growth exponent, block size 2*n^c")->default_val(2);
    test->add_option("--trials", test_opt.trials)->default_val(100);
    test->add_option("--seed", test_opt.seed)->default_val(0);
    test->add_option("--step-cap", test_opt.step_cap)->default_val(1'000'000);
    test->add_option("--quiet", test_opt.quiet, "steps without restart to declare convergence")
        ->default_val(10'000);
    test->add_option("--jobs", test_opt.jobs, "worker threads (0 = all cores)")->default_val(0);

    BoundOptions bound_opt;
    auto* bound = app.add_subcommand("bound", "evaluate the closed-form step bounds as JSON");
    bound->add_option("--rm", bound_opt.rm, "progress radius")->required();
    bound->add_option("--pm", bound_opt.pm, "progress probability")->required();
    bound->add_option("--pgamma", bound_opt.pgamma, "good witness probability")->required();
    bound->add_option("--pgood", bound_opt.pgood, "probability of a good run")->required();
    bound->add_option("-c", bound_opt.c, "growth exponent")->required();

    GenerateOptions gen_opt;
    auto* generate = app.add_subcommand("generate", "write a chain of a built-in family");
    generate->add_option("FAMILY", gen_opt.family, "simple | ring | ladder | path")->required();
    generate->add_option("--p", gen_opt.p);
    generate->add_option("--q", gen_opt.q);
    generate->add_option("--m", gen_opt.m, "ring/ladder length");
    generate->add_option("--b", gen_opt.b, "path parameter (2b+1 states)");
    generate->add_option("--out", gen_opt.out, "output path")->required();

    SlopeOptions slope_opt;
    auto* slope = app.add_subcommand("slope", "least-squares slope of ln y against ln x");
    slope->add_option("CSV", slope_opt.csv, "CSV file with a header row")->required();
    slope->add_option("--x", slope_opt.x_col, "x column name or index")->required();
    slope->add_option("--y", slope_opt.y_col, "y column name or index")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(analyze_model, analyze_dra);
        if (app.got_subcommand(test)) return cmd_test(test_opt);
        if (app.got_subcommand(bound)) return cmd_bound(bound_opt);
        if (app.got_subcommand(generate)) return cmd_generate(gen_opt);
        if (app.got_subcommand(slope)) return cmd_slope(slope_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
