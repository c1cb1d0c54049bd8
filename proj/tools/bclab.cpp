// Batch experiment runner: bclab run --config <path> [--seed N] [--out <path>] [--suite <name>]
//                          bclab replay --witness <path>
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bclab/experiment.hpp"

namespace {

int do_run(const std::string& config_path, const std::optional<std::uint64_t>& seed, const std::string& out,
           const std::string& suite) {
    bclab::ExperimentConfig cfg;
    try {
        cfg = bclab::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (!out.empty()) cfg.out = out;
        if (!suite.empty()) {
            const auto& names = bclab::suite_names();
            if (std::find(names.begin(), names.end(), suite) == names.end())
                throw bclab::InputError("--suite: unknown suite '" + suite + "'");
            cfg.suite = suite;
        }
    } catch (const bclab::InputError& e) {
        std::cerr << config_path << ": " << e.what() << '\n';
        return 2;
    }
    try {
        const bclab::RunOutput res = bclab::run_experiment(cfg);
        const std::string text = res.report.dump(2) + "\n";
        if (cfg.out.empty()) {
            std::cout << text;
        } else {
            bclab::write_atomic(cfg.out, text);
            std::string stem = cfg.out;
            if (stem.size() > 5 && stem.compare(stem.size() - 5, 5, ".json") == 0) stem.resize(stem.size() - 5);
            for (const auto& c : res.curves) bclab::write_atomic(stem + "." + c.name + ".csv", c.csv);
            const auto& s = res.report["summary"];
            std::cerr << "pass " << s["pass"] << ", violation " << s["violation"] << ", inconclusive "
                      << s["inconclusive"] << " -> " << cfg.out << '\n';
        }
        return res.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int do_replay(const std::string& path) {
    try {
        std::ifstream in(path);
        if (!in) throw bclab::InputError("cannot read witness '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const auto doc = bclab::Json::parse(ss.str());
        const auto outcomes = bclab::replay(doc);
        bclab::Json arr = bclab::Json::array();
        bool violation = false;
        for (const auto& o : outcomes) {
            if (o.version_mismatch) std::cerr << "warning: witness for '" << o.check << "' from another tool version\n";
            bclab::Json j;
            j["check"] = o.check;
            j["residual"] = bclab::number_json(o.residual);
            j["recorded"] = o.recorded ? bclab::Json(*o.recorded) : bclab::Json(nullptr);
            j["difference"] = o.recorded ? bclab::number_json(std::abs(o.residual - *o.recorded)) : bclab::Json(nullptr);
            arr.push_back(j);
            violation = violation || o.residual < bclab::kViolationThreshold;
        }
        std::cout << arr.dump(2) << '\n';
        return violation ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metric-geometry experiment runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a suite from a config file");
    std::string config_path, out, suite;
    std::uint64_t seed_value = 0;
    run->add_option("--config", config_path, "INI or JSON experiment config")->required();
    auto* seed_opt = run->add_option("--seed", seed_value, "master seed");
    run->add_option("--out", out, "report path (stdout when absent)");
    run->add_option("--suite", suite, "curvature | angles | strainers | tangent | dimension | strata | all");

    auto* rep = app.add_subcommand("replay", "re-evaluate witnesses from a report or a witness file");
    std::string witness;
    rep->add_option("--witness", witness, "report or witness JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (*run) return do_run(config_path, *seed_opt ? std::optional<std::uint64_t>(seed_value) : std::nullopt, out, suite);
    return do_replay(witness);
}
