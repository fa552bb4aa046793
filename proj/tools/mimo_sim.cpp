// mimo-sim: sweeps, validation suite and layout dumps.
// Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 numeric failure.
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mimo/errors.hpp"
#include "mimo/experiment.hpp"
#include "mimo/geometry.hpp"
#include "mimo/validation.hpp"

namespace {

enum Exit { ok = 0, validation_failed = 1, usage = 2, numeric = 3 };

// Flags shared by every subcommand; applied on top of the config file.
struct CommonFlags {
    std::string config;
    std::vector<std::string> set;
    std::vector<std::pair<std::string, std::string>> direct;

    void add(CLI::App* app) {
        app->add_option("--config", config, "INI-style config file");
        app->add_option("--set", set, "override, key=value (repeatable)");
        for (const char* key : {"M", "R", "zeta", "snr", "trials", "seed", "K", "P", "layouts", "bins",
                                "SNR_UT_dB", "SNR_th_dB", "M_min", "R_min", "elevation"}) {
            const std::string k = key;
            app->add_option_function<std::string>(
                "--" + k, [this, k](const std::string& v) { direct.emplace_back(k, v); },
                "config key " + k);
        }
    }

    mimo::ExperimentConfig build() const {
        mimo::ExperimentConfig cfg = config.empty() ? mimo::ExperimentConfig{} : mimo::load_ini_file(config);
        for (const auto& kv : set) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw mimo::InvalidArgument("--set expects key=value");
            mimo::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& [k, v] : direct) mimo::apply_setting(cfg, k, v);
        cfg.check();
        return cfg;
    }
};

std::vector<int> parse_ids(const std::string& s) {
    std::vector<int> ids;
    for (std::size_t v : mimo::parse_count_list(s)) {
        if (v < 1 || v > mimo::criterion_count) throw mimo::InvalidArgument("criterion ids run from 1 to 12");
        ids.push_back(static_cast<int>(v));
    }
    return ids;
}

int run_cmd(const std::string& sweep, const CommonFlags& flags, const std::string& out) {
    const mimo::ExperimentConfig cfg = flags.build();
    const mimo::SweepResult r = mimo::run_sweep(sweep, cfg);
    if (out == "-") {
        std::cout << r.csv;
        for (const auto& line : r.summary) std::cerr << line << '\n';
        return ok;
    }
    const std::string path = out + "/" + sweep + ".csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw mimo::InvalidArgument(fmt::format("cannot write '{}'", path));
    f << r.csv;
    std::cout << "wrote " << path << '\n';
    for (const auto& line : r.summary) std::cout << line << '\n';
    return ok;
}

int validate_cmd(const CommonFlags& flags, const std::string& only, const std::string& report, bool sabotage) {
    const mimo::ExperimentConfig cfg = flags.build();
    mimo::ValidationOptions opt;
    if (!only.empty()) opt.only = parse_ids(only);
    opt.sabotage = sabotage;
    const mimo::ValidationReport rep = mimo::run_validation(cfg, opt);
    const std::string text = rep.text();
    std::cout << text;
    if (!report.empty()) {
        std::ofstream f(report, std::ios::binary);
        if (!f) throw mimo::InvalidArgument(fmt::format("cannot write '{}'", report));
        f << text;
    }
    return rep.all_passed() ? ok : validation_failed;
}

int dump_layout_cmd(const CommonFlags& flags, const std::string& kind, const std::string& out) {
    const mimo::ExperimentConfig cfg = flags.build();
    const std::size_t M = cfg.M.empty() ? 100 : cfg.M.front();
    const double R = (cfg.R.empty() ? mimo::Length{1.0, true} : cfg.R.front()).metres(cfg.wavelength());
    mimo::AntennaLayout l;
    if (kind == "bpp") l = mimo::sample_bpp(M, R, cfg.seed);
    else if (kind == "regular") l = mimo::make_regular(M, R);
    else if (kind == "zeta") {
        if (cfg.zeta.empty()) throw mimo::InvalidArgument("--kind zeta needs --zeta");
        l = mimo::make_with_target_zeta(M, R, cfg.zeta.front(), 0.05 * std::max(1.0, cfg.zeta.front()), cfg.seed);
    } else
        throw mimo::InvalidArgument("--kind must be bpp, regular or zeta");
    if (out == "-") {
        mimo::write_layout_csv(std::cout, l);
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw mimo::InvalidArgument(fmt::format("cannot write '{}'", out));
        mimo::write_layout_csv(f, l);
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mimo-sim: irregular-array massive MIMO uplink simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags, val_flags, dump_flags;
    std::string sweep, run_out = ".";
    auto* run = app.add_subcommand("run", "run a named sweep and write <sweep>.csv");
    run->add_option("sweep", sweep, "eigen-hist | eta | gain | rate | rate-coupling | ser | outage")
        ->required()
        ->check(CLI::IsMember(mimo::sweep_names));
    run->add_option("--out", run_out, "output directory, or - for stdout");
    run_flags.add(run);

    std::string only, report;
    bool sabotage = false;
    auto* val = app.add_subcommand("validate", "run the acceptance suite");
    val->add_option("--only", only, "criterion ids, e.g. 1,2,5 or 1:4");
    val->add_option("--report", report, "also write the report to this file");
    val->add_flag("--sabotage-tolerances", sabotage)->group("");  // harness self-test
    val_flags.add(val);

    std::string kind = "bpp", dump_out = "-";
    auto* dump = app.add_subcommand("dump-layout", "write an antenna layout as CSV");
    dump->add_option("--kind", kind, "bpp | regular | zeta");
    dump->add_option("--out", dump_out, "file, or - for stdout");
    dump_flags.add(dump);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*run) return run_cmd(sweep, run_flags, run_out);
        if (*val) return validate_cmd(val_flags, only, report, sabotage);
        if (*dump) return dump_layout_cmd(dump_flags, kind, dump_out);
    } catch (const mimo::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return usage;
    } catch (const mimo::Error& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numeric;
    }
    return usage;
}
