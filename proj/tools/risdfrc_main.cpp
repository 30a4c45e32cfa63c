#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "risdfrc/runner.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int n_seeds = 10;
    std::string out_dir = ".";
    std::string scheme = "all";
};

risdfrc::ScenarioConfig load_config(const CommonOpts& opts) {
    risdfrc::ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg = risdfrc::config::load(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    cfg.validate();
    return cfg;
}

std::vector<risdfrc::Scheme> parse_schemes(const std::string& s) {
    using risdfrc::Scheme;
    if (s == "proposed") return {Scheme::Proposed};
    if (s == "random") return {Scheme::Random};
    if (s == "com-only") return {Scheme::ComOnly};
    if (s == "all") return {Scheme::Proposed, Scheme::Random, Scheme::ComOnly};
    throw CLI::ValidationError("--scheme must be proposed|random|com-only|all");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_manifest(const CommonOpts& opts, const risdfrc::ScenarioConfig& cfg,
                    const std::string& experiment) {
    nlohmann::json manifest;
    manifest["artifact_version"] = kVersion;
    manifest["experiment"] = experiment;
    manifest["config"] = nlohmann::json::parse(risdfrc::config::to_json_text(cfg));
    write_file(std::filesystem::path(opts.out_dir) / (experiment + "_manifest.json"),
               manifest.dump(2) + "\n");
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON scenario config file");
    cmd->add_option("--seed", opts.seed, "base RNG seed (overrides config)");
    cmd->add_option("--seeds", opts.n_seeds, "number of seeds per point");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--scheme", opts.scheme, "proposed|random|com-only|all");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided dual-function radar-communication simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<double> l_values{10, 20, 40};
    std::vector<double> power_values{0.5, 1.0, 1.5, 2.0};
    std::vector<double> alpha_values{3.0, 3.75, 4.5, 5.25, 6.0};
    std::vector<int> bits_values{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> gamma0_values{15.0, 25.0};
    std::vector<int> bp_l_values{10, 20};

    auto* converge = app.add_subcommand("converge", "penalty and AO convergence traces");
    add_common(converge, opts);

    auto* sweep_l = app.add_subcommand("sweep-l", "sum rate versus RIS element count");
    add_common(sweep_l, opts);
    sweep_l->add_option("--values", l_values, "RIS element counts");

    auto* sweep_power = app.add_subcommand("sweep-power", "sum rate versus transmit power");
    add_common(sweep_power, opts);
    sweep_power->add_option("--values", power_values, "P0 values in W");

    auto* sweep_alpha = app.add_subcommand("sweep-alpha", "sum rate versus BS-CU exponent");
    add_common(sweep_alpha, opts);
    sweep_alpha->add_option("--values", alpha_values, "alpha_BU values");

    auto* sweep_bits = app.add_subcommand("sweep-bits", "sum rate versus quantization bits");
    add_common(sweep_bits, opts);
    sweep_bits->add_option("--values", bits_values, "bit depths");

    auto* beampattern = app.add_subcommand("beampattern", "optimized transmit beampatterns");
    add_common(beampattern, opts);
    beampattern->add_option("--gamma0", gamma0_values, "radar SNR thresholds in dB");
    beampattern->add_option("--l", bp_l_values, "RIS element counts");

    auto* single = app.add_subcommand("single", "one trial on one channel realization");
    add_common(single, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const risdfrc::ScenarioConfig cfg = load_config(opts);
        const auto schemes = parse_schemes(opts.scheme);
        const std::filesystem::path out_dir(opts.out_dir);
        using namespace risdfrc;

        if (converge->parsed()) {
            write_manifest(opts, cfg, "converge");
            const std::vector<int> ls{10, 20, 40};
            write_file(out_dir / "penalty_trace.csv",
                       runner::penalty_trace_csv(cfg, {10, 20}));
            write_file(out_dir / "ao_trace.csv", runner::ao_trace_csv(cfg, ls, opts.n_seeds));
        } else if (sweep_l->parsed()) {
            write_manifest(opts, cfg, "sweep_l");
            const auto res = runner::sweep(cfg, "l_elems", l_values, opts.n_seeds, schemes);
            write_file(out_dir / "sweep_l.csv", runner::sweep_csv(res));
        } else if (sweep_power->parsed()) {
            write_manifest(opts, cfg, "sweep_power");
            const auto res = runner::sweep(cfg, "p0_w", power_values, opts.n_seeds, schemes);
            write_file(out_dir / "sweep_power.csv", runner::sweep_csv(res));
        } else if (sweep_alpha->parsed()) {
            write_manifest(opts, cfg, "sweep_alpha");
            const auto res =
                runner::sweep(cfg, "alpha_bu", alpha_values, opts.n_seeds, schemes);
            write_file(out_dir / "sweep_alpha.csv", runner::sweep_csv(res));
        } else if (sweep_bits->parsed()) {
            write_manifest(opts, cfg, "sweep_bits");
            const auto res = runner::sweep_bits(cfg, bits_values, opts.n_seeds);
            write_file(out_dir / "sweep_bits.csv", runner::sweep_csv(res));
        } else if (beampattern->parsed()) {
            write_manifest(opts, cfg, "beampattern");
            const auto series =
                runner::beampattern_study(cfg, gamma0_values, bp_l_values, opts.n_seeds);
            write_file(out_dir / "beampattern.csv", runner::beampattern_csv(series));
            // Per-series two-column files for direct plotting.
            for (const auto& s : series) {
                std::ostringstream name, body;
                name << "beampattern_g" << s.gamma0_db << "_L" << s.l_elems << "_seed"
                     << s.seed << ".csv";
                body << "theta_deg,gain_db_normalized\n";
                for (std::size_t i = 0; i < s.theta_deg.size(); ++i)
                    body << s.theta_deg[i] << "," << s.gain_db_normalized[i] << "\n";
                write_file(out_dir / name.str(), body.str());
            }
        } else if (single->parsed()) {
            write_manifest(opts, cfg, "single");
            const ChannelSet channels = channel::sample_scenario(cfg, RngStream(cfg.seed));
            SweepResult res;
            res.axis = "trial";
            for (Scheme s : schemes) {
                SweepPoint p;
                p.axis_value = 0;
                p.scheme = s;
                p.seed = cfg.seed;
                p.trial = runner::run_ao(cfg, channels, s);
                res.points.push_back(std::move(p));
            }
            write_file(out_dir / "single.csv", runner::sweep_csv(res));
            for (const auto& p : res.points)
                std::cout << scheme_name(p.scheme) << ": sum_rate=" << p.trial.sum_rate_nat
                          << " nat/s/Hz, radar_snr=" << p.trial.radar_snr_db
                          << " dB, feasible=" << p.trial.feasible << "\n";
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const risdfrc::InfeasibleSubproblem& e) {
        std::cerr << "infeasible scenario: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
