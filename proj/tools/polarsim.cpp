// Command-line front end: construct codes, calibrate static prune tables,
// emit LLR-budget files, and run FER/complexity sweeps.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polar/channel.hpp"
#include "polar/code_spec.hpp"
#include "polar/harness.hpp"
#include "polar/pruning.hpp"

namespace {

using namespace polar;

struct CodeArgs {
    size_t block_length = 1024;
    size_t k = 512;
    std::string crc = "ccitt16";
    double design_ebn0 = 1.5;
    double bec_eps = -1.0;  // < 0: use GA construction
    std::string spec_file;
};

void add_code_options(CLI::App* cmd, CodeArgs& a) {
    cmd->add_option("--n", a.block_length, "block length N (power of two)");
    cmd->add_option("--k", a.k, "information-set size K (CRC bits included)");
    cmd->add_option("--crc", a.crc, "ccitt16 | none | poly:init:xorout (hex)");
    cmd->add_option("--design-ebn0", a.design_ebn0, "construction Eb/N0 in dB (GA)");
    cmd->add_option("--bec-eps", a.bec_eps, "construct over BEC(eps) instead of GA");
    cmd->add_option("--spec", a.spec_file, "load a code spec JSON instead of constructing");
}

std::optional<CrcSpec> parse_crc(const std::string& s) {
    if (s == "none") return std::nullopt;
    if (s == "ccitt16") return CrcSpec::ccitt16();
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3)
        throw CLI::ValidationError("--crc", "expected ccitt16, none, or poly:init:xorout");
    CrcSpec crc;
    crc.poly = static_cast<uint32_t>(std::stoul(parts[0], nullptr, 16));
    crc.width = static_cast<int>(4 * parts[0].size());  // hex digits define the width
    crc.init = static_cast<uint32_t>(std::stoul(parts[1], nullptr, 16));
    crc.xorout = static_cast<uint32_t>(std::stoul(parts[2], nullptr, 16));
    if (crc.width < 1 || crc.width > 32)
        throw CLI::ValidationError("--crc", "width must be 1..32 (4 bits per hex digit)");
    return crc;
}

CodeSpec build_code(const CodeArgs& a) {
    if (!a.spec_file.empty()) {
        std::ifstream f(a.spec_file);
        if (!f) throw std::runtime_error("cannot read " + a.spec_file);
        std::stringstream buf;
        buf << f.rdbuf();
        return code_spec_from_json(buf.str());
    }
    if (!is_power_of_two(a.block_length) || a.block_length < 2)
        throw std::runtime_error("--n must be a power of two >= 2");
    int n = log2_exact(a.block_length);
    double rate = static_cast<double>(a.k) / static_cast<double>(a.block_length);
    ReliabilityProfile prof = a.bec_eps >= 0.0
                                  ? evaluate_reliability_bec(n, a.bec_eps)
                                  : evaluate_reliability_ga(n, rate, a.design_ebn0);
    return select_information_set(prof, a.k, parse_crc(a.crc), {});
}

std::vector<double> parse_ebn0(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() != 3) throw std::runtime_error("--ebn0 expects a value or start:step:stop");
    double start = std::stod(parts[0]), step = std::stod(parts[1]), stop = std::stod(parts[2]);
    if (step <= 0.0) throw std::runtime_error("--ebn0 step must be positive");
    std::vector<double> out;
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
    if (out.empty()) throw std::runtime_error("--ebn0 range is empty");
    return out;
}

double single_ebn0(const std::string& s) {
    auto v = parse_ebn0(s);
    if (v.size() != 1) throw std::runtime_error("--ebn0 must be a single value here");
    return v[0];
}

void write_text(const std::string& path, const std::string& body) {
    if (path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << body;
}

// "report" -> report.csv/report.json; "x.csv" -> x.csv/x.json
std::pair<std::string, std::string> report_paths(const std::string& out) {
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv")
        return {out, out.substr(0, out.size() - 4) + ".json"};
    return {out + ".csv", out + ".json"};
}

PruneConfig parse_prune(const std::string& s, const std::string& budget_file, double p_tol,
                        double p_llr, const CodeSpec& spec, size_t L,
                        const std::vector<double>& ebn0) {
    PruneConfig pc;
    pc.p_tol = p_tol;
    pc.p_llr = p_llr;
    if (s == "off") {
        pc.kind = PrunePolicy::Kind::Off;
    } else if (s == "dynamic") {
        pc.kind = PrunePolicy::Kind::Dynamic;
    } else if (s.rfind("static:", 0) == 0) {
        pc.kind = PrunePolicy::Kind::Static;
        StaticTable table = read_static_table(s.substr(7));
        if (table.code_hash != spec.code_hash())
            throw std::runtime_error("static table was calibrated for a different code (hash " +
                                     table.code_hash + " vs " + spec.code_hash() + ")");
        if (table.L != L)
            std::cerr << "warning: static table calibrated at L=" << table.L
                      << ", simulating with L=" << L << "\n";
        for (double e : ebn0) {
            double sigma = ebn0_to_sigma(e, spec.rate());
            if (std::fabs(sigma - table.sigma) > 1e-9) {
                std::cerr << "warning: static table calibrated at sigma=" << table.sigma
                          << ", sweep includes sigma=" << sigma << "\n";
                break;
            }
        }
        pc.alpha = std::move(table.alpha);
    } else if (s.rfind("maxratio:", 0) == 0) {
        pc.kind = PrunePolicy::Kind::MaxRatio;
        pc.beta = std::stod(s.substr(9));
    } else {
        throw std::runtime_error("--prune expects off, static:<file>, dynamic, or maxratio:<beta>");
    }
    if (!budget_file.empty()) {
        if (pc.kind != PrunePolicy::Kind::Dynamic)
            throw std::runtime_error("--budget only applies to --prune dynamic");
        BudgetFile b = read_budget_file(budget_file);
        if (b.code_hash != spec.code_hash())
            throw std::runtime_error("budget file was built for a different code (hash " +
                                     b.code_hash + " vs " + spec.code_hash() + ")");
        if (p_llr > 0.0 && p_llr != b.p_llr)
            std::cerr << "warning: --p-llr ignored, using the budget file's p_llr\n";
        pc.p_llr = b.p_llr;
        pc.fixed_l = std::move(b.l);
    }
    return pc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polar code construction, pruning calibration, and FER simulation"};
    app.require_subcommand(1);

    CodeArgs code;
    std::string ebn0_arg = "1.5";
    std::string out = "-";
    std::string decoder_arg = "cascl";
    std::string prune_arg = "off";
    std::string budget_file;
    size_t list_size = 8;
    double p_tol = 1e-5;
    double p_llr = 0.0;
    uint64_t max_frames = 1000000;
    uint64_t min_errors = 100;
    uint64_t seed = 1;
    unsigned workers = 1;

    CLI::App* construct = app.add_subcommand("construct", "emit a code spec JSON");
    add_code_options(construct, code);
    construct->add_option("--out", out, "output path (- for stdout)");

    CLI::App* calibrate = app.add_subcommand("calibrate", "Monte Carlo static prune table");
    add_code_options(calibrate, code);
    calibrate->add_option("--ebn0", ebn0_arg, "operating Eb/N0 in dB");
    calibrate->add_option("--list-size", list_size, "list size L");
    calibrate->add_option("--max-frames", max_frames, "calibration frames");
    calibrate->add_option("--seed", seed, "master seed");
    calibrate->add_option("--out", out, "table output path")->required();

    CLI::App* budget = app.add_subcommand("budget", "emit an LLR-budget file");
    add_code_options(budget, code);
    budget->add_option("--ebn0", ebn0_arg, "operating Eb/N0 in dB");
    budget->add_option("--p-llr", p_llr, "per-level LLR tail probability (0 = 1e-9/N)");
    budget->add_option("--out", out, "budget output path")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "FER/complexity sweep");
    add_code_options(simulate, code);
    simulate->add_option("--decoder", decoder_arg, "sc | scl | cascl");
    simulate->add_option("--list-size", list_size, "list size L");
    simulate->add_option("--prune", prune_arg, "off | static:<file> | dynamic | maxratio:<beta>");
    simulate->add_option("--p-tol", p_tol, "dynamic: tolerated FER loss");
    simulate->add_option("--p-llr", p_llr, "dynamic: LLR tail probability (0 = 1e-9/N)");
    simulate->add_option("--budget", budget_file, "dynamic: fixed LLR-budget file");
    simulate->add_option("--ebn0", ebn0_arg, "Eb/N0 sweep, value or start:step:stop");
    simulate->add_option("--max-frames", max_frames, "frame cap per SNR point");
    simulate->add_option("--min-errors", min_errors, "stop after this many frame errors");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--workers", workers, "worker threads");
    simulate->add_option("--out", out, "report path (.csv implied; JSON twin alongside)");

    CLI11_PARSE(app, argc, argv);

    try {
        CodeSpec spec = build_code(code);

        if (construct->parsed()) {
            write_text(out, code_spec_to_json(spec));
            if (out != "-")
                std::cout << "wrote " << out << " (N=" << spec.N << " K=" << spec.K
                          << " hash=" << spec.code_hash() << ")\n";
            return 0;
        }

        if (calibrate->parsed()) {
            double e = single_ebn0(ebn0_arg);
            StaticTable table = run_calibration(spec, e, list_size, max_frames, seed, out);
            size_t active = 0;
            for (double a : table.alpha)
                if (a > 0.0) ++active;
            std::cout << "wrote " << out << " (L=" << table.L << " sigma=" << table.sigma
                      << " frames=" << table.n_frames << " active levels=" << active << ")\n";
            return 0;
        }

        if (budget->parsed()) {
            double e = single_ebn0(ebn0_arg);
            double pl = p_llr > 0.0 ? p_llr : 1e-9 / static_cast<double>(spec.N);
            ReliabilityProfile prof =
                evaluate_reliability_ga(static_cast<int>(spec.n), spec.rate(), e);
            BudgetFile b{spec.code_hash(), pl, llr_budget(prof, pl)};
            write_budget_file(out, b);
            std::cout << "wrote " << out << " (p_llr=" << pl << " levels=" << b.l.size() << ")\n";
            return 0;
        }

        // simulate
        SimConfig cfg;
        cfg.spec = spec;
        if (decoder_arg == "sc") cfg.decoder = DecoderKind::Sc;
        else if (decoder_arg == "scl") cfg.decoder = DecoderKind::Scl;
        else if (decoder_arg == "cascl") cfg.decoder = DecoderKind::CaScl;
        else throw std::runtime_error("--decoder expects sc, scl, or cascl");
        cfg.L = decoder_arg == "sc" ? 1 : list_size;
        cfg.ebn0_db = parse_ebn0(ebn0_arg);
        cfg.prune = parse_prune(prune_arg, budget_file, p_tol, p_llr, spec, cfg.L, cfg.ebn0_db);
        cfg.master_seed = seed;
        cfg.max_frames = max_frames;
        cfg.min_frame_errors = min_errors;
        cfg.workers = workers;

        auto t0 = std::chrono::steady_clock::now();
        auto progress = [&](size_t, const SnrStats& s) {
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::printf("ebn0=%-6.3g frames=%-8llu errors=%-6llu fer=%-10.4g "
                        "recursions/frame=%-10.6g copies/frame=%-8.6g pruned/frame=%-8.6g "
                        "[%.0fs]\n",
                        s.ebn0_db, static_cast<unsigned long long>(s.frames),
                        static_cast<unsigned long long>(s.frame_errors), s.fer,
                        s.mean_metric_recursions, s.mean_path_copies, s.mean_pruned_paths, secs);
            std::fflush(stdout);
        };
        std::vector<SnrStats> stats = run_fer_sweep(cfg, progress);
        auto [csv_path, json_path] = report_paths(out == "-" ? "report" : out);
        emit_report(stats, csv_path, json_path);
        std::cout << "wrote " << csv_path << " and " << json_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
