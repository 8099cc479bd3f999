// cli.hpp
// Command-line harness: every experiment behind a subcommand, deterministic
// under a fixed seed, machine-readable output (CSV tables or the structured
// transcript text). Exit codes: 0 success, 1 input error, 2 I/O error.

#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "telesim/experiments.hpp"
#include "telesim/infotheory.hpp"
#include "telesim/prefix_code.hpp"
#include "telesim/qcore.hpp"
#include "telesim/teleport.hpp"
#include "telesim/transcript_io.hpp"

namespace telesim::cli {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

using io::fixed15;
using io::sig12;
using io::sig15;

// Writes either to --out or to stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw IoError("cannot open output path: " + path);
        path_ = path;
    }

    std::ostream& stream() { return path_.empty() ? std::cout : file_; }

    void finish() {
        stream().flush();
        if (!path_.empty() && !file_) throw IoError("failed writing to " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
};

struct ChiOption {
    std::string text = "random";
    bool normalize = false;

    bool is_random() const { return text == "random"; }

    teleport::UnknownState fixed_state() const {
        std::vector<double> parts;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                parts.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("cannot parse --chi component: " + tok);
            }
        }
        if (parts.size() != 4)
            throw std::invalid_argument("--chi needs a_re,a_im,b_re,b_im or 'random'");
        const qcore::Complex a(parts[0], parts[1]), b(parts[2], parts[3]);
        return normalize ? teleport::UnknownState::normalized(a, b)
                         : teleport::UnknownState(a, b);
    }

    teleport::UnknownState state(RandomStream& rng) const {
        return is_random() ? teleport::UnknownState::haar_random(rng) : fixed_state();
    }
};

inline std::vector<std::size_t> parse_size_list(const std::string& csv, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const long long v = std::stoll(tok);
            if (v < 1) throw std::invalid_argument("");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + " entries must be integers >= 1");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
    return out;
}

// ---------------------------------------------------------------------------
// report writers

inline void write_teleport_csv_row(std::ostream& os, std::size_t trial,
                                   const teleport::TeleportTranscript& t) {
    os << trial << ',' << t.mode << ',';
    if (t.outcome) os << qcore::to_string(*t.outcome);
    os << ',';
    if (t.classical_bits) os << (*t.classical_bits)[0];
    os << ',';
    if (t.classical_bits) os << (*t.classical_bits)[1];
    os << ',';
    if (t.correction) os << *t.correction;
    os << ',' << fixed15(t.final_fidelity) << "\n";
}

inline void write_bohm_report(std::ostream& os, const teleport::BohmBranchReport& r,
                              std::size_t run_index) {
    os << "bohm run " << run_index << "\n";
    const std::array<const std::array<double, 3>*, 3> pre = {&r.spin1_pre, &r.spin2_pre,
                                                             &r.spin3_pre};
    for (std::size_t i = 0; i < 3; ++i) {
        os << "pre-spin " << (i + 1);
        for (double v : *pre[i]) os << ' ' << fixed15(v);
        os << "\n";
    }
    for (const auto& b : r.branches) {
        os << "branch " << qcore::to_string(b.outcome) << " probability "
           << fixed15(b.probability) << " spin";
        for (double v : b.spin) os << ' ' << fixed15(v);
        os << " amps";
        for (Eigen::Index i = 0; i < b.bob_state.dim(); ++i) {
            const auto a = b.bob_state.amplitudes()[i];
            os << ' ' << fixed15(a.real()) << ' ' << fixed15(a.imag());
        }
        os << "\n";
    }
    os << "active " << qcore::to_string(r.active) << "\n";
    os << "corrected-fidelity " << fixed15(r.corrected_fidelity) << "\n";
    os << "end\n";
}

inline void write_ensemble_report(std::ostream& os, const teleport::EnsembleReport& r) {
    os << "ensemble mode " << teleport::to_string(r.mode) << " runs " << r.runs << "\n";
    os << "counts";
    for (std::size_t c : r.counts) os << ' ' << c;
    os << "\n";
    os << "fractions";
    for (std::size_t c : r.counts)
        os << ' ' << fixed15(static_cast<double>(c) / static_cast<double>(r.runs));
    os << "\n";
    os << "bits-sent " << r.classical_bits_sent << "\n";
    if (r.sub_ensembles) {
        for (const auto& sub : *r.sub_ensembles)
            os << "subensemble " << qcore::to_string(sub.outcome) << " count " << sub.count
               << " corrected-fidelity " << fixed15(sub.corrected_fidelity) << "\n";
        os << "pooled-trace-distance " << fixed15(*r.pooled_trace_distance) << "\n";
    }
    os << "end\n";
}

// ---------------------------------------------------------------------------
// subcommand bodies

struct TeleportConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::string mode = "collapse";
    ChiOption chi;
    std::string out;
    std::string format = "structured-text";
};

inline int cmd_teleport(const TeleportConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("--trials must be >= 1");
    const bool csv = cfg.format == "csv";
    if (!csv && cfg.format != "structured-text")
        throw std::invalid_argument("--format must be csv or structured-text");

    Output out(cfg.out);
    std::ostream& os = out.stream();

    if (cfg.mode == "ensemble") {
        RandomStream rng(cfg.seed, 0);
        const auto chi = cfg.chi.state(rng);
        write_ensemble_report(os, teleport::run_ensemble(chi, cfg.trials, rng));
        out.finish();
        return 0;
    }

    if (csv) os << "trial,mode,outcome,bit_c,bit_d,correction,fidelity\n";
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        RandomStream rng(cfg.seed, trial);
        const auto chi = cfg.chi.state(rng);
        if (cfg.mode == "collapse") {
            const auto t = teleport::run_collapse(chi, rng);
            csv ? write_teleport_csv_row(os, trial, t) : io::serialize_transcript(os, t, trial);
        } else if (cfg.mode == "unitary") {
            const auto t = teleport::run_unitary(chi);
            csv ? write_teleport_csv_row(os, trial, t) : io::serialize_transcript(os, t, trial);
        } else if (cfg.mode == "bohm") {
            write_bohm_report(os, teleport::bohm_branch_analysis(chi, rng), trial);
        } else {
            throw std::invalid_argument(
                "--mode must be collapse, unitary, bohm or ensemble");
        }
    }
    out.finish();
    return 0;
}

struct SpecInfoConfig {
    std::string n_cells = "4,64,1024";
    std::uint64_t seed = 0;
    std::string out;
};

inline int cmd_specinfo(const SpecInfoConfig& cfg) {
    const auto ns = parse_size_list(cfg.n_cells, "--n-cells");
    Output out(cfg.out);
    std::ostream& os = out.stream();
    os << "N,H_spec_bits,chi_bits,gap_bits\n";
    for (std::size_t n : ns) {
        const auto res = experiments::spec_vs_accessible(experiments::uniform_source(n));
        os << n << ',' << sig15(res.h_spec) << ',' << sig15(res.chi) << ','
           << sig15(res.gap) << "\n";
    }
    out.finish();
    return 0;
}

struct HolevoConfig {
    std::string n_cells;
    bool random = false;
    std::size_t trials = 10;
    std::size_t members = 16;
    std::uint64_t seed = 0;
    std::string out;
};

inline int cmd_holevo(const HolevoConfig& cfg) {
    Output out(cfg.out);
    std::ostream& os = out.stream();
    if (cfg.random) {
        if (cfg.trials < 1 || cfg.members < 1)
            throw std::invalid_argument("--trials and --members must be >= 1");
        os << "trial,members,chi_bits\n";
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            RandomStream rng(cfg.seed, t);
            std::vector<double> w(cfg.members);
            double sum = 0.0;
            for (auto& x : w) {
                x = -std::log(1.0 - rng.next_double());
                sum += x;
            }
            std::vector<std::pair<double, qcore::DensityOperator>> entries;
            entries.reserve(cfg.members);
            for (std::size_t i = 0; i < cfg.members; ++i) {
                const auto psi = teleport::UnknownState::haar_random(rng).as_state("q");
                entries.emplace_back(w[i] / sum, qcore::density_from_state(psi));
            }
            os << t << ',' << cfg.members << ','
               << sig15(infotheory::holevo_chi(infotheory::QuantumEnsemble(entries))) << "\n";
        }
    } else {
        if (cfg.n_cells.empty())
            throw std::invalid_argument("holevo needs --n-cells or --random");
        os << "N,chi_bits\n";
        for (std::size_t n : parse_size_list(cfg.n_cells, "--n-cells")) {
            const auto ens = experiments::source_ensemble(experiments::uniform_source(n));
            os << n << ',' << sig15(infotheory::holevo_chi(ens)) << "\n";
        }
    }
    out.finish();
    return 0;
}

struct CapacityConfig {
    std::string channel_file;
    std::string out;
};

inline infotheory::Channel load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open channel file: " + path);
    std::string header;
    std::getline(in, header);
    std::stringstream hs(header);
    std::string hash, word;
    std::size_t n_in = 0, n_out = 0;
    hs >> hash >> word >> n_in >> n_out;
    if (hash != "#" || word != "channel" || n_in < 1 || n_out < 1)
        throw std::invalid_argument("channel file must start with '# channel n_in n_out'");
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(n_in), static_cast<Eigen::Index>(n_out));
    for (std::size_t i = 0; i < n_in; ++i)
        for (std::size_t j = 0; j < n_out; ++j)
            if (!(in >> rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))))
                throw std::invalid_argument("channel file: malformed matrix at row " +
                                            std::to_string(i));
    return infotheory::Channel(std::move(rows));
}

inline int cmd_capacity(const CapacityConfig& cfg) {
    const auto channel = load_channel(cfg.channel_file);
    const auto res = infotheory::channel_capacity(channel);
    Output out(cfg.out);
    std::ostream& os = out.stream();
    os << "capacity " << sig12(res.bits) << " bits\n";
    os << "input";
    for (std::size_t i = 0; i < res.input.size(); ++i) os << ' ' << sig12(res.input[i]);
    os << "\n";
    os << "iterations " << res.iterations << " converged " << (res.converged ? "yes" : "no")
       << "\n";
    out.finish();
    return 0;
}

struct CodingRateConfig {
    std::string probs = "0.9,0.1";
    std::size_t block_len = 8;
    std::size_t blocks = 10000;
    std::uint64_t seed = 0;
    std::string out;
};

inline int cmd_coding_rate(const CodingRateConfig& cfg) {
    std::vector<double> p;
    std::stringstream ss(cfg.probs);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            p.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse --p entry: " + tok);
        }
    }
    const infotheory::ProbDist dist(p);
    const auto code = infotheory::build_block_code(dist, cfg.block_len);
    RandomStream rng(cfg.seed, 0);
    const double empirical =
        infotheory::empirical_coding_rate(dist, cfg.block_len, cfg.blocks, rng);
    const double h = infotheory::shannon_entropy(dist);

    Output out(cfg.out);
    std::ostream& os = out.stream();
    os << "alphabet,block_len,blocks,entropy_bits,expected_rate,empirical_rate,"
          "bracket_low,bracket_high\n";
    os << dist.size() << ',' << cfg.block_len << ',' << cfg.blocks << ',' << sig15(h) << ','
       << sig15(code.expected_bits_per_symbol()) << ',' << sig15(empirical) << ',' << sig15(h)
       << ',' << sig15(h + 1.0 / static_cast<double>(cfg.block_len)) << "\n";
    out.finish();
    return 0;
}

struct BohmConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    ChiOption chi;
    std::string out;
};

inline int cmd_bohm(const BohmConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("--trials must be >= 1");
    Output out(cfg.out);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        RandomStream rng(cfg.seed, trial);
        const auto chi = cfg.chi.state(rng);
        write_bohm_report(out.stream(), teleport::bohm_branch_analysis(chi, rng), trial);
    }
    out.finish();
    return 0;
}

struct EnsembleConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 100;
    std::string mode = "ensemble";
    ChiOption chi;
    std::string out;
};

inline int cmd_ensemble(const EnsembleConfig& cfg) {
    teleport::EnsembleMode mode;
    if (cfg.mode == "ensemble")
        mode = teleport::EnsembleMode::ensemble;
    else if (cfg.mode == "statistical")
        mode = teleport::EnsembleMode::statistical;
    else
        throw std::invalid_argument("--mode must be ensemble or statistical");

    RandomStream rng(cfg.seed, 0);
    const auto chi = cfg.chi.state(rng);
    const auto report = teleport::run_ensemble(chi, cfg.trials, rng, mode);
    Output out(cfg.out);
    write_ensemble_report(out.stream(), report);
    out.finish();
    return 0;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
    CLI::App app{"quantum teleportation simulator and information-theory toolkit"};
    app.require_subcommand(1);

    std::function<int()> action;

    detail::TeleportConfig tele;
    auto* tele_cmd = app.add_subcommand(
        "teleport", "run the protocol and write per-trial transcripts");
    tele_cmd->add_option("--seed", tele.seed, "random seed");
    tele_cmd->add_option("--trials", tele.trials, "number of runs");
    tele_cmd->add_option("--mode", tele.mode, "collapse|unitary|bohm|ensemble");
    tele_cmd->add_option("--chi", tele.chi.text, "a_re,a_im,b_re,b_im or 'random'");
    tele_cmd->add_flag("--normalize", tele.chi.normalize, "accept unnormalized --chi");
    tele_cmd->add_option("--out", tele.out, "output path (default stdout)");
    tele_cmd->add_option("--format", tele.format, "structured-text|csv");
    tele_cmd->callback([&] { action = [&] { return detail::cmd_teleport(tele); }; });

    detail::SpecInfoConfig spec;
    auto* spec_cmd = app.add_subcommand(
        "specinfo", "specification vs. accessible information over sphere grids");
    spec_cmd->add_option("--n-cells", spec.n_cells, "comma-separated grid sizes");
    spec_cmd->add_option("--seed", spec.seed, "random seed (reserved)");
    spec_cmd->add_option("--out", spec.out, "output path (default stdout)");
    spec_cmd->callback([&] { action = [&] { return detail::cmd_specinfo(spec); }; });

    detail::HolevoConfig hol;
    auto* hol_cmd =
        app.add_subcommand("holevo", "Holevo quantity of grid or random qubit ensembles");
    hol_cmd->add_option("--n-cells", hol.n_cells, "comma-separated grid sizes");
    hol_cmd->add_flag("--random", hol.random, "use random qubit ensembles instead");
    hol_cmd->add_option("--trials", hol.trials, "random ensembles to draw");
    hol_cmd->add_option("--members", hol.members, "states per random ensemble");
    hol_cmd->add_option("--seed", hol.seed, "random seed");
    hol_cmd->add_option("--out", hol.out, "output path (default stdout)");
    hol_cmd->callback([&] { action = [&] { return detail::cmd_holevo(hol); }; });

    detail::CapacityConfig cap;
    auto* cap_cmd =
        app.add_subcommand("capacity", "channel capacity via alternating maximization");
    cap_cmd->add_option("file", cap.channel_file, "channel matrix file")->required();
    cap_cmd->add_option("--out", cap.out, "output path (default stdout)");
    cap_cmd->callback([&] { action = [&] { return detail::cmd_capacity(cap); }; });

    detail::CodingRateConfig cod;
    auto* cod_cmd =
        app.add_subcommand("coding-rate", "empirical prefix-coding rate of a source");
    cod_cmd->add_option("--p", cod.probs, "comma-separated letter probabilities");
    cod_cmd->add_option("--block-len", cod.block_len, "letters per coded block");
    cod_cmd->add_option("--blocks", cod.blocks, "number of sampled blocks");
    cod_cmd->add_option("--seed", cod.seed, "random seed");
    cod_cmd->add_option("--out", cod.out, "output path (default stdout)");
    cod_cmd->callback([&] { action = [&] { return detail::cmd_coding_rate(cod); }; });

    detail::BohmConfig bohm;
    auto* bohm_cmd = app.add_subcommand("bohm", "Bohmian branch and spin-vector report");
    bohm_cmd->add_option("--seed", bohm.seed, "random seed");
    bohm_cmd->add_option("--trials", bohm.trials, "number of runs");
    bohm_cmd->add_option("--chi", bohm.chi.text, "a_re,a_im,b_re,b_im or 'random'");
    bohm_cmd->add_flag("--normalize", bohm.chi.normalize, "accept unnormalized --chi");
    bohm_cmd->add_option("--out", bohm.out, "output path (default stdout)");
    bohm_cmd->callback([&] { action = [&] { return detail::cmd_bohm(bohm); }; });

    detail::EnsembleConfig ens;
    auto* ens_cmd =
        app.add_subcommand("ensemble", "ensemble/statistical reading over many runs");
    ens_cmd->add_option("--seed", ens.seed, "random seed");
    ens_cmd->add_option("--trials", ens.trials, "ensemble size (runs)");
    ens_cmd->add_option("--mode", ens.mode, "ensemble|statistical");
    ens_cmd->add_option("--chi", ens.chi.text, "a_re,a_im,b_re,b_im or 'random'");
    ens_cmd->add_flag("--normalize", ens.chi.normalize, "accept unnormalized --chi");
    ens_cmd->add_option("--out", ens.out, "output path (default stdout)");
    ens_cmd->callback([&] { action = [&] { return detail::cmd_ensemble(ens); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return action ? action() : 0;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace telesim::cli
