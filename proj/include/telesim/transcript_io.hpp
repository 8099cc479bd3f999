// transcript_io.hpp
// Line-delimited structured text for teleportation transcripts. One record
// per line, fields in fixed order, every float printed with 15 fixed decimal
// places so equal runs serialize to identical bytes:
//
//   run <index> mode <mode>
//   stage <name> dim <d> labels <l1,...,ln> amps <re im ...> reduced <label> <8 floats> ...
//   outcome <bell> bits <b> <b> correction <name>   (sampled-outcome modes)
//   correction <name>                               (unitary mode)
//   fidelity <value>
//   end

#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "telesim/teleport.hpp"

namespace telesim::io {

// fixed 15 decimal places; keeps transcripts byte-comparable across runs
inline std::string fixed15(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15f", x);
    return buf;
}

// 15 significant digits, for CSV tables
inline std::string sig15(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

// 12 significant digits, for the capacity report
inline std::string sig12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline void serialize_transcript(std::ostream& os, const teleport::TeleportTranscript& t,
                                 std::size_t run_index) {
    os << "run " << run_index << " mode " << t.mode << "\n";
    for (const auto& stage : t.stages) {
        os << "stage " << stage.name << " dim " << stage.state.dim() << " labels ";
        const auto& labels = stage.state.labels();
        for (std::size_t i = 0; i < labels.size(); ++i)
            os << (i ? "," : "") << labels[i];
        os << " amps";
        for (Eigen::Index i = 0; i < stage.state.dim(); ++i) {
            const auto a = stage.state.amplitudes()[i];
            os << ' ' << fixed15(a.real()) << ' ' << fixed15(a.imag());
        }
        for (const auto& [label, rho] : stage.reduced) {
            os << " reduced " << label;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    const auto v = rho.matrix()(r, c);
                    os << ' ' << fixed15(v.real()) << ' ' << fixed15(v.imag());
                }
        }
        os << "\n";
    }
    if (t.outcome) {
        os << "outcome " << qcore::to_string(*t.outcome);
        if (t.classical_bits)
            os << " bits " << (*t.classical_bits)[0] << ' ' << (*t.classical_bits)[1];
        if (t.correction) os << " correction " << *t.correction;
        os << "\n";
    } else if (t.correction) {
        os << "correction " << *t.correction << "\n";
    }
    os << "fidelity " << fixed15(t.final_fidelity) << "\n";
    os << "end\n";
}

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream str(line);
    std::string tok;
    while (str >> tok) tokens.push_back(tok);
    return tokens;
}

inline qcore::Labels split_labels(const std::string& csv) {
    qcore::Labels labels;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            labels.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    labels.push_back(cur);
    return labels;
}

}  // namespace detail

// Parses transcripts serialized by serialize_transcript; returns
// (run index, transcript) pairs in file order.
inline std::vector<std::pair<std::size_t, teleport::TeleportTranscript>> parse_transcripts(
    std::istream& is) {
    using teleport::TeleportTranscript;

    std::vector<std::pair<std::size_t, TeleportTranscript>> runs;
    std::optional<std::size_t> index;
    std::optional<TeleportTranscript> current;

    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto tok = detail::split(line);
        if (tok[0] == "run") {
            if (current) throw std::invalid_argument("transcript: run without end");
            index = std::stoull(tok[1]);
            current.emplace();
            current->mode = tok[3];
        } else if (!current) {
            throw std::invalid_argument("transcript: record outside a run block");
        } else if (tok[0] == "stage") {
            const std::string name = tok[1];
            const auto dim = static_cast<Eigen::Index>(std::stoll(tok[3]));
            const auto labels = detail::split_labels(tok[5]);
            std::size_t at = 6;
            if (tok[at] != "amps") throw std::invalid_argument("transcript: missing amps");
            ++at;
            qcore::Vector amps(dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double re = std::stod(tok[at++]);
                const double im = std::stod(tok[at++]);
                amps[i] = qcore::Complex(re, im);
            }
            qcore::StateVector state(std::move(amps), labels, /*renormalize=*/true);
            std::vector<std::pair<qcore::Label, qcore::DensityOperator>> reduced;
            while (at < tok.size() && tok[at] == "reduced") {
                const qcore::Label label = tok[at + 1];
                at += 2;
                qcore::Matrix m(2, 2);
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) {
                        const double re = std::stod(tok[at++]);
                        const double im = std::stod(tok[at++]);
                        m(r, c) = qcore::Complex(re, im);
                    }
                reduced.emplace_back(label, qcore::DensityOperator(std::move(m), {label}));
            }
            current->stages.push_back(
                teleport::Stage{name, std::move(state), std::move(reduced)});
        } else if (tok[0] == "outcome") {
            current->outcome = qcore::bell_from_string(tok[1]);
            std::size_t at = 2;
            if (at < tok.size() && tok[at] == "bits") {
                current->classical_bits = {std::stoi(tok[at + 1]), std::stoi(tok[at + 2])};
                at += 3;
            }
            if (at < tok.size() && tok[at] == "correction") current->correction = tok[at + 1];
        } else if (tok[0] == "correction") {
            current->correction = tok[1];
        } else if (tok[0] == "fidelity") {
            current->final_fidelity = std::stod(tok[1]);
        } else if (tok[0] == "end") {
            runs.emplace_back(*index, std::move(*current));
            current.reset();
        } else {
            throw std::invalid_argument("transcript: unknown record " + tok[0]);
        }
    }
    if (current) throw std::invalid_argument("transcript: truncated run block");
    return runs;
}

}  // namespace telesim::io
