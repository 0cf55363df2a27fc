#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sandlab/abelian.hpp"
#include "sandlab/rng.hpp"

namespace sandlab {

/// Everything that determines an experiment run; serialized verbatim into
/// every output the run produces.
struct ExperimentSpec {
    std::string kind;           // sylow-distribution | moments | singularity | ...
    std::string model;          // directed-regular | matching | directed-er
    std::size_t n = 0;
    unsigned d = 3;
    double rho = 0.0;
    std::vector<std::uint64_t> primes{2, 3, 5, 7};
    unsigned cap = 12;
    std::size_t samples = 0;
    std::uint64_t base_seed = 1;
    unsigned workers = 1;
    bool with_log_torsion = false;

    nlohmann::json to_json() const {
        return nlohmann::json{{"kind", kind},     {"model", model},   {"n", n},
                              {"d", d},           {"rho", rho},       {"primes", primes},
                              {"cap", cap},       {"samples", samples}, {"seed", base_seed},
                              {"workers", workers}, {"log_torsion", with_log_torsion}};
    }

    static ExperimentSpec from_json(const nlohmann::json& j) {
        ExperimentSpec s;
        s.kind = j.at("kind").get<std::string>();
        s.model = j.at("model").get<std::string>();
        s.n = j.at("n").get<std::size_t>();
        s.d = j.at("d").get<unsigned>();
        s.rho = j.at("rho").get<double>();
        s.primes = j.at("primes").get<std::vector<std::uint64_t>>();
        s.cap = j.at("cap").get<unsigned>();
        s.samples = j.at("samples").get<std::size_t>();
        s.base_seed = j.at("seed").get<std::uint64_t>();
        s.workers = j.at("workers").get<unsigned>();
        s.with_log_torsion = j.at("log_torsion").get<bool>();
        return s;
    }

    /// Identity for resume checks: everything except worker count (which
    /// never changes the records).
    bool same_run(const ExperimentSpec& o) const {
        return kind == o.kind && model == o.model && n == o.n && d == o.d && rho == o.rho &&
               primes == o.primes && cap == o.cap && samples == o.samples && base_seed == o.base_seed &&
               with_log_torsion == o.with_log_torsion;
    }
};

/// One Monte Carlo sample: the seed index, connectivity, and the computed
/// group invariants.
struct RunRecord {
    std::uint64_t index = 0;
    bool connected = false;
    bool truncated = false;
    std::map<std::uint64_t, std::vector<int>> sylow;   // prime -> partition
    std::map<std::uint64_t, std::size_t> corank;       // prime -> corank of the reduced laplacian
    double log_torsion = 0.0;
    bool has_log_torsion = false;

    nlohmann::json to_json() const {
        nlohmann::json sylow_j = nlohmann::json::object();
        for (const auto& [p, lambda] : sylow) sylow_j[std::to_string(p)] = lambda;
        nlohmann::json corank_j = nlohmann::json::object();
        for (const auto& [p, c] : corank) corank_j[std::to_string(p)] = c;
        nlohmann::json j{{"index", index}, {"connected", connected}, {"truncated", truncated},
                         {"sylow", sylow_j}, {"corank", corank_j}};
        if (has_log_torsion) j["log_torsion"] = log_torsion;
        return j;
    }

    static RunRecord from_json(const nlohmann::json& j) {
        RunRecord r;
        r.index = j.at("index").get<std::uint64_t>();
        r.connected = j.at("connected").get<bool>();
        r.truncated = j.at("truncated").get<bool>();
        for (const auto& [key, val] : j.at("sylow").items())
            r.sylow[std::stoull(key)] = val.get<std::vector<int>>();
        for (const auto& [key, val] : j.at("corank").items())
            r.corank[std::stoull(key)] = val.get<std::size_t>();
        if (j.contains("log_torsion")) {
            r.log_torsion = j.at("log_torsion").get<double>();
            r.has_log_torsion = true;
        }
        return r;
    }

    PGroupType sylow_type(std::uint64_t p) const {
        auto it = sylow.find(p);
        if (it == sylow.end()) throw std::out_of_range("record has no sylow data at p=" + std::to_string(p));
        return PGroupType(p, Partition(it->second));
    }
};

/// Per-outcome comparison row of empirical frequency against a law.
struct ComparisonRow {
    std::string label;
    double empirical = 0.0;
    double predicted = 0.0;
    double stderr_hat = 0.0;  // sqrt(p(1-p)/N) at the empirical p
    double z = 0.0;
    long count = 0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double d_inf = 0.0;
    double total_variation = 0.0;
    std::size_t samples_used = 0;
    std::size_t excluded = 0;
    bool any_z_above_4 = false;

    nlohmann::json to_json() const {
        nlohmann::json rows_j = nlohmann::json::array();
        for (const auto& r : rows)
            rows_j.push_back({{"label", r.label}, {"empirical", r.empirical}, {"predicted", r.predicted},
                              {"stderr", r.stderr_hat}, {"z", r.z}, {"count", r.count}});
        return nlohmann::json{{"rows", rows_j},
                              {"d_inf", d_inf},
                              {"total_variation", total_variation},
                              {"samples_used", samples_used},
                              {"excluded", excluded},
                              {"any_z_above_4", any_z_above_4}};
    }
};

/// Records file: one JSON object per line, the spec on the first line.
inline void write_records_jsonl(const std::string& path, const ExperimentSpec& spec,
                                const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << nlohmann::json{{"spec", spec.to_json()}}.dump() << "\n";
    for (const auto& r : records) out << r.to_json().dump() << "\n";
}

struct RecordsFile {
    ExperimentSpec spec;
    std::map<std::uint64_t, RunRecord> records;
};

inline std::optional<RecordsFile> read_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    RecordsFile out;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    out.spec = ExperimentSpec::from_json(nlohmann::json::parse(line).at("spec"));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        RunRecord r = RunRecord::from_json(nlohmann::json::parse(line));
        out.records[r.index] = r;
    }
    return out;
}

}  // namespace sandlab
