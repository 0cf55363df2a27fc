#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sandlab/cokernel_models.hpp"
#include "sandlab/graphs.hpp"
#include "sandlab/laws.hpp"
#include "sandlab/records.hpp"
#include "sandlab/sandpile.hpp"

namespace sandlab {

/// Fan work items out to a pool; results land in sample order, so the
/// worker count never changes what a run emits.
template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

/// One graph sample -> one record.  Per-sample seeds derive from
/// (base_seed, index) only.
inline RunRecord run_one_sample(const ExperimentSpec& spec, std::uint64_t index) {
    RunRecord rec;
    rec.index = index;
    Seed seed(mix_seed(spec.base_seed, index), 0);

    auto fill = [&](const auto& graph) {
        rec.connected = is_strongly_connected(graph);
        if (rec.connected) {
            BigIntMatrix red = reduced_laplacian(graph);
            for (auto p : spec.primes) {
                bool truncated = false;
                auto exps = snf_mod_pk(red, p, spec.cap);
                auto type = pgroup_from_exponents(p, exps, spec.cap, &truncated);
                rec.sylow[p] = type.lambda.parts();
                rec.truncated = rec.truncated || truncated;
                std::size_t corank = 0;
                for (auto e : exps)
                    if (e > 0) ++corank;
                rec.corank[p] = corank;
            }
            if (spec.with_log_torsion) {
                rec.log_torsion = log_torsion(graph);
                rec.has_log_torsion = true;
            }
        }
    };

    if (spec.model == "directed-regular") {
        fill(sample_directed_regular(spec.n, spec.d, seed));
    } else if (spec.model == "matching") {
        fill(sample_undirected_matching(spec.n, spec.d, seed));
    } else if (spec.model == "directed-er") {
        fill(sample_directed_er(spec.n, spec.rho, seed));
    } else {
        throw std::invalid_argument("unknown model: " + spec.model);
    }
    return rec;
}

/// Run (or resume) the sampling phase of an experiment.  When `resume_from`
/// holds previously written records for the same run, only missing indices
/// are computed.
inline std::vector<RunRecord> run_samples(const ExperimentSpec& spec,
                                          const std::map<std::uint64_t, RunRecord>* resume_from = nullptr) {
    std::vector<RunRecord> records(spec.samples);
    std::vector<char> have(spec.samples, 0);
    if (resume_from)
        for (const auto& [idx, rec] : *resume_from)
            if (idx < spec.samples) {
                records[idx] = rec;
                have[idx] = 1;
            }
    parallel_for(spec.samples, spec.workers, [&](std::size_t i) {
        if (!have[i]) records[i] = run_one_sample(spec, i);
    });
    return records;
}

namespace experiments_detail {

inline std::string partition_label(std::uint64_t p, const std::vector<int>& lambda) {
    return PGroupType(p, Partition(lambda)).to_string();
}

inline double safe_se(double p_hat, std::size_t n) {
    double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(n));
    return std::max(se, 1e-12);
}

}  // namespace experiments_detail

/// Empirical frequencies against law predictions for the p-Sylow
/// distribution; outcomes beyond the table are binned as "other" with
/// predicted mass = normalization deficit of the table.
inline ComparisonReport sylow_distribution_report(const std::vector<RunRecord>& records,
                                                  std::uint64_t p, LawKind law, int sum_cap = 9,
                                                  int rank_cap = 6, std::size_t top_k = 12) {
    ComparisonReport report;
    std::map<std::vector<int>, long> counts;
    for (const auto& rec : records) {
        if (!rec.connected) {
            ++report.excluded;
            continue;
        }
        ++report.samples_used;
        counts[rec.sylow_type(p).lambda.parts()] += 1;
    }
    if (report.samples_used == 0) return report;

    auto table = law_table(law, p, sum_cap, rank_cap);
    if (table.size() > top_k) table.resize(top_k);
    double table_mass = 0.0;
    long counted = 0;
    double tv = 0.0;
    const double n = static_cast<double>(report.samples_used);
    for (const auto& [group, value] : table) {
        ComparisonRow row;
        row.label = group.to_string();
        row.predicted = static_cast<double>(value.probability);
        auto it = counts.find(group.lambda.parts());
        row.count = it == counts.end() ? 0 : it->second;
        row.empirical = static_cast<double>(row.count) / n;
        row.stderr_hat = experiments_detail::safe_se(row.empirical, report.samples_used);
        row.z = (row.empirical - row.predicted) / row.stderr_hat;
        report.d_inf = std::max(report.d_inf, std::abs(row.empirical - row.predicted));
        tv += std::abs(row.empirical - row.predicted);
        table_mass += row.predicted;
        counted += row.count;
        report.any_z_above_4 = report.any_z_above_4 || std::abs(row.z) > 4.0;
        report.rows.push_back(row);
    }
    ComparisonRow other;
    other.label = "(other)";
    other.count = static_cast<long>(report.samples_used) - counted;
    other.empirical = static_cast<double>(other.count) / n;
    other.predicted = std::max(1.0 - table_mass, 0.0);
    other.stderr_hat = experiments_detail::safe_se(other.empirical, report.samples_used);
    other.z = (other.empirical - other.predicted) / other.stderr_hat;
    tv += std::abs(other.empirical - other.predicted);
    report.any_z_above_4 = report.any_z_above_4 || std::abs(other.z) > 4.0;
    report.rows.push_back(other);
    report.total_variation = tv / 2.0;
    return report;
}

/// Joint (p1, p2) outcome table against the product law (independence across
/// primes in the limit).
inline ComparisonReport joint_sylow_report(const std::vector<RunRecord>& records, std::uint64_t p1,
                                           std::uint64_t p2, LawKind law, std::size_t top_pairs = 6) {
    ComparisonReport report;
    std::map<std::pair<std::vector<int>, std::vector<int>>, long> counts;
    for (const auto& rec : records) {
        if (!rec.connected) {
            ++report.excluded;
            continue;
        }
        ++report.samples_used;
        counts[{rec.sylow_type(p1).lambda.parts(), rec.sylow_type(p2).lambda.parts()}] += 1;
    }
    if (report.samples_used == 0) return report;

    // rank candidate pairs by product mass
    auto t1 = law_table(law, p1, 6, 4);
    auto t2 = law_table(law, p2, 6, 4);
    std::vector<std::pair<double, std::pair<PGroupType, PGroupType>>> pairs;
    for (const auto& [g1, v1] : t1)
        for (const auto& [g2, v2] : t2)
            pairs.push_back({static_cast<double>(joint_prob({g1, g2}, law).probability), {g1, g2}});
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (pairs.size() > top_pairs) pairs.resize(top_pairs);

    const double n = static_cast<double>(report.samples_used);
    for (const auto& [mass, groups] : pairs) {
        ComparisonRow row;
        row.label = "(" + groups.first.to_string() + " ; " + groups.second.to_string() + ")";
        row.predicted = mass;
        auto it = counts.find({groups.first.lambda.parts(), groups.second.lambda.parts()});
        row.count = it == counts.end() ? 0 : it->second;
        row.empirical = static_cast<double>(row.count) / n;
        row.stderr_hat = experiments_detail::safe_se(row.empirical, report.samples_used);
        row.z = (row.empirical - row.predicted) / row.stderr_hat;
        report.d_inf = std::max(report.d_inf, std::abs(row.empirical - row.predicted));
        report.any_z_above_4 = report.any_z_above_4 || std::abs(row.z) > 4.0;
        report.rows.push_back(row);
    }
    return report;
}

struct MomentEstimate {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t samples_used = 0;
    std::size_t excluded = 0;
};

/// E|Sur(Gamma, V)| from stored Sylow types: the surjection count factors
/// over the primes of V and is computed group-theoretically per record.
inline MomentEstimate moment_estimate(const std::vector<RunRecord>& records, const AbelianGroupType& v) {
    MomentEstimate est;
    std::vector<std::uint64_t> primes = v.primes();
    std::map<std::uint64_t, SubgroupLattice> lattices;
    for (auto p : primes) lattices.emplace(p, SubgroupLattice(AbelianGroupType::from_sylow(v.sylow(p))));

    double sum = 0.0, sumsq = 0.0;
    for (const auto& rec : records) {
        if (!rec.connected) {
            ++est.excluded;
            continue;
        }
        double value = 1.0;
        for (auto p : primes) {
            if (!rec.sylow.count(p)) throw std::out_of_range("records lack prime " + std::to_string(p));
            AbelianGroupType gp = AbelianGroupType::from_sylow(rec.sylow_type(p));
            value *= mpz_get_d(sur_count(gp, lattices.at(p)).get_mpz_t());
        }
        sum += value;
        sumsq += value * value;
        ++est.samples_used;
    }
    if (est.samples_used == 0) return est;
    const double n = static_cast<double>(est.samples_used);
    est.mean = sum / n;
    double var = std::max(sumsq / n - est.mean * est.mean, 0.0);
    est.stderr_of_mean = std::sqrt(var / n);
    return est;
}

struct SingularityRow {
    std::size_t n = 0;
    double singular_fraction = 0.0;
    double mean_corank = 0.0;
    std::size_t samples = 0;
};

/// Fraction of matching-model samples whose adjacency matrix is singular
/// mod p (an upper-bound diagnostic for real singularity).  gcd(p, d) = 1 is
/// enforced so dividing degrees cannot fake a kernel vector.
inline std::vector<SingularityRow> singularity_experiment(const std::vector<std::size_t>& n_list,
                                                          unsigned d, std::uint64_t p, std::size_t samples,
                                                          std::uint64_t base_seed, unsigned workers = 1) {
    if (d < 3) throw std::invalid_argument("singularity_experiment: d >= 3");
    if (std::gcd<std::uint64_t, std::uint64_t>(p, d) != 1)
        throw std::invalid_argument("singularity_experiment: gcd(p, d) must be 1");
    std::vector<SingularityRow> rows;
    for (std::size_t n : n_list) {
        std::vector<std::size_t> coranks(samples, 0);
        parallel_for(samples, workers, [&](std::size_t i) {
            auto g = sample_undirected_matching(n, d, Seed(mix_seed(base_seed, i), 0));
            coranks[i] = corank_mod_p(adjacency(g), p);
        });
        SingularityRow row;
        row.n = n;
        row.samples = samples;
        for (auto c : coranks) {
            if (c > 0) row.singular_fraction += 1.0;
            row.mean_corank += static_cast<double>(c);
        }
        row.singular_fraction /= static_cast<double>(samples);
        row.mean_corank /= static_cast<double>(samples);
        rows.push_back(row);
    }
    return rows;
}

struct TreeEntropyRow {
    std::size_t n = 0;
    double mean = 0.0;        // mean of log|tors| / n
    double stderr_of_mean = 0.0;
    double bound = 0.0;       // n log sqrt(2 d^2) normalized by n
    bool bound_violated = false;
    std::size_t samples = 0;
};

/// mean log|tors(Gamma_n)| / n against the McKay-Lyons constant, with the
/// Hadamard bound log sqrt(2 d^2) checked on every sample.
inline std::vector<TreeEntropyRow> tree_entropy_experiment(const std::vector<std::size_t>& n_list,
                                                           unsigned d, std::size_t samples,
                                                           std::uint64_t base_seed, unsigned workers = 1) {
    if (d < 3) throw std::invalid_argument("tree_entropy_experiment: d >= 3");
    std::vector<TreeEntropyRow> rows;
    for (std::size_t n : n_list) {
        std::vector<double> values(samples, 0.0);
        parallel_for(samples, workers, [&](std::size_t i) {
            auto g = sample_undirected_matching(n, d, Seed(mix_seed(base_seed, i), 0));
            values[i] = log_torsion(g) / static_cast<double>(n);
        });
        TreeEntropyRow row;
        row.n = n;
        row.samples = samples;
        row.bound = std::log(std::sqrt(2.0 * d * d));
        double sum = 0, sumsq = 0;
        for (double v : values) {
            sum += v;
            sumsq += v * v;
            if (v >= row.bound) row.bound_violated = true;
        }
        row.mean = sum / static_cast<double>(samples);
        double var = std::max(sumsq / static_cast<double>(samples) - row.mean * row.mean, 0.0);
        row.stderr_of_mean = std::sqrt(var / static_cast<double>(samples));
        rows.push_back(row);
    }
    return rows;
}

struct RankGrowthRow {
    std::size_t n = 0;
    double mean_max_rank_ratio = 0.0;  // mean over samples of max_p corank_p / n
    std::size_t samples = 0;
};

/// max_p rank_p(Gamma_n) / n over a prime list, per n; Theorem-level claim is
/// that it tends to zero.
inline std::vector<RankGrowthRow> rank_growth_experiment(const std::vector<std::size_t>& n_list,
                                                         unsigned d, const std::vector<std::uint64_t>& primes,
                                                         std::size_t samples, std::uint64_t base_seed,
                                                         unsigned workers = 1) {
    std::vector<RankGrowthRow> rows;
    for (std::size_t n : n_list) {
        std::vector<double> ratios(samples, 0.0);
        parallel_for(samples, workers, [&](std::size_t i) {
            auto g = sample_undirected_matching(n, d, Seed(mix_seed(base_seed, i), 0));
            BigIntMatrix red = reduced_laplacian(g);
            std::size_t worst = 0;
            for (auto p : primes) worst = std::max(worst, corank_mod_p(red, p));
            ratios[i] = static_cast<double>(worst) / static_cast<double>(n);
        });
        RankGrowthRow row;
        row.n = n;
        row.samples = samples;
        for (double r : ratios) row.mean_max_rank_ratio += r;
        row.mean_max_rank_ratio /= static_cast<double>(samples);
        rows.push_back(row);
    }
    return rows;
}

struct ParityRow {
    std::size_t n = 0;
    std::size_t samples = 0;
    std::size_t connected = 0;
    std::size_t odd_corank = 0;  // among connected samples
};

/// Even-d parity check: the 2-corank of the reduced Laplacian is odd on
/// every matching-model sample with even d.
inline std::vector<ParityRow> parity_check_experiment(const std::vector<std::size_t>& n_list, unsigned d,
                                                      std::size_t samples, std::uint64_t base_seed,
                                                      unsigned workers = 1) {
    if (d % 2 != 0) throw std::invalid_argument("parity_check_experiment: d must be even");
    std::vector<ParityRow> rows;
    for (std::size_t n : n_list) {
        std::vector<int> status(samples, 0);  // 0 = disconnected, 1 = even, 2 = odd
        parallel_for(samples, workers, [&](std::size_t i) {
            auto g = sample_undirected_matching(n, d, Seed(mix_seed(base_seed, i), 0));
            if (!is_connected(g)) return;
            std::size_t corank = corank_mod_p(reduced_laplacian(g), 2);
            status[i] = corank % 2 == 1 ? 2 : 1;
        });
        ParityRow row;
        row.n = n;
        row.samples = samples;
        for (int s : status) {
            if (s > 0) ++row.connected;
            if (s == 2) ++row.odd_corank;
        }
        rows.push_back(row);
    }
    return rows;
}

/// Cokernel experiment for the p-adic matrix models; Sylow types are
/// reported up to p^cap (default: k minus the 4 guard digits).
struct CokernelExperimentResult {
    std::vector<PGroupType> types;
    std::size_t truncated = 0;
};

inline CokernelExperimentResult cokernel_experiment(const MatrixModel& model, std::size_t samples,
                                                    std::uint64_t base_seed, unsigned workers = 1,
                                                    unsigned cap = 0) {
    if (cap == 0) cap = model.k > 5 ? model.k - 4 : 1;
    CokernelExperimentResult out;
    out.types.resize(samples, PGroupType(model.p, Partition{}));
    std::vector<char> truncated(samples, 0);
    parallel_for(samples, workers, [&](std::size_t i) {
        auto m = sample_matrix(model, Seed(mix_seed(base_seed, i), 0));
        bool t = false;
        out.types[i] = cokernel_sylow(model, m, cap, &t);
        truncated[i] = t ? 1 : 0;
    });
    for (char t : truncated) out.truncated += t;
    return out;
}

/// Compare a list of sampled p-group types against a law.
inline ComparisonReport compare_types_to_law(const std::vector<PGroupType>& types, std::uint64_t p,
                                             LawKind law, int sum_cap = 9, int rank_cap = 6,
                                             std::size_t top_k = 12) {
    std::vector<RunRecord> records(types.size());
    for (std::size_t i = 0; i < types.size(); ++i) {
        records[i].index = i;
        records[i].connected = true;
        records[i].sylow[p] = types[i].lambda.parts();
    }
    return sylow_distribution_report(records, p, law, sum_cap, rank_cap, top_k);
}

/// Generic empirical-vs-predicted comparison (labels already aligned).
inline ComparisonReport compare(const std::map<std::string, long>& counts, std::size_t samples,
                                const std::map<std::string, double>& predicted) {
    ComparisonReport report;
    report.samples_used = samples;
    const double n = static_cast<double>(samples);
    std::set<std::string> labels;
    for (const auto& [k, v] : counts) labels.insert(k);
    for (const auto& [k, v] : predicted) labels.insert(k);
    double tv = 0.0;
    for (const auto& label : labels) {
        ComparisonRow row;
        row.label = label;
        auto itc = counts.find(label);
        row.count = itc == counts.end() ? 0 : itc->second;
        row.empirical = static_cast<double>(row.count) / n;
        auto itp = predicted.find(label);
        row.predicted = itp == predicted.end() ? 0.0 : itp->second;
        row.stderr_hat = experiments_detail::safe_se(row.empirical, samples);
        row.z = (row.empirical - row.predicted) / row.stderr_hat;
        report.d_inf = std::max(report.d_inf, std::abs(row.empirical - row.predicted));
        tv += std::abs(row.empirical - row.predicted);
        report.any_z_above_4 = report.any_z_above_4 || std::abs(row.z) > 4.0;
        report.rows.push_back(row);
    }
    report.total_variation = tv / 2.0;
    return report;
}

}  // namespace sandlab
