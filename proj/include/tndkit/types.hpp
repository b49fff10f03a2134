#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tndkit {

// One sampled subject: model-ready numeric covariates, vaccination status,
// and the case indicator (1 = test-positive, 0 = test-negative control).
struct TndRecord {
    std::vector<double> covariates;
    int v = 0;
    int y = 0;
};

struct TndDataset {
    std::vector<TndRecord> records;
    std::vector<std::string> feature_names;

    std::size_t size() const { return records.size(); }
    std::size_t dim() const { return feature_names.size(); }
};

// Deterministic partition of {0..n-1} into j_folds folds whose sizes differ
// by at most one. j_folds == 1 means "no cross-fitting".
struct FoldAssignment {
    std::vector<int> fold_of;
    int j_folds = 1;

    std::size_t size() const { return fold_of.size(); }

    static FoldAssignment single(std::size_t n) {
        return FoldAssignment{std::vector<int>(n, 0), 1};
    }
};

struct ConfInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double x) const { return lower <= x && x <= upper; }
};

struct EstimatorOutput {
    double psi_v1 = 0.0;
    double psi_v0 = 0.0;
    double psi_mrr = 0.0;
    double ve = 0.0; // 1 - psi_mrr
    // Log-scale standard error and CI for psi_mrr; absent when the method
    // does not emit one (outcome regression without bootstrap).
    std::optional<double> se_log_mrr;
    std::optional<ConfInterval> ci_mrr;
    // Per-observation uncentered contributions whose mean is psi_v.
    std::vector<double> influence_v1;
    std::vector<double> influence_v0;
    std::string method;
    double alpha = 0.05;
};

// Throws EmptyDataset, DimensionMismatch, or DegenerateArm (naming the
// missing margin). Returns its input unchanged when all invariants hold.
const TndDataset& validate_dataset(const TndDataset& raw);

// Seeded uniform permutation, then contiguous blocks. Throws InvalidFoldCount
// unless n >= j >= 2.
FoldAssignment split_folds(std::size_t n, int j, std::uint64_t seed);

} // namespace tndkit
