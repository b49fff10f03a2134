#include "tndkit/types.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"

#include <cmath>
#include <numeric>

namespace tndkit {

const TndDataset& validate_dataset(const TndDataset& raw) {
    if (raw.records.empty()) throw EmptyDataset{};
    const std::size_t d = raw.feature_names.size();
    bool any_case = false, any_control = false, any_v1 = false, any_v0 = false;
    for (std::size_t i = 0; i < raw.records.size(); ++i) {
        const TndRecord& r = raw.records[i];
        if (r.covariates.size() != d) {
            throw DimensionMismatch("record " + std::to_string(i) + " has " +
                                    std::to_string(r.covariates.size()) + " covariates, expected " +
                                    std::to_string(d));
        }
        for (double c : r.covariates) {
            if (!std::isfinite(c)) {
                throw DimensionMismatch("record " + std::to_string(i) +
                                        " has a non-finite covariate");
            }
        }
        if (r.v != 0 && r.v != 1) {
            throw DimensionMismatch("record " + std::to_string(i) + " has v outside {0,1}");
        }
        if (r.y != 0 && r.y != 1) {
            throw DimensionMismatch("record " + std::to_string(i) + " has y outside {0,1}");
        }
        (r.y == 1 ? any_case : any_control) = true;
        (r.v == 1 ? any_v1 : any_v0) = true;
    }
    if (!any_case) throw DegenerateArm("no cases");
    if (!any_control) throw DegenerateArm("no controls");
    if (!any_v1) throw DegenerateArm("no records with v=1");
    if (!any_v0) throw DegenerateArm("no records with v=0");
    return raw;
}

FoldAssignment split_folds(std::size_t n, int j, std::uint64_t seed) {
    if (j < 2 || static_cast<std::size_t>(j) > n) {
        throw InvalidFoldCount("fold count " + std::to_string(j) + " invalid for n=" +
                               std::to_string(n) + " (need n >= j >= 2)");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed, 0x666f6c6473ULL); // "folds" stream
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t k = rng.below(i + 1);
        std::swap(perm[i], perm[k]);
    }
    // Contiguous blocks over the permuted order; the first n % j folds get
    // one extra element.
    FoldAssignment out;
    out.j_folds = j;
    out.fold_of.assign(n, 0);
    const std::size_t base = n / static_cast<std::size_t>(j);
    const std::size_t extra = n % static_cast<std::size_t>(j);
    std::size_t pos = 0;
    for (int f = 0; f < j; ++f) {
        std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t t = 0; t < len; ++t) out.fold_of[perm[pos++]] = f;
    }
    return out;
}

} // namespace tndkit
