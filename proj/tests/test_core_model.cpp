#include "tndkit/errors.hpp"
#include "tndkit/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace tndkit;

namespace {

TndDataset minimal_dataset() {
    TndDataset d;
    d.feature_names = {"c"};
    d.records = {
        TndRecord{{0.5}, 0, 0},
        TndRecord{{-1.0}, 0, 1},
        TndRecord{{1.5}, 1, 0},
        TndRecord{{2.0}, 1, 1},
    };
    return d;
}

} // namespace

TEST_CASE("validate_dataset accepts a minimal covering dataset and is idempotent") {
    TndDataset d = minimal_dataset();
    const TndDataset& v1 = validate_dataset(d);
    CHECK(&v1 == &d);
    const TndDataset& v2 = validate_dataset(v1);
    CHECK(v2.records.size() == 4);
}

TEST_CASE("validate_dataset names the offending margin") {
    TndDataset d = minimal_dataset();
    for (auto& r : d.records) r.y = 0;
    CHECK_THROWS_WITH_AS(validate_dataset(d), "no cases", DegenerateArm);

    d = minimal_dataset();
    for (auto& r : d.records) r.y = 1;
    CHECK_THROWS_WITH_AS(validate_dataset(d), "no controls", DegenerateArm);

    d = minimal_dataset();
    for (auto& r : d.records) r.v = 0;
    CHECK_THROWS_AS(validate_dataset(d), DegenerateArm);
}

TEST_CASE("validate_dataset rejects dimension mismatches and bad values") {
    TndDataset d = minimal_dataset();
    d.records[2].covariates = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(validate_dataset(d), DimensionMismatch);

    d = minimal_dataset();
    d.records[0].covariates[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate_dataset(d), DimensionMismatch);

    d = minimal_dataset();
    d.records[1].v = 2;
    CHECK_THROWS_AS(validate_dataset(d), DimensionMismatch);

    CHECK_THROWS_AS(validate_dataset(TndDataset{}), EmptyDataset);
}

TEST_CASE("split_folds basic shapes") {
    FoldAssignment f = split_folds(4, 2, 7);
    REQUIRE(f.fold_of.size() == 4);
    int size0 = static_cast<int>(std::count(f.fold_of.begin(), f.fold_of.end(), 0));
    CHECK(size0 == 2);

    f = split_folds(5, 2, 7);
    size0 = static_cast<int>(std::count(f.fold_of.begin(), f.fold_of.end(), 0));
    const int size1 = static_cast<int>(std::count(f.fold_of.begin(), f.fold_of.end(), 1));
    CHECK(std::max(size0, size1) == 3);
    CHECK(std::min(size0, size1) == 2);
}

TEST_CASE("split_folds is deterministic and partitions the index set") {
    const FoldAssignment a = split_folds(1000, 2, 1);
    const FoldAssignment b = split_folds(1000, 2, 1);
    CHECK(a.fold_of == b.fold_of);

    for (int j : {2, 3, 7}) {
        const FoldAssignment f = split_folds(101, j, 42);
        std::vector<int> counts(static_cast<std::size_t>(j), 0);
        for (int fold : f.fold_of) {
            REQUIRE(fold >= 0);
            REQUIRE(fold < j);
            counts[static_cast<std::size_t>(fold)]++;
        }
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*hi - *lo <= 1);
    }

    CHECK(split_folds(1000, 2, 1).fold_of != split_folds(1000, 2, 2).fold_of);
}

TEST_CASE("split_folds rejects invalid fold counts") {
    CHECK_THROWS_AS(split_folds(10, 1, 0), InvalidFoldCount);
    CHECK_THROWS_AS(split_folds(10, 11, 0), InvalidFoldCount);
    CHECK_NOTHROW(split_folds(10, 10, 0));
}
