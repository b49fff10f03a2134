#include "tndkit/dgp.hpp"

#include "tndkit/errors.hpp"
#include "tndkit/rng.hpp"

#include <algorithm>
#include <thread>

namespace tndkit {

namespace {

constexpr std::uint64_t kPopulationStream = 0x706f70ULL;   // "pop"
constexpr std::uint64_t kTruthStream = 0x7472757468ULL;    // "truth"

FullPopulationRow draw_row(const DgpConfig& cfg, std::uint64_t index) {
    Rng rng(cfg.seed, kPopulationStream, index);
    FullPopulationRow r;
    r.c = rng.uniform(cfg.c_min, cfg.c_max);
    r.u1 = rng.bernoulli(0.5) ? 1 : 0;
    r.u2 = rng.bernoulli(0.5) ? 1 : 0;
    r.v = rng.bernoulli(expit(cfg.lambda_v(r.c))) ? 1 : 0;
    r.i1 = rng.bernoulli(expit(cfg.lambda_i1(r.c, r.u1))) ? 1 : 0;
    r.i2 = rng.bernoulli(expit(cfg.lambda_covid(r.c, r.v, r.u1, r.u2))) ? 1 : 0;
    // Symptoms may only develop from an infection that is present; the
    // hospitalization draw only applies to the symptomatic.
    const double u_wo = rng.uniform();
    const double u_wc = rng.uniform();
    const double u_h = rng.uniform();
    const int w_other = (r.i1 == 1 && u_wo < expit(cfg.lambda_w_other(r.c, r.u1))) ? 1 : 0;
    const int w_covid =
        (r.i2 == 1 && u_wc < expit(cfg.lambda_w_covid(r.c, r.v, r.u1, r.u2))) ? 1 : 0;
    r.w = std::max(w_other, w_covid);
    r.h = (r.w == 1 && u_h < expit(cfg.lambda_h(r.c, r.v, r.u1))) ? 1 : 0;
    // Other-first categorical infection status: co-infected subjects are
    // classified by the non-target infection and end up as controls.
    const int icat = r.i1 == 1 ? 1 : (r.i2 == 1 ? 2 : 0);
    r.s = (icat != 0 && r.w == 1 && r.h == 1) ? 1 : 0;
    r.y = (icat == 2 && r.w == 1 && r.h == 1) ? 1 : 0;
    return r;
}

template <typename Fn>
void parallel_chunks(std::size_t n, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 4096) {
        fn(std::size_t{0}, n, 0);
        return;
    }
    const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(n, chunk * static_cast<std::size_t>(t));
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi, t] { fn(lo, hi, t); });
    }
    for (auto& th : pool) th.join();
}

} // namespace

std::vector<FullPopulationRow> generate_population(const DgpConfig& config, std::size_t n_pop,
                                                   int threads) {
    std::vector<FullPopulationRow> rows(n_pop);
    parallel_chunks(n_pop, threads, [&](std::size_t lo, std::size_t hi, int) {
        for (std::size_t i = lo; i < hi; ++i) rows[i] = draw_row(config, i);
    });
    return rows;
}

TndDataset sample_tnd(const std::vector<FullPopulationRow>& population, std::size_t target_n) {
    TndDataset out;
    out.feature_names = {"c"};
    out.records.reserve(target_n);
    for (const FullPopulationRow& r : population) {
        if (r.s != 1) continue;
        out.records.push_back(TndRecord{{r.c}, r.v, r.y});
        if (out.records.size() == target_n) return out;
    }
    throw InsufficientSample(out.records.size(), target_n);
}

TndDataset simulate_tnd_dataset(const DgpConfig& config, std::size_t target_n,
                                std::size_t max_pop, int threads) {
    TndDataset out;
    out.feature_names = {"c"};
    out.records.reserve(target_n);
    // Row i of the conceptual infinite population is a pure function of
    // (config, i); scanning rows in index order makes the batch size
    // irrelevant to the result.
    std::size_t next_index = 0;
    std::size_t batch = std::max<std::size_t>(200 * target_n, 65536);
    while (out.records.size() < target_n && next_index < max_pop) {
        batch = std::min(batch, max_pop - next_index);
        std::vector<FullPopulationRow> rows(batch);
        parallel_chunks(batch, threads, [&](std::size_t lo, std::size_t hi, int) {
            for (std::size_t i = lo; i < hi; ++i) rows[i] = draw_row(config, next_index + i);
        });
        for (const FullPopulationRow& r : rows) {
            if (r.s != 1) continue;
            out.records.push_back(TndRecord{{r.c}, r.v, r.y});
            if (out.records.size() == target_n) break;
        }
        next_index += batch;
    }
    if (out.records.size() < target_n) throw InsufficientSample(out.records.size(), target_n);
    return out;
}

TruthResult truth_mrr_monte_carlo(const DgpConfig& config, std::size_t n_pop, int threads) {
    struct Sums {
        std::uint64_t y1 = 0, y0 = 0, y1y0 = 0;
    };
    threads = std::max(1, threads);
    std::vector<Sums> partial(static_cast<std::size_t>(threads) + 1);
    parallel_chunks(n_pop, threads, [&](std::size_t lo, std::size_t hi, int tid) {
        Sums s;
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng(config.seed, kTruthStream, i);
            const double c = rng.uniform(config.c_min, config.c_max);
            const int u1 = rng.bernoulli(0.5) ? 1 : 0;
            const int u2 = rng.bernoulli(0.5) ? 1 : 0;
            // Common random numbers: the same uniform deviates drive the
            // Bernoulli draws in both intervention arms.
            const double u_i1 = rng.uniform();
            const double u_i2 = rng.uniform();
            const double u_wo = rng.uniform();
            const double u_wc = rng.uniform();
            const double u_h = rng.uniform();
            const int i1 = u_i1 < expit(config.lambda_i1(c, u1)) ? 1 : 0;
            const int w_other = (i1 == 1 && u_wo < expit(config.lambda_w_other(c, u1))) ? 1 : 0;
            int y_arm[2];
            for (int v = 0; v <= 1; ++v) {
                const int i2 = u_i2 < expit(config.lambda_covid(c, v, u1, u2)) ? 1 : 0;
                const int w_covid =
                    (i2 == 1 && u_wc < expit(config.lambda_w_covid(c, v, u1, u2))) ? 1 : 0;
                const int w = std::max(w_other, w_covid);
                const int h = (w == 1 && u_h < expit(config.lambda_h(c, v, u1))) ? 1 : 0;
                const int icat = i1 == 1 ? 1 : (i2 == 1 ? 2 : 0);
                y_arm[v] = (icat == 2 && w == 1 && h == 1) ? 1 : 0;
            }
            s.y1 += static_cast<std::uint64_t>(y_arm[1]);
            s.y0 += static_cast<std::uint64_t>(y_arm[0]);
            s.y1y0 += static_cast<std::uint64_t>(y_arm[1] * y_arm[0]);
        }
        partial[static_cast<std::size_t>(tid)] = s;
    });
    Sums total;
    for (const Sums& s : partial) {
        total.y1 += s.y1;
        total.y0 += s.y0;
        total.y1y0 += s.y1y0;
    }
    const double n = static_cast<double>(n_pop);
    const double a = static_cast<double>(total.y1) / n;  // mean Y under do(V=1)
    const double b = static_cast<double>(total.y0) / n;  // mean Y under do(V=0)
    if (b <= 0.0) throw DegenerateTruth("denominator arm has zero observed risk");
    TruthResult out;
    out.psi_v1 = a;
    out.psi_v0 = b;
    out.psi_mrr = a / b;
    // Delta method for the ratio of correlated means of Bernoulli draws.
    const double var_a = a * (1.0 - a);
    const double var_b = b * (1.0 - b);
    const double cov = static_cast<double>(total.y1y0) / n - a * b;
    const double var_ratio =
        (var_a / (b * b) + a * a * var_b / (b * b * b * b) - 2.0 * a * cov / (b * b * b)) / n;
    out.mc_se = std::sqrt(std::max(0.0, var_ratio));
    return out;
}

} // namespace tndkit
