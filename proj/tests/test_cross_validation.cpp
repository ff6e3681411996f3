#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "qrbm/cross_validation.hpp"
#include "qrbm/errors.hpp"
#include "qrbm/evaluation.hpp"
#include "qrbm/simulators.hpp"
#include "support.hpp"

using namespace qrbm;

namespace {

SimulatedData dina(std::uint64_t seed, std::size_t N, std::size_t K)
{
    SimulationConfig sim;
    sim.N = N;
    sim.K = K;
    return simulate(sim, seed);
}

TrainerConfig quick_trainer(std::size_t K, std::size_t epochs)
{
    TrainerConfig t;
    t.n_attributes = K;
    t.n_epochs = epochs;
    return t;
}

} // namespace

TEST_CASE("split_folds")
{
    Rng rng = make_rng(1);
    const auto splits = split_folds(10, 5, rng);
    REQUIRE(splits.size() == 5);
    std::set<Eigen::Index> all;
    for (const auto& s : splits) {
        CHECK(s.validation.size() == 2);
        CHECK(s.train.size() == 8);
        for (auto i : s.validation) {
            CHECK(all.insert(i).second);
            CHECK(std::find(s.train.begin(), s.train.end(), i) == s.train.end());
        }
    }
    CHECK(all.size() == 10);

    const auto uneven = split_folds(11, 5, rng);
    std::vector<std::size_t> sizes;
    for (const auto& s : uneven)
        sizes.push_back(s.validation.size());
    CHECK(sizes == std::vector<std::size_t>{3, 2, 2, 2, 2});

    Rng a = make_rng(2), b = make_rng(2);
    const auto sa = split_folds(37, 4, a), sb = split_folds(37, 4, b);
    for (std::size_t f = 0; f < 4; ++f)
        CHECK(sa[f].validation == sb[f].validation);

    CHECK_THROWS_AS(split_folds(3, 5, rng), InvalidArgument);
    CHECK_THROWS_AS(split_folds(3, 0, rng), InvalidArgument);
}

TEST_CASE("debias keeps the zero pattern")
{
    const auto d = dina(3, 300, 3);
    Rng rng = make_rng(4);
    RbmParams w(9, 3);
    w.b.setConstant(-1.0);
    const RbmParams all_zero = debias(w, d.R, quick_trainer(3, 5), rng);
    CHECK(all_zero.W.isZero(0.0));
    CHECK(all_zero.b != w.b);

    RbmParams sparse = testing::random_params(9, 3, rng);
    for (Eigen::Index j = 0; j < 9; ++j)
        sparse.W(j, j % 3) = 0.0;
    const RbmParams out = debias(sparse, d.R, quick_trainer(3, 5), rng);
    CHECK(((out.W.array() == 0.0) == (sparse.W.array() == 0.0)).all());
    CHECK(out.W != sparse.W);
}

TEST_CASE("validation error: perfect reconstruction")
{
    // Identity structure with saturated units reproduces its input.
    const Eigen::Index J = 3;
    RbmParams p(Matrix::Identity(J, J) * 40.0, Vector::Constant(J, -20.0),
                Vector::Constant(J, -20.0));
    Rng rng = make_rng(5);
    const BinaryMatrix valid = testing::random_binary(200, J, rng);
    const double err = validation_error(p, valid, quick_trainer(3, 5), 5, rng);
    CHECK(err >= 0.0);
    CHECK(err < 1e-6);
}

TEST_CASE("validation error: independence floor with W frozen at zero")
{
    Rng rng = make_rng(6);
    const Eigen::Index J = 4;
    const std::vector<double> p = {0.2, 0.5, 0.7, 0.9};
    BinaryMatrix valid(4000, J);
    for (Eigen::Index i = 0; i < valid.rows(); ++i)
        for (Eigen::Index j = 0; j < J; ++j)
            valid(i, j) = uniform01(rng) < p[static_cast<std::size_t>(j)];
    double floor = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
        const double m = valid.col(j).cast<double>().mean();
        floor += 2 * m * (1 - m);
    }
    RbmParams w(static_cast<std::size_t>(J), 2);
    TrainerConfig t = quick_trainer(2, 30);
    t.gamma0 = 2.0;
    const double err = validation_error(w, valid, t, 30, rng);
    CHECK(err == doctest::Approx(floor).epsilon(0.05));
}

TEST_CASE("cv_select: argmin over two runs")
{
    const auto d = dina(7, 200, 3);
    CvConfig cv;
    cv.folds = 2;
    cv.lambda_grid = {0.008};
    cv.gamma0_grid = {1.0};
    cv.trainer = quick_trainer(3, 15);
    cv.seed = 8;
    const CvResult r = cv_select(d.R, cv);
    REQUIRE(r.records.size() == 2);
    CHECK(r.val_error == std::min(r.records[0].val_error, r.records[1].val_error));
    CHECK(r.fold_star == (r.records[0].val_error <= r.records[1].val_error ? 0U : 1U));
}

TEST_CASE("cv_select: selection, zero pattern, determinism, sparsity trend")
{
    const auto d = dina(9, 400, 3);
    CvConfig cv;
    cv.folds = 3;
    cv.lambda_grid = {0.003, 0.009, 0.015};
    cv.gamma0_grid = {1.0, 3.0};
    cv.trainer = quick_trainer(3, 20);
    cv.seed = 10;
    const CvResult r = cv_select(d.R, cv);
    REQUIRE(r.records.size() == 18);

    double best = r.records.front().val_error;
    for (const auto& rec : r.records)
        best = std::min(best, rec.val_error);
    CHECK(r.val_error == best);
    CHECK(r.q == extract_q(r.penalized.W));
    CHECK(((r.debiased.W.array() == 0.0) == (r.penalized.W.array() == 0.0)).all());

    std::map<double, double> sparsity;
    for (const auto& rec : r.records)
        sparsity[rec.lambda] += rec.sparsity;
    CHECK(sparsity[0.003] <= sparsity[0.009]);
    CHECK(sparsity[0.009] <= sparsity[0.015]);

    CvConfig threaded = cv;
    threaded.threads = 4;
    const CvResult again = cv_select(d.R, threaded);
    CHECK(again.q == r.q);
    CHECK(again.debiased == r.debiased);
    REQUIRE(again.records.size() == r.records.size());
    for (std::size_t i = 0; i < r.records.size(); ++i)
        CHECK(again.records[i].val_error == r.records[i].val_error);
}

TEST_CASE("cv config validation")
{
    const auto d = dina(11, 50, 3);
    CvConfig cv;
    cv.lambda_grid = {0.01};
    cv.gamma0_grid = {1.0};
    cv.trainer = quick_trainer(3, 1);
    cv.trainer.batch_size = 10;

    auto with = [&](auto mutate) {
        CvConfig c = cv;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(cv_select(d.R, with([](auto& c) { c.folds = 1; })), InvalidArgument);
    CHECK_THROWS_AS(cv_select(d.R, with([](auto& c) { c.lambda_grid.clear(); })), InvalidArgument);
    CHECK_THROWS_AS(cv_select(d.R, with([](auto& c) { c.gamma0_grid = {0.0}; })), InvalidArgument);
    CHECK_THROWS_AS(cv_select(d.R, with([](auto& c) { c.lambda_grid = {-1.0}; })), InvalidArgument);
    CHECK_THROWS_AS(cv_select(d.R, with([](auto& c) { c.folds = 60; })), InvalidArgument);
    CHECK_THROWS_AS(cv_select(d.R, with([](auto& c) { c.validation_epochs = 0; })),
                    InvalidArgument);
}

TEST_CASE("reduced-grid recovery on K=5 DINA data")
{
    int good = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = dina(1000 + seed, 2000, 5);
        CvConfig cv;
        cv.lambda_grid = {0.005, 0.01};
        cv.gamma0_grid = {1.0, 3.0};
        cv.trainer = quick_trainer(5, 300);
        cv.seed = seed;
        const double oe = q_errors(cv_select(d.R, cv).q, d.Q).oe;
        good += oe < 0.25;
        detail += " " + std::to_string(oe);
    }
    INFO("OE per seed:" << detail);
    CHECK(good >= 4);
}
