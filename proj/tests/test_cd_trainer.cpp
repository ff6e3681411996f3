#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "qrbm/cd_trainer.hpp"
#include "qrbm/errors.hpp"
#include "qrbm/simulators.hpp"
#include "support.hpp"

using namespace qrbm;

namespace {

double sig(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

Matrix bernoulli_rows(const Matrix& p, Rng& rng)
{
    Matrix out(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            out(i, j) = uniform01(rng) < p(i, j) ? 1.0 : 0.0;
    return out;
}

// Plain re-derivation of one penalized CD-1 iteration, consuming the stream
// in the same order as the library.
TrainerState reference_step(TrainerState s, const Matrix& R0, const TrainerConfig& cfg, Rng& rng)
{
    const double n = static_cast<double>(R0.rows());
    const auto clock = cfg.lr_schedule == LrSchedule::per_epoch ? s.epoch : s.t;
    const double gamma = cfg.gamma0 / (static_cast<double>(clock) + 1.0);
    const Matrix& W = s.params.W;

    Matrix P0(R0.rows(), W.cols());
    for (Eigen::Index i = 0; i < R0.rows(); ++i)
        for (Eigen::Index k = 0; k < W.cols(); ++k)
            P0(i, k) = sig(s.params.c[k] + R0.row(i).dot(W.col(k)));
    const Matrix A0 = bernoulli_rows(P0, rng);
    Matrix PR(R0.rows(), W.rows());
    for (Eigen::Index i = 0; i < R0.rows(); ++i)
        for (Eigen::Index j = 0; j < W.rows(); ++j)
            PR(i, j) = sig(s.params.b[j] + A0.row(i).dot(W.row(j)));
    const Matrix R1 = bernoulli_rows(PR, rng);
    Matrix P1(R0.rows(), W.cols());
    for (Eigen::Index i = 0; i < R0.rows(); ++i)
        for (Eigen::Index k = 0; k < W.cols(); ++k)
            P1(i, k) = sig(s.params.c[k] + R1.row(i).dot(W.col(k)));

    s.u += cfg.lambda * gamma;
    if (s.t >= 2)
        s.applied += s.pending;
    Matrix W_new = W;
    for (Eigen::Index j = 0; j < W.rows(); ++j)
        for (Eigen::Index k = 0; k < W.cols(); ++k) {
            double grad = 0.0;
            for (Eigen::Index i = 0; i < R0.rows(); ++i)
                grad += R0(i, j) * P0(i, k) - R1(i, j) * P1(i, k);
            if (cfg.normalize_w_update)
                grad /= n;
            const double wp = W(j, k) + gamma * grad;
            const double c = s.applied(j, k);
            const double w = wp > 0 ? std::max(0.0, wp - (s.u + c)) : std::min(0.0, wp + (s.u - c));
            s.pending(j, k) = w - wp;
            W_new(j, k) = w;
        }
    for (Eigen::Index j = 0; j < W.rows(); ++j)
        s.params.b[j] += gamma * (R0.col(j).sum() - R1.col(j).sum()) / n;
    for (Eigen::Index k = 0; k < W.cols(); ++k)
        s.params.c[k] += gamma * (P0.col(k).sum() - P1.col(k).sum()) / n;
    s.params.W = W_new;
    ++s.t;
    return s;
}

SimulatedData small_dina(std::uint64_t seed, std::size_t N = 300, std::size_t K = 3)
{
    SimulationConfig sim;
    sim.N = N;
    sim.K = K;
    return simulate(sim, seed);
}

} // namespace

TEST_CASE("init_params default scheme")
{
    Rng rng = make_rng(1);
    const RbmParams p = init_params(200, 50, DefaultInit{}, rng);
    CHECK(p.b.minCoeff() > -5.0);
    CHECK(p.b.maxCoeff() < 0.0);
    CHECK(p.c.isZero());
    const double mean = p.W.mean();
    const double sd = std::sqrt((p.W.array() - mean).square().mean());
    CHECK(std::abs(mean) < 0.005);
    CHECK(sd == doctest::Approx(0.1).epsilon(0.03));

    Rng a = make_rng(3), b = make_rng(3);
    CHECK(init_params(5, 2, DefaultInit{}, a) == init_params(5, 2, DefaultInit{}, b));
    CHECK_THROWS_AS(init_params(0, 2, DefaultInit{}, a), InvalidArgument);
}

TEST_CASE("init_params warm start")
{
    Rng rng = make_rng(2);
    const QMatrix q = build_structured_q(3);
    const RbmParams p = init_params(9, 3, WarmStartInit{q}, rng);
    CHECK(p.W == q.cast<double>());
    CHECK(p.b.maxCoeff() < 0.0);
    CHECK_THROWS_AS(init_params(8, 3, WarmStartInit{q}, rng), InvalidArgument);
}

TEST_CASE("learning rate")
{
    CHECK(learning_rate(0, 1.0) == 1.0);
    CHECK(learning_rate(9, 5.0) == 0.5);
    for (std::uint64_t t = 0; t < 100; ++t)
        CHECK(learning_rate(t + 1, 2.5) < learning_rate(t, 2.5));
}

TEST_CASE("cumulative L1 clipping")
{
    CHECK(apply_cumulative_l1(0.5, 0.4, 0.2) == 0.0);
    CHECK(apply_cumulative_l1(-0.3, 0.2, 0.0) == doctest::Approx(-0.1));
    for (double w : {-2.0, -0.1, 0.0, 0.3, 7.0})
        CHECK(apply_cumulative_l1(w, 0.0, 0.0) == w);
    // Never crosses zero.
    CHECK(apply_cumulative_l1(0.1, 5.0, 0.0) == 0.0);
    CHECK(apply_cumulative_l1(-0.1, 5.0, 0.0) == 0.0);
}

TEST_CASE("cd1_step matches an independent implementation")
{
    const auto d = small_dina(4, 40, 3);
    const Matrix R = d.R.cast<double>();
    for (const auto schedule : {LrSchedule::per_epoch, LrSchedule::per_iteration})
        for (const bool normalize : {true, false})
            for (const double lambda : {0.0, 0.05}) {
                TrainerConfig cfg;
                cfg.n_attributes = 3;
                cfg.lambda = lambda;
                cfg.gamma0 = 0.7;
                cfg.lr_schedule = schedule;
                cfg.normalize_w_update = normalize;
                Rng init = make_rng(5);
                TrainerState lib(init_params(9, 3, DefaultInit{}, init));
                lib.epoch = 2;
                TrainerState ref = lib;
                Rng a = make_rng(6), b = make_rng(6);
                for (int step = 0; step < 6; ++step) {
                    const Matrix batch = R.middleRows(step * 5, 5);
                    lib = cd1_step(lib, batch.cast<std::uint8_t>(), cfg, a);
                    ref = reference_step(ref, batch, cfg, b);
                    REQUIRE(lib.params.W.isApprox(ref.params.W, 1e-12));
                    REQUIRE(lib.params.b.isApprox(ref.params.b, 1e-12));
                    REQUIRE(lib.params.c.isApprox(ref.params.c, 1e-12));
                    REQUIRE(lib.u == doctest::Approx(ref.u));
                    REQUIRE((lib.applied - ref.applied).cwiseAbs().maxCoeff() < 1e-12);
                }
                if (lambda == 0.0)
                    CHECK(lib.applied.isZero());
            }
}

TEST_CASE("cd1_step errors")
{
    Rng rng = make_rng(7);
    TrainerConfig cfg;
    cfg.n_attributes = 2;
    TrainerState s(RbmParams(3, 2));
    CHECK_THROWS_AS(cd1_step(s, BinaryMatrix(0, 3), cfg, rng), InvalidArgument);
    CHECK_THROWS_AS(cd1_step(s, BinaryMatrix::Zero(2, 4), cfg, rng), InvalidArgument);
}

TEST_CASE("penalty ledger stays within the available penalty")
{
    const auto d = small_dina(8, 200, 3);
    TrainerConfig cfg;
    cfg.n_attributes = 3;
    cfg.lambda = 0.02;
    cfg.gamma0 = 2.0;
    cfg.lr_schedule = LrSchedule::per_iteration;
    Rng rng = make_rng(9);
    TrainerState s(init_params(9, 3, DefaultInit{}, rng));
    double last_u = 0.0;
    for (int step = 0; step < 400; ++step) {
        s = cd1_step(s, d.R.middleRows((step % 4) * 50, 50), cfg, rng);
        REQUIRE(s.u >= last_u);
        REQUIRE(s.applied.cwiseAbs().maxCoeff() <= s.u + 1e-12);
        last_u = s.u;
    }
}

TEST_CASE("huge lambda zeroes every weight within one epoch")
{
    const auto d = small_dina(10);
    TrainerConfig cfg;
    cfg.n_attributes = 3;
    cfg.lambda = 1e3;
    cfg.n_epochs = 1;
    cfg.seed = 11;
    CHECK(train(d.R, cfg).params.W.isZero(0.0));
}

TEST_CASE("lambda zero leaves no exact zeros")
{
    const auto d = small_dina(12);
    TrainerConfig cfg;
    cfg.n_attributes = 3;
    cfg.lambda = 0.0;
    cfg.n_epochs = 10;
    cfg.seed = 13;
    CHECK((train(d.R, cfg).params.W.array() == 0.0).count() == 0);
}

TEST_CASE("sparsity grows with lambda on average")
{
    const std::vector<double> lambdas = {0.003, 0.009, 0.015};
    std::vector<double> mean_zeros(lambdas.size(), 0.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = small_dina(100 + seed, 500, 3);
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            TrainerConfig cfg;
            cfg.n_attributes = 3;
            cfg.lambda = lambdas[i];
            cfg.n_epochs = 40;
            cfg.seed = seed;
            mean_zeros[i] += static_cast<double>((train(d.R, cfg).params.W.array() == 0.0).count());
        }
    }
    CHECK(mean_zeros[0] <= mean_zeros[1]);
    CHECK(mean_zeros[1] <= mean_zeros[2]);
}

TEST_CASE("CD-1 increment tracks the exact gradient")
{
    Rng rng = make_rng(14);
    const RbmParams p = testing::random_params(3, 2, rng, 0.5);
    const BinaryMatrix data = testing::random_binary(20, 3, rng, 0.6);
    TrainerConfig cfg;
    cfg.n_attributes = 2;
    cfg.gamma0 = 1.0;
    cfg.lr_schedule = LrSchedule::per_iteration;
    Matrix mean = Matrix::Zero(3, 2);
    const int steps = 10000;
    for (int i = 0; i < steps; ++i) {
        const TrainerState s = cd1_step(TrainerState(p), data, cfg, rng);
        mean += s.params.W - p.W; // gamma = 1, already divided by the batch size
    }
    mean /= steps;
    const Matrix exact = exact_loglik_gradient(p, data).W / static_cast<double>(data.rows());
    const Eigen::Map<const Vector> x(mean.data(), 6), y(exact.data(), 6);
    const Vector xc = x.array() - x.mean(), yc = y.array() - y.mean();
    CHECK(xc.dot(yc) / (xc.norm() * yc.norm()) > 0.9);
}

TEST_CASE("batch partition")
{
    Rng rng = make_rng(15);
    const auto batches = partition_batches(103, 25, rng);
    REQUIRE(batches.size() == 5);
    CHECK(batches.back().size() == 3);
    std::set<Eigen::Index> seen;
    for (const auto& b : batches)
        seen.insert(b.begin(), b.end());
    CHECK(seen.size() == 103);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 102);
    CHECK_THROWS_AS(partition_batches(10, 0, rng), InvalidArgument);
}

TEST_CASE("train: determinism, trace, counters")
{
    const auto d = small_dina(16, 130, 3);
    TrainerConfig cfg;
    cfg.n_attributes = 3;
    cfg.lambda = 0.01;
    cfg.n_epochs = 7;
    cfg.seed = 17;
    const TrainResult a = train(d.R, cfg), b = train(d.R, cfg);
    CHECK(a.params == b.params);
    CHECK(a.error_trace == b.error_trace);
    CHECK(a.error_trace.size() == 7);
    for (double e : a.error_trace)
        CHECK(e >= 0.0);

    Rng rng = make_rng(18);
    const auto run = run_epochs(TrainerState(init_params(9, 3, DefaultInit{}, rng)), d.R, cfg, rng);
    CHECK(run.state.epoch == 7);
    CHECK(run.state.t == 7 * 3); // 130 rows in batches of 50 -> 3 batches
}

TEST_CASE("trainer config validation")
{
    const auto d = small_dina(19, 40, 3);
    TrainerConfig ok;
    ok.n_attributes = 3;
    ok.n_epochs = 1;
    ok.batch_size = 40;
    CHECK_NOTHROW(train(d.R, ok));

    auto bad = [&](auto mutate) {
        TrainerConfig c = ok;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.batch_size = 41; })), InvalidArgument);
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.batch_size = 0; })), InvalidArgument);
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.lambda = -0.1; })), InvalidArgument);
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.gamma0 = 0.0; })), InvalidArgument);
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.n_epochs = 0; })), InvalidArgument);
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.n_attributes = 0; })), InvalidArgument);
    CHECK_THROWS_AS(train(d.R, bad([](auto& c) { c.init = WarmStartInit{QMatrix::Ones(9, 2)}; })),
                    InvalidArgument);
}

TEST_CASE("masked weights never move")
{
    const auto d = small_dina(20, 100, 3);
    TrainerConfig cfg;
    cfg.n_attributes = 3;
    cfg.n_epochs = 3;
    Rng rng = make_rng(21);
    TrainerState s(init_params(9, 3, DefaultInit{}, rng));
    s.trainable(0, 0) = 0;
    s.trainable(4, 2) = 0;
    const double w00 = s.params.W(0, 0), w42 = s.params.W(4, 2);
    const auto run = run_epochs(s, d.R, cfg, rng);
    CHECK(run.state.params.W(0, 0) == w00);
    CHECK(run.state.params.W(4, 2) == w42);
    CHECK(run.state.params.W(1, 1) != s.params.W(1, 1));
}
