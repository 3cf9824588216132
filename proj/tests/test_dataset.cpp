#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "antfis/dataset.hpp"
#include "antfis/errors.hpp"
#include "helpers.hpp"

using namespace antfis;

namespace {

const std::string kHeader = "x,y,z,pressure,air_superficial_velocity,air_volume_fraction\n";

DataSet make_rows(std::size_t n)
{
    DataSet d;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(i);
        d.samples.push_back({v, 2 * v, 3 * v, 1e5 + v, 0.01 * v, 0.001 * v});
    }
    return d;
}

} // namespace

TEST_CASE("load_dataset reads every row in order")
{
    test::TempDir dir("dataset");
    std::string text = kHeader;
    for (int i = 0; i < 1500; ++i) {
        text += std::to_string(0.001 * i) + ",0.01,1.2,101325," + std::to_string(0.0001 * i) + ",0.05\n";
    }
    test::write_text(dir / "d.csv", text);
    const DataSet d = load_dataset(dir / "d.csv", FeatureStage::XYZ3);
    CHECK(d.size() == 1500);
    CHECK(d.stage == FeatureStage::XYZ3);
    CHECK(d.samples[10].x == doctest::Approx(0.010));
    CHECK(d.samples[1499].superficial_velocity == doctest::Approx(0.1499));
}

TEST_CASE("load_dataset errors")
{
    test::TempDir dir("dataset_err");

    CHECK_THROWS_AS(load_dataset(dir / "missing.csv", FeatureStage::X1), DataError);

    test::write_text(dir / "empty.csv", kHeader);
    CHECK_THROWS_WITH_AS(load_dataset(dir / "empty.csv", FeatureStage::X1), doctest::Contains("no samples"), DataError);

    test::write_text(dir / "vf.csv", kHeader + "0,0,1,101325,0.1,0.1\n0,0,1,101325,0.1,1.2\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir / "vf.csv", FeatureStage::X1), doctest::Contains("row 3"), DataError);

    test::write_text(dir / "bad.csv", kHeader + "0,0,abc,101325,0.1,0.1\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir / "bad.csv", FeatureStage::X1), doctest::Contains("row 2"), DataError);

    test::write_text(dir / "short.csv", kHeader + "0,0,1,101325,0.1\n");
    CHECK_THROWS_AS(load_dataset(dir / "short.csv", FeatureStage::X1), DataError);

    test::write_text(dir / "header.csv", "x,y,z,p,u,a\n0,0,1,101325,0.1,0.1\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir / "header.csv", FeatureStage::X1), doctest::Contains("header"), DataError);
}

TEST_CASE("write then load preserves values exactly")
{
    DataSet d = make_rows(20);
    d.samples[3].x = 0.1 + 0.2;
    std::stringstream ss;
    write_dataset(ss, d);
    const DataSet back = parse_dataset(ss, FeatureStage::XYZPV5);
    CHECK(back.samples == d.samples);
}

TEST_CASE("split sizes and determinism")
{
    SUBCASE("n=1500, p=0.70")
    {
        const auto [train, test] = split(make_rows(1500), 0.70, 7);
        CHECK(train.size() == 1050);
        CHECK(test.size() == 450);
    }
    SUBCASE("same seed twice gives identical partitions")
    {
        const DataSet d = make_rows(10);
        const auto a = split(d, 0.5, 3);
        const auto b = split(d, 0.5, 3);
        CHECK(a.first.samples == b.first.samples);
        CHECK(a.second.samples == b.second.samples);
    }
    SUBCASE("n=10, p=0.70 covers the input disjointly")
    {
        const auto [train, test] = split_indices(10, 0.70, 11);
        CHECK(train.size() == 7);
        std::set<std::size_t> all(train.begin(), train.end());
        for (auto i : test) {
            CHECK(all.insert(i).second);
        }
        CHECK(all.size() == 10);
        CHECK(*all.rbegin() == 9);
    }
    CHECK_THROWS_AS(split(make_rows(10), 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split(make_rows(10), 1.0, 1), ConfigError);
    CHECK_THROWS_AS(split(make_rows(1), 0.5, 1), ConfigError);
}

TEST_CASE("split property: disjoint cover for random sizes, fractions and seeds")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 300;
        const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        const auto n_train = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
        if (n_train == 0 || n_train == n) {
            continue;
        }
        const auto seed = rng();
        const auto [train, test] = split_indices(n, p, seed);
        CHECK(train.size() == n_train);
        std::vector<std::size_t> all(train);
        all.insert(all.end(), test.begin(), test.end());
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(all[i] == i);
        }
        CHECK(split_indices(n, p, seed) == std::make_pair(train, test));
    }
}

TEST_CASE("normalizer")
{
    DataSet d;
    d.stage = FeatureStage::X1;
    d.samples = {{0.5, 0, 0, 0, 0, 0}, {2.6, 0, 0, 0, 0, 0}};
    const Normalizer n = fit_normalizer(d);
    const DataSet out = apply_normalizer(n, d);
    CHECK(out.samples[0].x == 0.0);
    CHECK(out.samples[1].x == 1.0);

    d.samples = {{1, 0, 0, 0, 0, 0}, {2, 0, 0, 0, 0, 0}, {3, 0, 0, 0, 0, 0}};
    const Normalizer n3 = fit_normalizer(d);
    const auto out3 = apply_normalizer(n3, d);
    CHECK(out3.samples[0].x == 0.0);
    CHECK(out3.samples[1].x == 0.5);
    CHECK(out3.samples[2].x == 1.0);

    // (3.5 - 1) / (3 - 1), not clipped
    const double raw[] = {3.5};
    CHECK(n3.apply(raw)(0) == doctest::Approx(1.25).epsilon(1e-15));

    d.stage = FeatureStage::XY2;
    CHECK_THROWS_WITH_AS(fit_normalizer(d), doctest::Contains("'y'"), ConfigError);
}

TEST_CASE("normalizer maps its own fit data into [0, 1]")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    DataSet d;
    d.stage = FeatureStage::XYZPV5;
    for (int i = 0; i < 300; ++i) {
        d.samples.push_back({g(rng), 0.1 * g(rng), 2 + g(rng), 1e5 + 1e3 * g(rng), std::abs(g(rng)), 0.1});
    }
    const auto out = apply_normalizer(fit_normalizer(d), d);
    const Eigen::MatrixXd f = out.features();
    CHECK(f.minCoeff() >= 0.0);
    CHECK(f.maxCoeff() <= 1.0);
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
        CHECK(f.col(j).minCoeff() == 0.0);
        CHECK(f.col(j).maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("feature stages are nested prefixes")
{
    const Sample s{1, 2, 3, 4, 5, 0.5};
    for (int k = 1; k < 5; ++k) {
        DataSet a{{s}, stage_from_arity(k)};
        DataSet b{{s}, stage_from_arity(k + 1)};
        const Eigen::MatrixXd fa = a.features();
        const Eigen::MatrixXd fb = b.features();
        CHECK(fb.cols() == fa.cols() + 1);
        CHECK(fb.leftCols(fa.cols()) == fa);
    }
    CHECK_THROWS_AS(stage_from_arity(0), ConfigError);
    CHECK_THROWS_AS(stage_from_arity(6), ConfigError);
}

TEST_CASE("eval_metrics")
{
    SUBCASE("identity")
    {
        const std::vector<double> t{0.1, 0.4, 0.2, 0.9};
        const auto r = eval_metrics(t, t);
        CHECK(r.pearson_r == doctest::Approx(1.0));
        CHECK(r.rmse == 0.0);
        CHECK(r.mae == 0.0);
        CHECK(r.n == 4);
    }
    SUBCASE("anticorrelation")
    {
        const std::vector<double> t{-1.0, 0.5, 0.25, 0.25};
        std::vector<double> p(t.size());
        std::transform(t.begin(), t.end(), p.begin(), [](double v) { return -v; });
        CHECK(eval_metrics(p, t).pearson_r == doctest::Approx(-1.0));
    }
    SUBCASE("hand formula")
    {
        // R = 15 / sqrt(228); errors (-1, -2, -4)
        const std::vector<double> p{1, 2, 3};
        const std::vector<double> t{2, 4, 7};
        const auto r = eval_metrics(p, t);
        CHECK(r.pearson_r == doctest::Approx(0.9933992677987828).epsilon(1e-14));
        CHECK(r.rmse == doctest::Approx(2.6457513110645907).epsilon(1e-14));
        CHECK(r.mae == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("errors")
    {
        const std::vector<double> c{0.2, 0.2, 0.2};
        const std::vector<double> v{0.1, 0.2, 0.3};
        CHECK_THROWS_AS(eval_metrics(v, c), NumericalError);
        CHECK_THROWS_AS(eval_metrics(c, v), NumericalError);
        CHECK_THROWS_AS(eval_metrics(std::vector<double>{1.0}, std::vector<double>{1.0}), ConfigError);
        CHECK_THROWS_AS(eval_metrics(v, std::vector<double>{1.0, 2.0}), ConfigError);
    }
}

TEST_CASE("eval_metrics invariants on random data")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 50;
        std::vector<double> p(n), t(n), q(n);
        for (std::size_t k = 0; k < n; ++k) {
            t[k] = g(rng);
            p[k] = t[k] + g(rng);
        }
        const double a = std::exp(g(rng));
        const double b = 3.0 * g(rng);
        std::transform(p.begin(), p.end(), q.begin(), [&](double v) { return a * v + b; });
        const auto r = eval_metrics(p, t);
        CHECK(std::abs(r.pearson_r) <= 1.0);
        CHECK(r.rmse >= r.mae);
        CHECK(r.mae >= 0.0);
        CHECK(eval_metrics(q, t).pearson_r == doctest::Approx(r.pearson_r).epsilon(1e-12));
    }
}
