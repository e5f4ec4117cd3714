#include "ngrid/csv.hpp"
#include "ngrid/errors.hpp"
#include "ngrid/metrics.hpp"
#include "ngrid/sor.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

using namespace ngrid;
using namespace ngrid::sor;
using doctest::Approx;

namespace {

std::vector<FeatureRow> one_feature(const std::vector<double>& xs) {
    std::vector<FeatureRow> rows;
    for (double x : xs) {
        FeatureRow r;
        r.feeder_id = "F1";
        r.numeric["x"] = x;
        r.label = x > 5.0 ? 1 : 0;
        rows.push_back(r);
    }
    return rows;
}

} // namespace

TEST_CASE("separable one-feature data trains to a perfect ranking") {
    std::vector<double> xs;
    for (int i = 0; i <= 20; ++i) xs.push_back(0.5 * i);
    const auto rows = one_feature(xs);
    const auto model = train(rows, {50, 0.1, 1});
    CHECK(evaluate(model, rows).roc_auc == 1.0);

    double max_neg = 0.0, min_pos = 1.0;
    for (const auto& r : rows) {
        const double p = score(model, r);
        if (*r.label == 1) min_pos = std::min(min_pos, p);
        else max_neg = std::max(max_neg, p);
    }
    CHECK(min_pos > max_neg);
}

TEST_CASE("zero stumps score the class prior") {
    const auto rows = one_feature({1, 2, 3, 6, 7, 8, 9, 10});
    const auto model = train(rows, {0, 0.1, 1});
    CHECK(model.stumps.empty());
    for (const auto& r : rows) CHECK(score(model, r) == Approx(5.0 / 8.0));
}

TEST_CASE("training preconditions") {
    auto rows = one_feature({1, 2, 3});
    CHECK_THROWS_AS(train(rows, {}), std::invalid_argument);
    rows = one_feature({6, 7});
    CHECK_THROWS_AS(train(rows, {}), std::invalid_argument);
    CHECK_THROWS_AS(train(one_feature({1}), {}), std::invalid_argument);
    rows = one_feature({1, 7});
    rows[0].label.reset();
    CHECK_THROWS_AS(train(rows, {}), std::invalid_argument);
    rows = one_feature({1, 7});
    rows[1].numeric.clear();
    rows[1].numeric["y"] = 3.0;
    CHECK_THROWS_AS(train(rows, {}), std::invalid_argument);
}

TEST_CASE("hand-built models score in closed form") {
    FeatureRow row;
    row.numeric["x"] = 7.0;
    BoostedModel empty;
    CHECK(score(empty, row) == 0.5);

    BoostedModel one;
    one.learning_rate = 1.0;
    one.stumps.push_back({"x", StumpKind::numeric, 5.0, {}, -2.0, 2.0});
    CHECK(score(one, row) == Approx(1.0 / (1.0 + std::exp(-2.0))));
    row.numeric["x"] = 4.0;
    CHECK(score(one, row) == Approx(1.0 / (1.0 + std::exp(2.0))));

    FeatureRow missing;
    CHECK_THROWS_AS(score(one, missing), std::invalid_argument);
}

TEST_CASE("categorical stumps send unseen levels right") {
    Stump s{"zone", StumpKind::categorical, 0.0, {"north"}, 1.0, -1.0};
    FeatureRow r;
    r.categorical["zone"] = "north";
    CHECK(s.output(r) == 1.0);
    r.categorical["zone"] = "west";
    CHECK(s.output(r) == -1.0);
}

TEST_CASE("categorical signal is learned") {
    std::vector<FeatureRow> rows;
    for (int i = 0; i < 40; ++i) {
        FeatureRow r;
        r.categorical["soil"] = i % 2 ? "clay" : "sand";
        r.numeric["noise"] = (i * 37 % 11);
        r.label = i % 2;
        rows.push_back(r);
    }
    const auto model = train(rows, {5, 0.5, 1});
    REQUIRE_FALSE(model.stumps.empty());
    CHECK(model.stumps[0].feature == "soil");
    CHECK(evaluate(model, rows).roc_auc == 1.0);
}

TEST_CASE("stage loss is non-increasing and training is deterministic") {
    sim::Rng rng(5);
    const auto rows = fixture::separable_rows(rng, 300, 0.1);
    std::vector<double> loss;
    const auto a = train(rows, {}, &loss);
    REQUIRE(loss.size() == a.stumps.size() + 1);
    for (std::size_t i = 1; i < loss.size(); ++i) CHECK(loss[i] <= loss[i - 1]);
    const auto b = train(rows, {});
    CHECK(model_to_text(a) == model_to_text(b));
}

TEST_CASE("model text round trip preserves scores exactly") {
    sim::Rng rng(8);
    const auto rows = fixture::separable_rows(rng, 120);
    const auto model = train(rows, {30, 0.2, 3});
    const auto back = model_from_text(model_to_text(model));
    for (const auto& r : rows) CHECK(score(back, r) == score(model, r));
    CHECK_THROWS_AS(model_from_text("{\"format\": \"other\"}"), ValidationError);
    CHECK_THROWS_AS(model_from_text("not json"), ValidationError);
}

TEST_CASE("feature CSV parsing") {
    const auto rows = parse_feature_csv("feeder_id,hour,label,gust,cat:soil\nF1,0,1,3.5,clay\nF1,1,,2.0,sand\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].label == 1);
    CHECK_FALSE(rows[1].label.has_value());
    CHECK(rows[0].numeric.at("gust") == 3.5);
    CHECK(rows[1].categorical.at("soil") == "sand");
    CHECK_THROWS_AS(parse_feature_csv("feeder_id,hour,gust\nF1,0,abc\n"), ValidationError);
    CHECK_THROWS_AS(parse_feature_csv("feeder_id,hour,label,gust\nF1,0,2,1.0\n"), ValidationError);
}

TEST_CASE("SoR table from entries") {
    const std::vector<std::string> ids = {"F1", "F2"};
    std::vector<SorEntry> entries;
    for (const auto& id : ids)
        for (int h = 0; h < 3; ++h) entries.push_back({id, h, 0.1 * h});
    const auto t = sor_table_from_entries(entries, ids, 3);
    CHECK(t.at("F2", 2) == Approx(0.2));
    CHECK(t.at(0, 1) == Approx(0.1));

    auto gap = entries;
    gap.erase(gap.begin() + 4);
    try {
        sor_table_from_entries(gap, ids, 3);
        FAIL("expected a completeness error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("(F2, 1)") != std::string::npos);
    }
    auto dup = entries;
    dup.push_back({"F1", 0, 0.5});
    CHECK_THROWS_AS(sor_table_from_entries(dup, ids, 3), ValidationError);
    auto range = entries;
    range[0].probability = 1.3;
    CHECK_THROWS_AS(sor_table_from_entries(range, ids, 3), ValidationError);
    auto unknown = entries;
    unknown[0].feeder_id = "F9";
    CHECK_THROWS_AS(sor_table_from_entries(unknown, ids, 3), ValidationError);
}

TEST_CASE("SoR table CSV round trip with inferred shape") {
    SorTable t({"F1", "F2"}, 24);
    for (int h = 0; h < 24; ++h) t.set(1, h, h / 100.0);
    const auto path = std::filesystem::temp_directory_path() / "ngrid_sor_roundtrip.csv";
    csv::write_file(path.string(), sor_table_to_csv(t));
    const auto back = load_sor_table(path.string());
    CHECK(back.feeder_ids() == t.feeder_ids());
    CHECK(back.horizon() == 24);
    CHECK(back.at("F2", 23) == Approx(0.23));
    CHECK(back.at("F1", 5) == 0.0);
    CHECK_THROWS(t.set(0, 0, 1.5));
    std::filesystem::remove(path);
}

TEST_CASE("build_sor_table scores every feeder-hour") {
    sim::Rng rng(3);
    auto rows = fixture::separable_rows(rng, 100);
    const auto model = train(rows, {20, 0.2, 2});
    std::vector<FeatureRow> grid;
    for (const char* f : {"A", "B"}) {
        for (int h = 0; h < 4; ++h) {
            FeatureRow r = rows[static_cast<std::size_t>(h)];
            r.feeder_id = f;
            r.hour = h;
            grid.push_back(r);
        }
    }
    const auto table = build_sor_table(model, grid, {"A", "B"}, 4);
    CHECK(table.at("B", 3) == Approx(score(model, grid[7])));
    grid.pop_back();
    CHECK_THROWS_AS(build_sor_table(model, grid, {"A", "B"}, 4), ValidationError);
}
