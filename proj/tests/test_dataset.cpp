#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "frozen_oracles.hpp"
#include "ramplab/dataset.hpp"
#include "ramplab/errors.hpp"

using namespace ramplab;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& name, const std::string& body) : path(name) {
        std::ofstream f(path);
        f << body;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

Dataset tiny_dataset() {
    return make_dataset({"x1", "x2"},
                        {{0.75, -2.53, 1.55, 0.32, 2.07, 1.06},
                         {0.0, 0.0, 1.0, 1.0, 0.0, 1.0}},
                        {0.0, 1.0, 0.0, 1.0, 1.0, 0.0});
}

bool raises(ErrorCode want, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == want;
    }
    return false;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("csv loading keeps complete cases in order") {
    TempCsv f("ds_basic.csv",
              "y,a,b\n"
              "0,1.5,2\n"
              "1,-0.5,3\n"
              ",9.9,9\n"      // missing outcome -> dropped
              "1,2.5,\n"      // missing regressor -> dropped
              "0,0.25,7\n");
    const Dataset d = load_csv(f.path, "y", {"a", "b"});
    REQUIRE(d.n() == 3);
    CHECK(d.n_dropped == 2);
    CHECK(d.y == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(d.column("a") == std::vector<double>{1.5, -0.5, 0.25});
    CHECK(d.column("b") == std::vector<double>{2.0, 3.0, 7.0});
}

TEST_CASE("csv errors carry the right codes") {
    TempCsv f("ds_err.csv", "y,a\n0,1\n1,2\n");
    CHECK(raises(ErrorCode::MissingColumn,
                 [&] { load_csv(f.path, "nope", {"a"}); }));
    CHECK(raises(ErrorCode::MissingColumn,
                 [&] { load_csv(f.path, "y", {"zz"}); }));
    CHECK(raises(ErrorCode::IoError,
                 [] { load_csv("does_not_exist.csv", "y", {"a"}); }));

    TempCsv g("ds_nonbin.csv", "y,a\n2,1\n0,2\n");
    CHECK(raises(ErrorCode::NonBinaryOutcome,
                 [&] { load_csv(g.path, "y", {"a"}); }));

    TempCsv h("ds_empty.csv", "y,a\n,1\n0,\n");
    CHECK(raises(ErrorCode::EmptyAfterCompleteCase,
                 [&] { load_csv(h.path, "y", {"a"}); }));

    TempCsv j("ds_badnum.csv", "y,a\n0,xyz\n");
    CHECK(raises(ErrorCode::IoError, [&] { load_csv(j.path, "y", {"a"}); }));
}

TEST_CASE("in-memory dataset construction validates shapes") {
    CHECK(raises(ErrorCode::NonBinaryOutcome, [] {
        make_dataset({"x"}, {{1.0, 2.0}}, {0.0, 0.5});
    }));
    CHECK(raises(ErrorCode::DimensionMismatch, [] {
        make_dataset({"x"}, {{1.0, 2.0, 3.0}}, {0.0, 1.0});
    }));
    CHECK(raises(ErrorCode::UnknownColumn, [] {
        tiny_dataset().column("nope");
    }));
    CHECK(tiny_dataset().has_column("x1"));
    CHECK_FALSE(tiny_dataset().has_column("q"));
}

TEST_CASE("plain design has intercept first and tagged kinds") {
    DesignSpec spec;
    spec.regressors = {"x1", "x2"};
    const DesignMatrix d = build_design(tiny_dataset(), spec);
    REQUIRE(d.k() == 3);
    REQUIRE(d.n() == 6);
    CHECK(d.cols[0].kind == ColumnKind::Intercept);
    CHECK(d.cols[1].kind == ColumnKind::Continuous);
    CHECK(d.cols[2].kind == ColumnKind::Binary);
    for (int i = 0; i < 6; ++i) CHECK(d.X(i, 0) == 1.0);
    CHECK(d.X(2, 1) == 1.55);
    CHECK(d.column_index("x2") == 2);
    CHECK(d.column_index("zz") == -1);
}

TEST_CASE("interaction columns multiply their parents") {
    DesignSpec spec;
    spec.regressors = {"x1", "x2"};
    spec.interactions = {{"x1", "x2"}};
    const DesignMatrix d = build_design(tiny_dataset(), spec);
    REQUIRE(d.k() == 4);
    CHECK(d.cols[3].kind == ColumnKind::Interaction);
    CHECK(d.cols[3].name == "x1:x2");
    CHECK(d.cols[3].parent_a == 1);
    CHECK(d.cols[3].parent_b == 2);
    for (int i = 0; i < 6; ++i) CHECK(d.X(i, 3) == d.X(i, 1) * d.X(i, 2));
}

TEST_CASE("full interaction layout is [1, z, w, w*z]") {
    Dataset ds = make_dataset(
        {"z1", "z2", "w"},
        {{0.5, -1.0, 2.0, 0.7, -0.2, 1.1, 1.3, -0.6},
         {1.0, 3.0, -2.0, 0.4, 2.2, -0.9, 0.8, 1.7},
         {1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0}},
        {1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0});
    DesignSpec spec;
    spec.regressors = {"z1", "z2", "w"};
    spec.full_interactions_with = "w";
    const DesignMatrix d = build_design(ds, spec);
    REQUIRE(d.k() == 6);  // 1, z1, z2, w, w:z1, w:z2
    REQUIRE(d.n() == 8);
    CHECK(d.cols[1].name == "z1");
    CHECK(d.cols[2].name == "z2");
    CHECK(d.cols[3].name == "w");
    CHECK(d.cols[3].kind == ColumnKind::Binary);
    CHECK(d.cols[4].name == "z1:w");
    CHECK(d.cols[5].name == "z2:w");
    CHECK(d.cols[4].kind == ColumnKind::Interaction);
    // parents point at the z column and the w column
    CHECK(d.cols[4].parent_a == 1);
    CHECK(d.cols[4].parent_b == 3);
    for (int i = 0; i < 8; ++i) {
        CHECK(d.X(i, 4) == d.X(i, 3) * d.X(i, 1));
        CHECK(d.X(i, 5) == d.X(i, 3) * d.X(i, 2));
    }

    DesignSpec bad;
    bad.regressors = {"z1", "z2", "w"};
    bad.full_interactions_with = "z1";
    CHECK(raises(ErrorCode::NotBinary, [&] { build_design(ds, bad); }));
}

TEST_CASE("exact collinearity is rejected with a culprit name") {
    Dataset ds = make_dataset({"a", "b"},
                              {{1.0, 2.0, 3.0, 4.0},
                               {2.0, 4.0, 6.0, 8.0}},  // b = 2a
                              {0.0, 1.0, 0.0, 1.0});
    DesignSpec spec;
    spec.regressors = {"a", "b"};
    try {
        build_design(ds, spec);
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
        // either member of the collinear pair is a valid culprit
        const std::string msg = e.what();
        const bool named = msg.find("dependent column: a") != std::string::npos ||
                           msg.find("dependent column: b") != std::string::npos;
        CHECK_MESSAGE(named, msg);
    }
}

TEST_CASE("design construction is deterministic") {
    DesignSpec spec;
    spec.regressors = {"x1", "x2"};
    spec.interactions = {{"x1", "x2"}};
    const DesignMatrix d1 = build_design(tiny_dataset(), spec);
    const DesignMatrix d2 = build_design(tiny_dataset(), spec);
    CHECK(d1.X == d2.X);
    CHECK(d1.y == d2.y);
}

TEST_CASE("validation reports column moments and the rank check") {
    std::vector<double> col(std::begin(frozen::kMomentsData),
                            std::end(frozen::kMomentsData));
    std::vector<double> other = {0.1, 0.9, 0.3, 0.7, 0.5, 0.2, 0.8, 0.4, 0.6, 0.55};
    std::vector<double> y = {0, 1, 0, 1, 0, 1, 1, 0, 1, 0};
    Dataset ds = make_dataset({"v", "o"}, {col, other}, y);
    DesignSpec spec;
    spec.regressors = {"v", "o"};
    const DesignMatrix d = build_design(ds, spec);
    const ValidationReport rep = validate(d);
    REQUIRE(rep.columns.size() == 3);
    CHECK(rep.rank_ok);
    CHECK(rep.sv_ratio > 1e-10);
    // intercept column is degenerate by construction
    CHECK(rep.columns[0].m.degenerate);
    CHECK(rep.columns[0].m.mean == 1.0);
    const auto& mv = rep.columns[1].m;
    CHECK(mv.mean == doctest::Approx(frozen::kMomentsMean).epsilon(1e-12));
    CHECK(mv.sd == doctest::Approx(frozen::kMomentsSd).epsilon(1e-12));
    CHECK(mv.skewness == doctest::Approx(frozen::kMomentsSkew).epsilon(1e-11));
    CHECK(mv.kurtosis == doctest::Approx(frozen::kMomentsKurt).epsilon(1e-11));
}

}  // TEST_SUITE
