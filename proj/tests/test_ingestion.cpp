#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hdnn/ingestion.hpp"

using namespace hdnn;

namespace {

RawTable parse(const std::string& text, DelimitedOptions opts = {}) {
    std::istringstream in(text);
    return parse_delimited(in, opts);
}

RawTable blocks(std::size_t n0, std::size_t n1) {
    std::ostringstream s;
    for (std::size_t i = 0; i < n0 + n1; ++i) s << (i < n0 ? "a" : "b") << ',' << i << ',' << i * 2 << '\n';
    return parse(s.str());
}

}  // namespace

TEST_CASE("parse a small labelled file") {
    auto t = parse("1,0.5,2\n2,1.5,3\n1,0,0\n");
    CHECK(t.rows == Matrix::from_rows({{0.5, 2}, {1.5, 3}, {0, 0}}));
    CHECK(t.labels == std::vector<std::size_t>{0, 1, 0});
    CHECK(t.label_names == std::vector<std::string>{"1", "2"});
    CHECK(t.header.empty());
}

TEST_CASE("header, named label column and whitespace delimiters") {
    DelimitedOptions opts;
    opts.has_header = true;
    opts.label_column = std::string("cls");
    auto t = parse("x,cls,y\n1,dog,2\n3,cat,4\n", opts);
    CHECK(t.label_column == 1);
    CHECK(t.rows == Matrix::from_rows({{1, 2}, {3, 4}}));
    CHECK(t.label_names == std::vector<std::string>{"dog", "cat"});

    DelimitedOptions ws;
    ws.delimiter = ' ';
    auto u = parse("  1   0.5  2\n2\t1.5 3\n", ws);
    CHECK(u.rows == Matrix::from_rows({{0.5, 2}, {1.5, 3}}));

    opts.label_column = std::string("nope");
    CHECK_THROWS_AS(parse("x,cls,y\n1,dog,2\n", opts), ParseError);
}

TEST_CASE("malformed input reports the line") {
    try {
        parse("1,2,3\n1,2,3\n1,2\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse("1,2,3\n1,x,3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 2);
    }
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(load_delimited("/nonexistent/file.csv", {}), Error);
}

TEST_CASE("write then load round trip") {
    auto t = parse("b,0.25,1e-3\na,-2,3.5\nb,7,8\n");
    std::ostringstream out;
    write_delimited(out, t);
    auto path = std::filesystem::temp_directory_path() / "hdnn_roundtrip.csv";
    {
        std::ofstream f(path);
        f << out.str();
    }
    auto back = load_delimited(path, {});
    std::filesystem::remove(path);
    CHECK(back.rows == t.rows);
    CHECK(back.labels == t.labels);
    CHECK(back.label_names == t.label_names);
}

TEST_CASE("largest-remainder apportionment") {
    CHECK(apportion({5, 5}, 4) == std::vector<std::size_t>{2, 2});
    CHECK(apportion({5, 4}, 5) == std::vector<std::size_t>{3, 2});
    CHECK(apportion({1, 1, 1}, 2) == std::vector<std::size_t>{1, 1, 0});
    CHECK(apportion({3, 7}, 10) == std::vector<std::size_t>{3, 7});
    CHECK_THROWS_AS(apportion({2, 2}, 5), ParameterError);
    for (std::size_t total = 0; total <= 30; ++total) {
        auto a = apportion({7, 11, 12}, total);
        CHECK(a[0] + a[1] + a[2] == total);
    }
}

TEST_CASE("stratified split is a partition with apportioned counts") {
    auto t = blocks(12, 8);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = merge_and_split(t, std::nullopt, 10, seed);
        CHECK(s.train.size() == 10);
        CHECK(s.test.size() == 10);
        CHECK(s.train.class_counts() == std::vector<std::size_t>{6, 4});
        std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
        for (auto r : s.test_rows) CHECK(all.insert(r).second);
        CHECK(all.size() == 20);
        CHECK(std::is_sorted(s.train_rows.begin(), s.train_rows.end()));
        for (std::size_t k = 0; k < s.train_rows.size(); ++k) {
            CHECK(s.train.labels()[k] == t.labels[s.train_rows[k]]);
            auto a = s.train.points().row(k);
            auto b = t.rows.row(s.train_rows[k]);
            CHECK(std::equal(a.begin(), a.end(), b.begin()));
        }
    }
    auto a = merge_and_split(t, std::nullopt, 10, 3);
    auto b = merge_and_split(t, std::nullopt, 10, 3);
    CHECK(a.train_rows == b.train_rows);
    CHECK(a.train_rows != merge_and_split(t, std::nullopt, 10, 4).train_rows);

    std::ostringstream m1, m2;
    write_split_manifest(m1, a);
    write_split_manifest(m2, b);
    CHECK(m1.str() == m2.str());
    CHECK(m1.str().rfind("seed 3\nclass a train", 0) == 0);
}

TEST_CASE("merging a second table matches labels by name") {
    auto a = parse("x,1,1\ny,2,2\n");
    auto b = parse("y,3,3\nz,4,4\nx,5,5\n");
    auto m = merge_tables(a, b);
    CHECK(m.label_names == std::vector<std::string>{"x", "y", "z"});
    CHECK(m.labels == std::vector<std::size_t>{0, 1, 1, 2, 0});
    CHECK(m.rows.rows() == 5);
    CHECK_THROWS_AS(merge_tables(a, parse("x,1\n")), DimensionError);
}

TEST_CASE("splits that starve a class are rejected") {
    auto t = blocks(10, 3);
    CHECK_THROWS_AS(merge_and_split(t, std::nullopt, 3, 0), StratificationError);   // class b gets 1 training row
    CHECK_THROWS_AS(merge_and_split(t, std::nullopt, 12, 0), StratificationError);  // class b gets no test row
    CHECK_THROWS_AS(merge_and_split(t, std::nullopt, 13, 0), ParameterError);
    CHECK_NOTHROW(merge_and_split(t, std::nullopt, 8, 0));
}
