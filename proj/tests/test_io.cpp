#include <sstream>

#include "doctest.h"
#include "heilbronn/io.hpp"

using namespace heilbronn;

TEST_CASE("plc round trip is exact") {
    for (int d : {2, 3}) {
        auto X = random_configuration(50, d, 4);
        std::stringstream ss;
        write_plc(ss, X);
        auto Y = read_plc(ss);
        REQUIRE(Y.size() == X.size());
        CHECK(Y.dim == d);
        for (std::size_t i = 0; i < X.size(); ++i) {
            CHECK(Y.pairs[i].p.v == X.pairs[i].p.v);
            CHECK(Y.pairs[i].l.dir() == X.pairs[i].l.dir());
        }
        std::stringstream again;
        write_plc(again, Y);
        std::stringstream first;
        write_plc(first, X);
        CHECK(again.str() == first.str());
    }
}

TEST_CASE("pts and tubes round trip") {
    auto P = random_points(30, 3, 2);
    std::stringstream ss;
    write_pts(ss, P);
    auto Q = read_pts(ss);
    REQUIRE(Q.size() == P.size());
    for (std::size_t i = 0; i < P.size(); ++i) CHECK(Q[i].v == P[i].v);

    std::vector<Tube> T{Tube::make(2, {0.5, 0.5, 0}, {0.6, 0.8, 0}, 0.01), Tube::make(2, {0.1, 0.2, 0}, {1, 0, 0}, 0.02, 0.5)};
    std::stringstream st;
    write_tubes(st, T);
    CHECK(st.str().rfind("tubes v1 dim=2 n=2\nc 0.5 0.5 v ", 0) == 0);
    auto U = read_tubes(st);
    REQUIRE(U.size() == 2);
    CHECK(U[1].length == 0.5);
    CHECK(U[0].dir == T[0].dir);
}

TEST_CASE("violations carry line numbers") {
    std::string good = "plc v1 dim=2 n=2\np 0.5 0.5 q 0.5 0 v 0 1\np 0.25 0.5 q 0 0.5 v 1 0\n";
    std::stringstream g(good);
    CHECK(check_plc(g).empty());

    std::string off = "plc v1 dim=2 n=2\np 0.5 0.5 q 0.5 0 v 0 1\np 0.25 0.501 q 0 0.5 v 1 0\n";
    std::stringstream o(off);
    auto v = check_plc(o);
    REQUIRE(v.size() == 1);
    CHECK(v[0].line == 3);
    CHECK(v[0].message.find("away from its line") != std::string::npos);
    std::stringstream o2(off);
    CHECK_THROWS_WITH_AS(read_plc(o2, "x.plc"), doctest::Contains("x.plc:3:"), InvalidInput);

    std::string nonunit = "plc v1 dim=2 n=1\n# comment\np 0.5 0.5 q 0.5 0 v 0 1.01\n";
    std::stringstream n(nonunit);
    v = check_plc(n);
    REQUIRE(v.size() == 1);
    CHECK(v[0].line == 3);
    CHECK(v[0].message.find("unit") != std::string::npos);

    std::stringstream cnt("pts v1 dim=2 n=3\n0.1 0.2\n0.3 0.4\n");
    v = check_pts(cnt);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("announces 3") != std::string::npos);

    std::stringstream hdr("pts v2 dim=2 n=1\n0.1 0.2\n");
    v = check_pts(hdr);
    REQUIRE(v.size() == 1);
    CHECK(v[0].line == 1);

    std::stringstream bad("tubes v1 dim=2 n=2\nc 0 0 v 1 0 w 0.1 l 1\nc 0 0 v 1 0 w 2 l 1\n");
    v = check_tubes(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].line == 3);
}

TEST_CASE("csv table") {
    CsvTable t;
    t.comment("seed=0").column("w", "kernel scale").column("tag", "free text");
    t.row({CsvTable::cell(0.1), CsvTable::cell(std::string("a,\"b\""))});
    CHECK(t.str() == "# seed=0\n# w: kernel scale\n# tag: free text\nw,tag\n0.10000000000000001,\"a,\"\"b\"\"\"\n");
    CHECK_THROWS_AS(t.row({"1"}), InvalidInput);
    CHECK(fnv1a("") == 14695981039346656037ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
