#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "gmtlab/lattice.hpp"
#include "gmtlab/zoo.hpp"

using namespace gmtlab;

namespace {

CubeAddress cube(int level, std::initializer_list<std::int64_t> c) {
    CubeAddress q;
    q.level = level;
    q.dim = static_cast<int>(c.size());
    int k = 0;
    for (auto v : c) q.coords[k++] = v;
    return q;
}

// Point-in-3Q by direct coordinate comparison against the box corners.
bool in_triple_box(const DyadicLattice& L, const CubeAddress& q, const double* x) {
    for (int k = 0; k < L.dim(); ++k) {
        const double lo = std::ldexp(static_cast<double>(q.coords[k] - 1), q.level);
        const double hi = std::ldexp(static_cast<double>(q.coords[k] + 2), q.level);
        const double y = x[k] - L.offset()[k];
        if (!(y >= lo && y < hi)) return false;
    }
    return true;
}

}  // namespace

TEST(Lattice, CubeOfPoint) {
    DyadicLattice L(2, {0, 0}, -4, 2);
    const double x[2] = {0.3, 0.7};
    EXPECT_EQ(L.cube_of_point(x, 0), cube(0, {0, 0}));
    EXPECT_EQ(L.cube_of_point(x, -2), cube(-2, {1, 2}));
    DyadicLattice shifted(2, {0.5, 0}, -4, 2);
    EXPECT_EQ(shifted.cube_of_point(x, 0), cube(0, {-1, 0}));
    const double face[2] = {0.5, 0.25};
    EXPECT_EQ(L.cube_of_point(face, -1), cube(-1, {1, 0}));
    EXPECT_THROW(L.cube_of_point(x, 3), InvalidArgument);
}

TEST(Lattice, ParentAndOrdering) {
    EXPECT_EQ(cube(0, {-3, 5}).parent(), cube(1, {-2, 2}));
    EXPECT_TRUE(cube(0, {0, 0}) < cube(1, {-5, -5}));
    EXPECT_FALSE(cube(0, {0, 0}) == cube(0, {0, 1}));
}

TEST(Lattice, NeighborDegrees) {
    DyadicLattice L(2, {}, -3, 3);
    EXPECT_EQ(L.neighbors(cube(0, {0, 0})).size(), 9u);
    EXPECT_EQ(L.neighbors(cube(3, {0, 0})).size(), 8u);
    EXPECT_EQ(L.neighbors(cube(-3, {0, 0})).size(), 5u);
    std::mt19937_64 rng(1);
    for (int d = 1; d <= kMaxLatticeDim; ++d) {
        DyadicLattice W(d, {}, -2, 2);
        std::uniform_int_distribution<int> lev(-2, 2), co(-20, 20);
        for (int t = 0; t < 200; ++t) {
            CubeAddress q;
            q.dim = d;
            q.level = lev(rng);
            for (int k = 0; k < d; ++k) q.coords[k] = co(rng);
            const auto n = W.neighbors(q);
            EXPECT_LE(n.size(), static_cast<std::size_t>((1 << d) + 2 * d + 1));
            std::set<CubeAddress> uniq(n.begin(), n.end());
            EXPECT_EQ(uniq.size(), n.size());
        }
    }
}

TEST(Lattice, GraphDistanceExamples) {
    DyadicLattice L(2, {}, -3, 3);
    const auto q = cube(0, {0, 0});
    EXPECT_EQ(L.graph_distance(q, q, 5), 0);
    EXPECT_EQ(L.graph_distance(q, q.parent(), 5), 1);
    EXPECT_EQ(L.graph_distance(q, cube(0, {1, 1}), 5), 2);
    EXPECT_EQ(L.graph_distance(q, cube(0, {40, 0}), 3), std::nullopt);
    EXPECT_EQ(L.distance(q, cube(0, {1, 1})), 2);
}

TEST(Lattice, ClosedFormMatchesBfs) {
    std::mt19937_64 rng(2);
    for (int d = 1; d <= 3; ++d) {
        DyadicLattice L(d, {}, -3, 1);
        std::uniform_int_distribution<int> lev(-3, 1), co(-6, 6);
        for (int t = 0; t < 150; ++t) {
            CubeAddress a, b;
            a.dim = b.dim = d;
            a.level = lev(rng);
            b.level = lev(rng);
            for (int k = 0; k < d; ++k) {
                a.coords[k] = co(rng) >> (a.level + 3) % 3;
                b.coords[k] = co(rng) >> (b.level + 3) % 3;
            }
            const int closed = L.distance(a, b);
            const int cutoff = d == 3 ? 5 : 8;
            const auto bfs = L.graph_distance(a, b, cutoff);
            if (bfs) {
                EXPECT_EQ(closed, *bfs) << to_string(a) << " " << to_string(b);
            } else {
                EXPECT_GT(closed, cutoff);
            }
        }
    }
}

TEST(Lattice, DistanceIsAMetric) {
    std::mt19937_64 rng(4);
    DyadicLattice L(2, {}, -4, 2);
    std::uniform_int_distribution<int> lev(-4, 2), co(-10, 10);
    auto rnd = [&] {
        CubeAddress q;
        q.dim = 2;
        q.level = lev(rng);
        q.coords[0] = co(rng);
        q.coords[1] = co(rng);
        return q;
    };
    for (int t = 0; t < 2000; ++t) {
        const auto a = rnd(), b = rnd(), c = rnd();
        EXPECT_EQ(L.distance(a, b), L.distance(b, a));
        EXPECT_LE(L.distance(a, c), L.distance(a, b) + L.distance(b, c));
        EXPECT_EQ(L.distance(a, a), 0);
    }
}

TEST(Density, Examples) {
    DyadicLattice L(2, {}, -6, 2);
    DiscreteMeasure atom(2, {0.5, 0.5}, {1.0});
    auto r = density(atom, L, cube(0, {0, 0}), 1.7);
    EXPECT_EQ(r.mass, 1.0);
    EXPECT_EQ(r.density, 1.0);
    r = density(atom, L, cube(0, {3, 0}), 1.0);
    EXPECT_EQ(r.mass, 0.0);
    EXPECT_EQ(r.density, 0.0);
    const auto cantor = cantor_measure(2, 0.25, 5);
    r = density(cantor, L, cube(0, {0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(r.mass, 1.0);
    EXPECT_DOUBLE_EQ(r.density, 1.0);
}

TEST(PopulatedCubes, MatchesBruteForce) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.0, 1.0);
    std::vector<double> c(2 * 400), m(400);
    for (double& x : c) x = u(rng);
    for (double& x : m) x = w(rng);
    DiscreteMeasure mu(2, c, m);
    DyadicLattice L(2, {0.013, -0.021}, -5, 1);
    const auto table = populated_cubes(mu, L, 1.3);
    std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
    for (int t = 0; t < 100; ++t) {
        const std::size_t i = pick(rng);
        const auto& q = table.cube(i);
        CompensatedSum acc;
        for (std::size_t j = 0; j < mu.size(); ++j)
            if (in_triple_box(L, q, mu.point(j))) acc.add(mu.weight(j));
        EXPECT_EQ(table.value(i).mass, acc.value());
        EXPECT_EQ(table.value(i).mass, density(mu, L, q, 1.3).mass);
        EXPECT_EQ(table.value(i).density, table.value(i).mass / std::exp2(q.level * 1.3));
    }
    // Every cube with positive triple mass is present.
    std::size_t expected = 0;
    for (int k = L.k_min(); k <= L.k_max(); ++k) {
        std::set<CubeAddress> seen;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const auto base = L.cube_of_point(mu.point(j), k);
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy) {
                    auto q = base;
                    q.coords[0] += dx;
                    q.coords[1] += dy;
                    if (density(mu, L, q, 1.3).mass > 0) seen.insert(q);
                }
        }
        expected += seen.size();
    }
    EXPECT_EQ(table.size(), expected);
}

TEST(PopulatedCubes, SingleAtomAndEmpty) {
    DyadicLattice L(2, {}, -4, 3);
    DiscreteMeasure atom(2, {0.3, 0.6}, {1.0});
    const auto t = populated_cubes(atom, L, 1.0);
    EXPECT_EQ(t.size(), 8u * 9u);
    std::map<int, int> per_level;
    for (const auto& q : t.cubes()) per_level[q.level]++;
    for (const auto& [k, n] : per_level) EXPECT_EQ(n, 9);
    EXPECT_TRUE(populated_cubes(DiscreteMeasure(2, {0.3, 0.6}, {0.0}), L, 1.0).empty());
    EXPECT_TRUE(populated_cubes(DiscreteMeasure(2, {}, {}), L, 1.0).empty());
}

TEST(PopulatedCubes, TwoAtomsAtTopLevel) {
    DyadicLattice L(1, {}, -2, 2);
    DiscreteMeasure mu(1, {0.5, 4.5}, {1.0, 1.0});
    const auto t = populated_cubes(mu, L, 1.0);
    // At level 2 the atoms sit in cubes 0 and 1, whose triples overlap on cubes 0 and 1.
    int both = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.cube(i).level == 2 && t.value(i).mass == 2.0) ++both;
    EXPECT_EQ(both, 2);
}

TEST(PopulatedCubes, CapRaises) {
    const auto mu = cantor_measure(2, 0.25, 4);
    DyadicLattice L(2, {}, -10, 0);
    EXPECT_THROW(populated_cubes(mu, L, 1.0, 100), ResourceLimit);
}

TEST(PopulatedCubes, DensityScalingInvariance) {
    const auto mu = cantor_measure(2, 0.25, 4);
    DyadicLattice L(2, {0.01, 0.02}, -9, 1);
    const int e = 3;
    const double lambda = std::ldexp(1.0, e), s = 1.0;
    const auto a = populated_cubes(mu, L, s);
    const auto b = populated_cubes(mu.scaled(lambda, std::pow(lambda, s)), L.rescaled(e), s);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.cube(i).coords, b.cube(i).coords);
        EXPECT_EQ(a.value(i).density, b.value(i).density);
    }
}

TEST(PopulatedCubes, WithinRadiusMatchesScan) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> c(2 * 60);
    for (double& x : c) x = u(rng);
    DiscreteMeasure mu(2, c, std::vector<double>(60, 1.0));
    DyadicLattice L(2, {}, -5, 1);
    const auto t = populated_cubes(mu, L, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, t.size() - 1);
    for (int trial = 0; trial < 40; ++trial) {
        const auto& q = t.cube(pick(rng));
        for (int R : {0, 1, 3, 5}) {
            std::map<std::size_t, int> got;
            t.for_each_within(q, R, [&](std::size_t i, int d) { EXPECT_TRUE(got.emplace(i, d).second); });
            std::map<std::size_t, int> want;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const int d = L.distance(q, t.cube(i));
                if (d <= R) want.emplace(i, d);
            }
            EXPECT_EQ(got, want);
        }
    }
}

TEST(PopulatedCubes, Csv) {
    DyadicLattice L(1, {}, 0, 0);
    const auto t = populated_cubes(DiscreteMeasure(1, {0.5}, {2.0}), L, 1.0);
    const std::string csv = t.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,c0,mass_3Q,density");
    EXPECT_NE(csv.find("0,-1,2,2\n"), std::string::npos);
}
