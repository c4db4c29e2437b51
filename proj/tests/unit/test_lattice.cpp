#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "qcawalk/errors.hpp"
#include "qcawalk/lattice.hpp"

using namespace qcaw;

namespace {

// Every tessellation is a perfect matching and together they cover each edge once.
void check_tessellations(const Lattice& lat) {
  const auto tess = build_tessellations(lat);
  std::multiset<VertexPair> seen;
  for (const auto& t : tess) {
    std::set<int> used;
    for (const auto& [a, b] : t.pairs) {
      EXPECT_TRUE(lat.are_neighbors(a, b)) << t.label << " " << a << "," << b;
      EXPECT_TRUE(used.insert(a).second);
      EXPECT_TRUE(used.insert(b).second);
      seen.insert({std::min(a, b), std::max(a, b)});
    }
    EXPECT_EQ(static_cast<int>(used.size()), lat.vertex_count()) << t.label;
  }
  const auto edges = lat.edges();
  EXPECT_EQ(seen.size(), edges.size());
  for (const auto& e : edges) EXPECT_EQ(seen.count(e), 1u);
}

}  // namespace

TEST(Lattice, CycleTessellationsAsDefined) {
  const auto t = build_cycle_tessellations(8);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].pairs, (std::vector<VertexPair>{{0, 1}, {2, 3}, {4, 5}, {6, 7}}));
  EXPECT_EQ(t[1].pairs, (std::vector<VertexPair>{{1, 2}, {3, 4}, {5, 6}, {7, 0}}));
}

TEST(Lattice, TorusLayerOrderAndContent) {
  const auto lat = Lattice::torus(4);
  const auto t = build_torus_tessellations(4);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0].label, "T00");
  EXPECT_EQ(t[3].label, "T11");
  // T00: horizontal even pairs; T11: vertical odd wrapping pairs
  EXPECT_EQ(t[0].pairs.front(), (VertexPair{lat.vertex_id(0, 0), lat.vertex_id(1, 0)}));
  EXPECT_NE(std::find(t[3].pairs.begin(), t[3].pairs.end(),
                      VertexPair{lat.vertex_id(0, 3), lat.vertex_id(0, 0)}),
            t[3].pairs.end());
  EXPECT_NE(std::find(t[2].pairs.begin(), t[2].pairs.end(),
                      VertexPair{lat.vertex_id(3, 1), lat.vertex_id(0, 1)}),
            t[2].pairs.end());
}

TEST(Lattice, PerfectMatchingsCoverEdges) {
  for (int n : {4, 6, 8, 10, 16}) check_tessellations(Lattice::cycle(n));
  for (int n : {4, 6}) check_tessellations(Lattice::torus(n));
}

TEST(Lattice, EdgeCounts) {
  EXPECT_EQ(Lattice::cycle(8).edges().size(), 8u);
  EXPECT_EQ(Lattice::torus(4).edges().size(), 32u);
}

TEST(Lattice, CoordinatesAndNeighbours) {
  const auto lat = Lattice::torus(4);
  EXPECT_EQ(lat.vertex_id(3, 0), 3);
  EXPECT_EQ(lat.coords(13), (std::pair<int, int>{1, 3}));
  EXPECT_EQ(lat.next_along_x(3), 0);
  EXPECT_TRUE(lat.are_neighbors(0, 12));
  EXPECT_FALSE(lat.are_neighbors(0, 5));
  EXPECT_EQ(Lattice::cycle(8).next_along_x(7), 0);
  EXPECT_EQ(lat.name(), "4x4-torus");
}

TEST(Lattice, RejectsBadSizes) {
  EXPECT_THROW(Lattice::cycle(5), DomainError);
  EXPECT_THROW(Lattice::cycle(2), DomainError);
  EXPECT_THROW(Lattice::torus(3), DomainError);
  EXPECT_THROW(Lattice::cycle(4).vertex_id(0, 1), DomainError);
}
