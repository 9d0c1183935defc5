#include <goafem/mesh.hpp>

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace goafem;

namespace {

std::set<long long> angle_classes(const Mesh &m)
{
  std::set<long long> out;
  for (Index c = 0; c < m.n_cells(); ++c)
  {
    const Cell &t = m.cell(c);
    for (int k = 0; k < 3; ++k)
    {
      const Point &p = m.vertex(t[k]);
      const Vec2 a = m.vertex(t[(k + 1) % 3]) - p;
      const Vec2 b = m.vertex(t[(k + 2) % 3]) - p;
      const double ang = std::acos(dot(a, b) / std::sqrt(dot(a, a) * dot(b, b)));
      out.insert(std::llround(ang * 1e9));
    }
  }
  return out;
}

void check_children_partition(const Mesh &coarse, const Mesh &fine, const RefinementRelation &rel)
{
  std::vector<double> area(coarse.n_cells(), 0.0);
  for (Index c = 0; c < fine.n_cells(); ++c)
    area[rel.parent_of[c]] += fine.measure(c);
  for (Index c = 0; c < coarse.n_cells(); ++c)
    CHECK(std::abs(area[c] - coarse.measure(c)) <= 1e-12 * coarse.measure(c));
}

} // namespace

TEST_SUITE("mesh")
{
  TEST_CASE("initial 1D meshes")
  {
    const Mesh m = initial_mesh_1d(0.0, 1.0, 5);
    CHECK(m.dim() == 1);
    CHECK(m.n_cells() == 5);
    CHECK(m.n_vertices() == 6);
    for (Index c = 0; c < 5; ++c)
      CHECK(m.measure(c) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(check_mesh(m).empty());
    CHECK(m.boundary_facets().size() == 2);

    const Mesh one = initial_mesh_1d(0.0, 1.0, 1);
    CHECK(one.n_cells() == 1);
    CHECK(one.measure(0) == 1.0);

    const Mesh sym = initial_mesh_1d(-1.0, 1.0, 4);
    std::vector<double> xs;
    for (const Point &p : sym.vertices())
      xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    const std::vector<double> want{-1.0, -0.5, 0.0, 0.5, 1.0};
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(xs[i] == doctest::Approx(want[i]).epsilon(1e-15));

    CHECK_THROWS_AS(initial_mesh_1d(1.0, 1.0, 3), InvalidArgument);
    CHECK_THROWS_AS(initial_mesh_1d(0.0, 1.0, 0), InvalidArgument);
  }

  TEST_CASE("unit square")
  {
    const Mesh m = initial_mesh_unit_square();
    CHECK(m.n_vertices() == 4);
    CHECK(m.n_cells() == 2);
    CHECK(m.boundary_facets().size() == 4);
    for (Index c = 0; c < 2; ++c)
    {
      CHECK(m.measure(c) == doctest::Approx(0.5));
      // Reference edge (local 0-1) is the diagonal.
      const Point &a = m.vertex(m.cell(c)[0]);
      const Point &b = m.vertex(m.cell(c)[1]);
      CHECK(a[0] == a[1]);
      CHECK(b[0] == b[1]);
    }
    CHECK(check_mesh(m).empty());
    CHECK(mesh_quality(m).min_angle == doctest::Approx(std::numbers::pi / 4));
  }

  TEST_CASE("1D bisection of one interval")
  {
    const Mesh m = initial_mesh_1d(0.0, 1.0, 5);
    const std::vector<Index> marked{2};
    const auto [fine, rel] = refine(m, marked);
    CHECK(fine.n_cells() == 6);
    CHECK(rel.refined_set == std::vector<Index>{2});
    std::multiset<std::pair<double, double>> cells;
    for (Index c = 0; c < fine.n_cells(); ++c)
    {
      const double a = fine.vertex(fine.cell(c)[0])[0];
      const double b = fine.vertex(fine.cell(c)[1])[0];
      cells.insert({std::round(a * 1e12) / 1e12, std::round(b * 1e12) / 1e12});
    }
    CHECK(cells.count({0.4, 0.5}) == 1);
    CHECK(cells.count({0.5, 0.6}) == 1);
    CHECK(cells.count({0.4, 0.6}) == 0);
    check_children_partition(m, fine, rel);
    CHECK(check_mesh(fine).empty());
  }

  TEST_CASE("empty marking leaves the mesh unchanged")
  {
    for (const Mesh &m : {initial_mesh_1d(0.0, 1.0, 5), initial_mesh_unit_square()})
    {
      const auto [fine, rel] = refine(m, {});
      CHECK(fine.n_cells() == m.n_cells());
      CHECK(fine.vertices() == m.vertices());
      CHECK(fine.cells() == m.cells());
      CHECK(rel.refined_set.empty());
    }
  }

  TEST_CASE("closure example: marking one triangle of the square")
  {
    const Mesh m = initial_mesh_unit_square();
    const std::vector<Index> marked{0};
    const auto [fine, rel] = refine(m, marked);
    // Bisecting cell 0 hangs a node on the diagonal; closure bisects cell 1.
    CHECK(fine.n_cells() == 4);
    CHECK(rel.refined_set == std::vector<Index>{0, 1});
    CHECK(fine.n_vertices() == 5);
    CHECK(fine.vertex(4)[0] == 0.5);
    CHECK(fine.vertex(4)[1] == 0.5);
    CHECK(check_mesh(fine).empty());
    check_children_partition(m, fine, rel);
  }

  TEST_CASE("uniform refinement counts")
  {
    const Mesh m1 = initial_mesh_1d(0.0, 1.0, 5);
    CHECK(uniform_refine(m1).first.n_cells() == 10);

    const Mesh sq = initial_mesh_unit_square();
    const Mesh once = uniform_refine(sq).first;
    CHECK(once.n_cells() == 4);
    // One bisection per element per call: 2 -> 4 -> 8.
    CHECK(uniform_refine(once).first.n_cells() == 8);
    CHECK(testutil::refined_uniformly(sq, 4).n_cells() == 32);
  }

  TEST_CASE("out of range marks are rejected")
  {
    const Mesh m = initial_mesh_unit_square();
    const std::vector<Index> bad{2};
    CHECK_THROWS_AS(refine(m, bad), InvalidArgument);
  }

  TEST_CASE("random refinements stay conforming and nested")
  {
    std::mt19937 rng(11);
    Mesh m = initial_mesh_unit_square();
    for (int step = 0; step < 14; ++step)
    {
      const auto marked = testutil::random_marks(m, rng, 0.2);
      const auto [fine, rel] = refine(m, marked);
      INFO("step " << step);
      CHECK(check_mesh(fine).empty());
      for (Index c : marked)
        CHECK(rel.is_refined(c));
      CHECK(std::is_sorted(rel.refined_set.begin(), rel.refined_set.end()));
      CHECK(rel.coarse_mesh_id == m.id());
      CHECK(rel.fine_mesh_id == fine.id());
      check_children_partition(m, fine, rel);
      CHECK(fine.domain_measure() == doctest::Approx(1.0).epsilon(1e-13));
      m = fine;
    }
  }

  TEST_CASE("refinement is deterministic")
  {
    std::mt19937 rng(3);
    Mesh m = testutil::refined_uniformly(initial_mesh_unit_square(), 3);
    const auto marked = testutil::random_marks(m, rng, 0.3);
    const auto a = refine(m, marked).first;
    const auto b = refine(m, marked).first;
    CHECK(a.vertices() == b.vertices());
    CHECK(a.cells() == b.cells());
    CHECK(a.id() != b.id());
  }

  TEST_CASE("similarity classes stabilise")
  {
    Mesh m = initial_mesh_unit_square();
    std::vector<std::size_t> counts;
    std::vector<double> angles;
    for (int k = 0; k <= 6; ++k)
    {
      counts.push_back(angle_classes(m).size());
      angles.push_back(mesh_quality(m).min_angle);
      m = uniform_refine(m).first;
    }
    for (int k = 3; k <= 6; ++k)
    {
      CHECK(counts[k] == counts[3]);
      CHECK(angles[k] == doctest::Approx(angles[3]).epsilon(1e-12));
    }
    // Adaptive refinement cannot leave the classes reached by uniform refinement.
    std::mt19937 rng(5);
    Mesh a = initial_mesh_unit_square();
    for (int step = 0; step < 12; ++step)
      a = refine(a, testutil::random_marks(a, rng, 0.15)).first;
    CHECK(mesh_quality(a).min_angle >= angles[3] - 1e-12);
  }

  TEST_CASE("quality and sizes")
  {
    const MeshQuality q = mesh_quality(initial_mesh_1d(0.0, 1.0, 5));
    CHECK(q.h_max == doctest::Approx(0.2));
    CHECK(q.h_min == doctest::Approx(0.2));
    const Mesh sq = initial_mesh_unit_square();
    CHECK(sq.cell_size(0) == doctest::Approx(std::sqrt(0.5)));
    const Point c = sq.centroid(0);
    CHECK(c[0] + c[1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("topology of the square")
  {
    const Mesh m = initial_mesh_unit_square();
    const Topology t = build_topology(m);
    CHECK(t.edges.size() == 5);
    int interior = 0;
    for (Index e = 0; e < t.edges.size(); ++e)
      interior += t.is_boundary(e) ? 0 : 1;
    CHECK(interior == 1);
    // Local edge 0 of both cells is the shared diagonal.
    CHECK(t.cell_edges[0][0] == t.cell_edges[1][0]);
  }

  TEST_CASE("check_mesh finds defects")
  {
    // Clockwise triangle.
    const Mesh cw(2, {{0, 0}, {1, 0}, {0, 1}}, {Cell{0, 2, 1}}, {Facet{0, 1}, Facet{1, 2}, Facet{2, 0}});
    CHECK_FALSE(check_mesh(cw).empty());
    // Hanging node: the square with only one half bisected.
    const Mesh hang(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}},
                    {Cell{1, 4, 0}, Cell{2, 4, 1}, Cell{0, 2, 3}},
                    {Facet{0, 1}, Facet{1, 2}, Facet{2, 3}, Facet{3, 0}});
    CHECK_FALSE(check_mesh(hang).empty());
    // Duplicate vertex.
    const Mesh dup(1, {{0, 0}, {1, 0}, {1, 0}}, {Cell{0, 1, 0}, Cell{2, 1, 0}}, {Facet{0, 0}, Facet{2, 0}});
    CHECK_FALSE(check_mesh(dup).empty());
  }

  TEST_CASE("vtk output")
  {
    const Mesh m = initial_mesh_unit_square();
    const std::vector<double> data{1.0, 2.0};
    std::ostringstream os;
    write_vtk(os, m, {{"eta_sq", data}});
    const std::string s = os.str();
    CHECK(s.find("# vtk DataFile Version") == 0);
    CHECK(s.find("POINTS 4") != std::string::npos);
    CHECK(s.find("CELLS 2 8") != std::string::npos);
    CHECK(s.find("CELL_TYPES 2\n5\n5") != std::string::npos);
    CHECK(s.find("CELL_DATA 2") != std::string::npos);
    const std::vector<double> wrong{1.0};
    std::ostringstream os2;
    CHECK_THROWS_AS(write_vtk(os2, m, {{"bad", wrong}}), DimensionMismatch);
  }
}
