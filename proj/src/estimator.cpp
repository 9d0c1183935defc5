#include <goafem/estimator.hpp>

#include <goafem/assembly.hpp>

#include <cmath>
#include <functional>

namespace goafem {

namespace {

// Pointwise data of one residual: source s, flux data F with elementwise
// divergence, and the zero-order term evaluated from (w_H, v_H).
struct ResidualData
{
  const ScalarField *source;
  const VectorField *flux;
  const ScalarField *flux_divergence;
  std::function<double(const Point &, double w, double v)> reaction;
  bool singular_source; // source = x^alpha * ghat on the cell at x = 0
};

struct CellValues
{
  std::vector<Point> points;
  std::vector<double> v;     // discrete function
  std::vector<double> w;     // linearisation point
  std::vector<Vec2> grad;    // grad v
  std::vector<Mat2> hessian; // Hessian of v
};

CellValues cell_values(const FeSpace &space, Index c, std::span<const Point> ref_points,
                       std::span<const double> v_coeffs, std::span<const double> w_coeffs)
{
  const BasisValues bv = evaluate_basis(space, c, ref_points);
  const auto dofs = space.cell_dofs(c);

  CellValues cv;
  cv.points = bv.points;
  cv.v.assign(bv.n_points, 0.0);
  cv.w.assign(bv.n_points, 0.0);
  cv.grad.assign(bv.n_points, Vec2{0.0, 0.0});
  cv.hessian.assign(bv.n_points, Mat2{});
  for (std::size_t q = 0; q < bv.n_points; ++q)
    for (std::size_t i = 0; i < bv.n_basis; ++i)
    {
      const double vi = v_coeffs[dofs[i]];
      cv.v[q] += vi * bv.phi(q, i);
      cv.w[q] += w_coeffs[dofs[i]] * bv.phi(q, i);
      cv.grad[q] = cv.grad[q] + vi * bv.dphi(q, i);
      const Mat2 &h = bv.d2phi(q, i);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          cv.hessian[q][a][b] += vi * h[a][b];
    }
  return cv;
}

// Residual without the source term: -div F + div(A grad v) - reaction.
double reduced_residual(const ProblemSpec &problem, const ResidualData &data, const CellValues &cv, std::size_t q)
{
  const Point &x = cv.points[q];
  const Mat2 a = problem.diffusion(x);
  double div_agrad = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      div_agrad += a[i][j] * cv.hessian[q][j][i];
  if (!problem.diffusion_is_constant)
    div_agrad += dot(problem.diffusion_divergence(x), cv.grad[q]);
  return div_agrad - (*data.flux_divergence)(x) - data.reaction(x, cv.w[q], cv.v[q]);
}

double volume_term(const FeSpace &space, const ProblemSpec &problem, const ResidualData &data, Index c,
                   const QuadRule &rule, std::span<const double> v_coeffs, std::span<const double> w_coeffs)
{
  const Mesh &mesh = space.mesh();
  const double jac = std::abs(cell_geometry(mesh, c).det);
  const bool split = data.singular_source && touches_goal_singularity(space, problem, c);

  double integral = 0.0;
  const CellValues cv = cell_values(space, c, rule.points, v_coeffs, w_coeffs);
  for (std::size_t q = 0; q < rule.size(); ++q)
  {
    const double s = split ? 0.0 : (*data.source)(cv.points[q]);
    const double r = s + reduced_residual(problem, data, cv, q);
    integral += rule.weights[q] * jac * r * r;
  }

  if (split)
  {
    // (x^a ghat + r)^2 = x^{2a} ghat^2 + 2 x^a ghat r + r^2; the r^2 part is
    // already integrated above.
    const double alpha = *problem.singular_goal_exponent;
    const int n = space.degree() + 3;
    const double h = mesh.measure(c);
    const QuadRule sq = gauss_jacobi_rule(2.0 * alpha, n);
    for (std::size_t q = 0; q < sq.size(); ++q)
    {
      const Point x{h * sq.points[q][0], 0.0};
      const double ghat = regular_goal_factor(problem, x);
      integral += std::pow(h, 1.0 + 2.0 * alpha) * sq.weights[q] * ghat * ghat;
    }
    const QuadRule lin = gauss_jacobi_rule(alpha, n);
    const CellValues lv = cell_values(space, c, lin.points, v_coeffs, w_coeffs);
    for (std::size_t q = 0; q < lin.size(); ++q)
    {
      const double ghat = regular_goal_factor(problem, lv.points[q]);
      integral += 2.0 * std::pow(h, 1.0 + alpha) * lin.weights[q] * ghat * reduced_residual(problem, data, lv, q);
    }
  }
  const double h_t = mesh.cell_size(c);
  return h_t * h_t * integral;
}

Point nudge(const Point &x, const Point &toward)
{
  return {x[0] + trace_offset * (toward[0] - x[0]), x[1] + trace_offset * (toward[1] - x[1])};
}

void add_jump_terms(const FeSpace &space, const ProblemSpec &problem, const ResidualData &data,
                    std::span<const double> v_coeffs, std::vector<double> &out)
{
  const Mesh &mesh = space.mesh();
  const Topology &topo = space.topology();
  const QuadRule line = gauss_legendre_rule(space.degree() + 1);
  std::vector<Point> ref(line.size());

  for (Index e = 0; e < topo.edges.size(); ++e)
  {
    if (topo.is_boundary(e))
      continue;
    const Point &a = mesh.vertex(topo.edges[e][0]);
    const Point &b = mesh.vertex(topo.edges[e][1]);
    const Vec2 t = b - a;
    const double len = std::sqrt(dot(t, t));
    Vec2 n{t[1] / len, -t[0] / len};

    const Index k0 = topo.edge_cells[e][0];
    const Index k1 = topo.edge_cells[e][1];
    const Point c0 = mesh.centroid(k0);
    const Point c1 = mesh.centroid(k1);
    if (dot(n, c0 - a) > 0.0) // orient n outward from k0
      n = -1.0 * n;

    std::vector<Point> pts(line.size());
    for (std::size_t q = 0; q < line.size(); ++q)
      pts[q] = a + line.points[q][0] * t;

    auto normal_flux = [&](Index k, const Point &centroid) {
      const CellGeometry geo = cell_geometry(mesh, k);
      for (std::size_t q = 0; q < pts.size(); ++q)
        ref[q] = geo.to_reference(pts[q]);
      const LocalEvaluation ev = eval_local(space, v_coeffs, k, ref);
      std::vector<double> flux(pts.size());
      for (std::size_t q = 0; q < pts.size(); ++q)
      {
        const Point inside = nudge(pts[q], centroid);
        const Vec2 agrad = matvec(problem.diffusion(inside), ev.gradients[q]);
        flux[q] = dot(agrad - (*data.flux)(inside), n);
      }
      return flux;
    };

    const std::vector<double> f0 = normal_flux(k0, c0);
    const std::vector<double> f1 = normal_flux(k1, c1);
    double integral = 0.0;
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      const double jump = f0[q] - f1[q];
      integral += line.weights[q] * len * jump * jump;
    }
    out[k0] += mesh.cell_size(k0) * integral;
    out[k1] += mesh.cell_size(k1) * integral;
  }
}

IndicatorField residual_indicators(const FeSpace &space, const ProblemSpec &problem, const ResidualData &data,
                                   std::span<const double> v_coeffs, std::span<const double> w_coeffs,
                                   IndicatorKind kind)
{
  if (v_coeffs.size() != space.n_dofs() || w_coeffs.size() != space.n_dofs())
    throw DimensionMismatch("estimator: coefficient vector does not match the space");
  IndicatorField field;
  field.kind = kind;
  field.mesh_id = space.mesh().id();
  field.values.assign(space.mesh().n_cells(), 0.0);
  const QuadRule rule = quad_rule(space.dim(), volume_order(space.degree()));
  for (Index c = 0; c < space.mesh().n_cells(); ++c)
    field.values[c] = volume_term(space, problem, data, c, rule, v_coeffs, w_coeffs);
  if (space.dim() == 2)
    add_jump_terms(space, problem, data, v_coeffs, field.values);
  return field;
}

} // namespace

IndicatorField eta_local(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs)
{
  ResidualData data{&problem.source, &problem.source_flux, &problem.source_flux_divergence,
                    [&](const Point &x, double, double v) { return problem.reaction(x, v); }, false};
  return residual_indicators(space, problem, data, u_coeffs, u_coeffs, IndicatorKind::primal);
}

IndicatorField zeta_local(const FeSpace &space, const ProblemSpec &problem, std::span<const double> u_coeffs,
                          std::span<const double> z_coeffs)
{
  ResidualData data{&problem.goal_weight, &problem.goal_flux, &problem.goal_flux_divergence,
                    [&](const Point &x, double w, double v) { return problem.reaction_derivative(x, w) * v; },
                    problem.singular_goal_exponent.has_value()};
  return residual_indicators(space, problem, data, z_coeffs, u_coeffs, IndicatorKind::dual);
}

double total(std::span<const double> squared_values)
{
  double s = 0.0;
  for (double v : squared_values)
    s += v;
  return std::sqrt(s);
}

double total(const IndicatorField &field) { return total(field.values); }

double total(const IndicatorField &field, std::span<const Index> cells)
{
  double s = 0.0;
  for (Index c : cells)
    s += field.values.at(c);
  return std::sqrt(s);
}

} // namespace goafem
