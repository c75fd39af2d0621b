#include "gasket/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gasket/errors.hpp"
#include "gasket/green.hpp"
#include "gasket/operators.hpp"
#include "gasket/solver.hpp"

namespace gasket {

namespace {

// SSPRK(5,4) Shu-Osher coefficients (Spiteri-Ruuth). Every stage is a convex
// combination of forward-Euler steps, so with dt at or below the Euler
// monotonicity limit the update inherits the discrete maximum principle.
struct Ssprk54 {
  static constexpr double a10 = 1.0;
  static constexpr double b10 = 0.391752226571890;
  static constexpr double a20 = 0.444370493651235;
  static constexpr double a21 = 0.555629506348765;
  static constexpr double b21 = 0.368410593050371;
  static constexpr double a30 = 0.620101851488403;
  static constexpr double a32 = 0.379898148511597;
  static constexpr double b32 = 0.251891774271694;
  static constexpr double a40 = 0.178079954393132;
  static constexpr double a43 = 0.821920045606868;
  static constexpr double b43 = 0.544974750228521;
  static constexpr double a52 = 0.517231671970585;
  static constexpr double a53 = 0.096059710526147;
  static constexpr double b53 = 0.063692468666290;
  static constexpr double a54 = 1.0 - a52 - a53;  // 0.386708617503269 up to rounding
  static constexpr double b54 = 0.226007483236906;
};

class Stepper {
public:
  Stepper(const GasketGraph& g, const PhiFunction& phi)
      : g_(g), phi_(phi), scale_(pow5(g.level())), lap_(g) {
    boundary_mask_.assign(g.vertex_count(), 0);
    for (VertexId b : g.boundary()) boundary_mask_[b] = 1;
  }

  // F(u) = Laplacian phi(u) on the interior, 0 at the corners
  void rhs(const std::vector<double>& u, std::vector<double>& out) {
    const std::size_t n = u.size();
    pu_.resize(n);
    for (std::size_t x = 0; x < n; ++x) pu_[x] = phi_(u[x]);
    out.resize(n);
    for (VertexId x = 0; x < static_cast<VertexId>(n); ++x) {
      if (boundary_mask_[x]) {
        out[x] = 0.0;
        continue;
      }
      double s = -g_.degree(x) * pu_[x];
      for (const VertexId* y = g_.neighbors_begin(x); y != g_.neighbors_end(x); ++y)
        s += pu_[*y];
      out[x] = scale_ * s;
    }
  }

  void euler_into(const std::vector<double>& u, const std::vector<double>& f, double dt,
                  std::vector<double>& out) {
    out.resize(u.size());
    for (std::size_t x = 0; x < u.size(); ++x) out[x] = u[x] + dt * f[x];
  }

  void ssprk54_step(std::vector<double>& u, double dt) {
    using C = Ssprk54;
    rhs(u, f_);
    euler_into(u, f_, C::b10 * dt, u1_);
    rhs(u1_, f_);
    combine2(C::a20, u, C::a21, u1_, C::b21 * dt, f_, u2_);
    rhs(u2_, f_);
    combine2(C::a30, u, C::a32, u2_, C::b32 * dt, f_, u3_);
    rhs(u3_, f3_);
    combine2(C::a40, u, C::a43, u3_, C::b43 * dt, f3_, u4_);
    rhs(u4_, f4_);
    for (std::size_t x = 0; x < u.size(); ++x)
      u[x] = C::a52 * u2_[x] + C::a53 * u3_[x] + C::b53 * dt * f3_[x] + C::a54 * u4_[x] +
             C::b54 * dt * f4_[x];
  }

  // one backward-Euler step by Newton; the Jacobian solve is symmetrized with
  // D^{1/2} so plain CG applies
  void implicit_step(std::vector<double>& u, double dt, const StepControl& c) {
    const std::size_t n = u.size();
    std::vector<double> cur(u);
    std::vector<double> fval(n), resid(n);
    const int m = lap_.size();

    for (int it = 0; it <= c.newton_max_iter; ++it) {
      rhs(cur, fval);
      double rn = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        resid[x] = cur[x] - u[x] - dt * fval[x];
        rn += resid[x] * resid[x];
      }
      if (std::sqrt(rn) <= c.newton_tol * (1.0 + std::sqrt(static_cast<double>(n)))) {
        u = cur;
        return;
      }
      if (it == c.newton_max_iter)
        throw numerical_error("implicit step: Newton did not converge");

      // solve (I + dt * S (-L) S) z = S * (-resid), delta = S z,
      // S = diag(sqrt(phi'(u)))
      std::vector<double> sq(m), rhs_int(m);
      for (int r = 0; r < m; ++r) {
        const VertexId v = lap_.vertex_of(r);
        sq[r] = std::sqrt(std::max(phi_.slope(cur[v]), 1e-14));
        rhs_int[r] = -resid[v] / sq[r];
      }
      std::vector<double> z = cg_symmetrized(sq, dt, rhs_int, c);
      double step_norm = 0.0;
      for (int r = 0; r < m; ++r) {
        const VertexId v = lap_.vertex_of(r);
        const double delta = sq[r] * z[r];
        cur[v] += delta;
        step_norm += delta * delta;
      }
      (void)step_norm;
    }
  }

private:
  static void combine2(double a0, const std::vector<double>& u0, double a1,
                       const std::vector<double>& u1, double bdt, const std::vector<double>& f,
                       std::vector<double>& out) {
    out.resize(u0.size());
    for (std::size_t x = 0; x < u0.size(); ++x) out[x] = a0 * u0[x] + a1 * u1[x] + bdt * f[x];
  }

  std::vector<double> cg_symmetrized(const std::vector<double>& sq, double dt,
                                     const std::vector<double>& rhs, const StepControl& c) {
    const int m = lap_.size();
    std::vector<double> x(m, 0.0), r(rhs), p(rhs), ap(m), tmp(m);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
      for (int t = 0; t < m; ++t) tmp[t] = sq[t] * in[t];
      lap_.apply(tmp, out);  // -L is SPD
      for (int t = 0; t < m; ++t) out[t] = in[t] + dt * sq[t] * out[t];
    };
    double rr = 0.0, bn = 0.0;
    for (int t = 0; t < m; ++t) {
      rr += r[t] * r[t];
      bn += rhs[t] * rhs[t];
    }
    if (bn == 0.0) return x;
    const double stop2 = 1e-24 * bn;
    for (int it = 0; it < 10000; ++it) {
      apply(p, ap);
      double pap = 0.0;
      for (int t = 0; t < m; ++t) pap += p[t] * ap[t];
      const double alpha = rr / pap;
      double rr2 = 0.0;
      for (int t = 0; t < m; ++t) {
        x[t] += alpha * p[t];
        r[t] -= alpha * ap[t];
        rr2 += r[t] * r[t];
      }
      if (rr2 <= stop2) return x;
      const double beta = rr2 / rr;
      rr = rr2;
      for (int t = 0; t < m; ++t) p[t] = r[t] + beta * p[t];
    }
    (void)c;
    throw numerical_error("implicit step: inner CG did not converge");
  }

  const GasketGraph& g_;
  const PhiFunction& phi_;
  double scale_;
  InteriorLaplacian lap_;
  std::vector<char> boundary_mask_;
  std::vector<double> pu_, f_, f3_, f4_, u1_, u2_, u3_, u4_;
};

} // namespace

std::vector<double> make_time_grid(double horizon, const StepControl& c) {
  std::vector<double> t{0.0};
  if (horizon <= 0.0) return t;
  if (c.geometric_samples > 0) {
    const double t0 = horizon * c.geometric_start;
    const double ratio = std::pow(1.0 / c.geometric_start,
                                  1.0 / std::max(1, c.geometric_samples - 1));
    double cur = t0;
    for (int k = 0; k < c.geometric_samples; ++k) {
      t.push_back(std::min(cur, horizon));
      cur *= ratio;
    }
  }
  for (int k = 1; k <= c.uniform_samples; ++k)
    t.push_back(horizon * k / c.uniform_samples);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(),
                      [&](double a, double b) { return std::abs(a - b) <= 1e-15 * horizon; }),
          t.end());
  if (t.back() != horizon) t.push_back(horizon);
  return t;
}

PdeTrace integrate(const GasketGraph& g, const PdeProblem& p) {
  require_same_level(g, p.u0, "integrate");
  if (!(p.horizon >= 0.0)) throw validation_error("integrate: horizon must be non-negative");
  for (int i = 0; i < 3; ++i) {
    if (p.alpha[i] < 0.0) throw validation_error("integrate: boundary values must be >= 0");
    if (p.u0[g.boundary()[i]] != p.alpha[i])
      throw validation_error("integrate: u0 must equal alpha at corner " + std::to_string(i));
  }
  for (double v : p.u0.v)
    if (v < 0.0) throw validation_error("integrate: u0 must be non-negative");

  // explicit step at the Euler monotonicity limit scaled by theta; the
  // Jacobian diagonal is 4 * 5^n * phi', so theta = 0.5 gives dt*|J| <= 2
  const double dt_explicit = p.control.theta * p.phi.eps0 / (2.0 * pow5(g.level()));
  double dt = p.control.dt_override > 0.0
                  ? p.control.dt_override
                  : (p.scheme == PdeScheme::Explicit ? dt_explicit
                                                     : dt_explicit * p.control.implicit_factor);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw numerical_error("integrate: step size underflow");

  PdeTrace trace;
  trace.level = g.level();
  trace.alpha = p.alpha;
  trace.times = make_time_grid(p.horizon, p.control);

  Stepper stepper(g, p.phi);
  std::vector<double> u = p.u0.v;

  Field cur{g.level(), u};
  trace.fields.push_back(cur);
  trace.l2_sq.push_back(inner_product(g, cur, cur));
  trace.h1_sq.push_back(dirichlet_form(g, cur, cur));
  trace.h1_integral.push_back(0.0);

  double h1_prev = trace.h1_sq[0];
  double h1_acc = 0.0;

  for (std::size_t k = 1; k < trace.times.size(); ++k) {
    const double span = trace.times[k] - trace.times[k - 1];
    const int steps = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
    const double h = span / steps;
    if (!(h > 1e-300)) throw numerical_error("integrate: step size underflow");
    for (int s = 0; s < steps; ++s) {
      if (p.scheme == PdeScheme::Explicit)
        stepper.ssprk54_step(u, h);
      else
        stepper.implicit_step(u, h, p.control);
      cur.v = u;
      const double h1 = dirichlet_form(g, cur, cur);
      h1_acc += 0.5 * h * (h1_prev + h1);
      h1_prev = h1;
      trace.steps_taken++;
    }
    trace.fields.push_back(cur);
    trace.l2_sq.push_back(inner_product(g, cur, cur));
    trace.h1_sq.push_back(h1_prev);
    trace.h1_integral.push_back(h1_acc);
  }
  return trace;
}

EnergyReport energy_report(const PdeTrace& trace, double eps0) {
  for (double a : trace.alpha)
    if (a != 0.0)
      throw validation_error("energy_report: the estimate is stated for zero boundary values");
  EnergyReport r;
  r.lhs = trace.l2_sq.back() + 2.0 * eps0 * trace.h1_integral.back();
  r.rhs = trace.l2_sq.front();
  return r;
}

std::vector<double> contraction_check(const GasketGraph& g, const PdeProblem& base,
                                      const Field& u0, const Field& v0) {
  for (int i = 0; i < 3; ++i) {
    const VertexId b = g.boundary()[i];
    if (u0[b] != v0[b] || u0[b] != base.alpha[i])
      throw validation_error("contraction_check: the two initial fields must share boundary values");
  }
  PdeProblem pu = base;
  pu.u0 = u0;
  PdeProblem pv = base;
  pv.u0 = v0;
  const PdeTrace tu = integrate(g, pu);
  const PdeTrace tv = integrate(g, pv);

  HMinusOne hm(g);
  std::vector<double> out;
  out.reserve(tu.times.size());
  Field diff = make_field(g);
  for (std::size_t k = 0; k < tu.times.size(); ++k) {
    for (VertexId x = 0; x < g.vertex_count(); ++x) diff[x] = tu.fields[k][x] - tv.fields[k][x];
    for (VertexId b : g.boundary()) diff[b] = 0.0;
    out.push_back(hm.norm_sq(diff));
  }
  return out;
}

} // namespace gasket
