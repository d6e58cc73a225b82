#include "calgeo/krf.hpp"
#include "calgeo/ops.hpp"
#include "calgeo/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calgeo::krf {

namespace {

void require_sphere(const GridPtr& grid, const char* who) {
    if (grid->topology != Topology::SphereAxisym)
        throw std::invalid_argument(std::string(who) +
                                    ": sphere-axisym grids only");
}

// Module Laplacian: Lap = Lap_LB / 2.
std::vector<double> half_lb(const GridPtr& grid, const std::vector<double>& f) {
    std::vector<double> out = grid->laplace_beltrami(f);
    for (auto& x : out) x *= 0.5;
    return out;
}

double weighted_sum(const GridPtr& grid, const std::vector<double>& f) {
    std::vector<double> terms(grid->nodes);
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = grid->weights[i] * f[i];
    return pairwise_sum(terms);
}

// d_V between two strictly positive mass-V ratio vectors.  Both masses are
// exactly V, so the overlap is 1 - (1/2V) int (sqrt F - sqrt G)^2 and
// acos(1 - x) = 2 asin(sqrt(x/2)); computing x directly stays accurate for
// nearby densities where acos of the overlap loses all precision.
double dv_between(const GridPtr& grid, const std::vector<double>& F,
                  const std::vector<double>& G) {
    const double V = grid->total_volume;
    std::vector<double> terms(grid->nodes);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double d = std::sqrt(F[i]) - std::sqrt(G[i]);
        terms[i] = grid->weights[i] * d * d;
    }
    const double x = std::clamp(pairwise_sum(terms) / (2.0 * V), 0.0, 2.0);
    return 4.0 * std::sqrt(V) * std::asin(std::sqrt(0.5 * x));
}

// Thomas solve of (I - dt * diag(w) * Lap) x = rhs; Lap = half
// Laplace-Beltrami, w a positive node-wise coefficient.
std::vector<double> implicit_solve(const GridPtr& grid, double dt,
                                   const std::vector<double>& w,
                                   const std::vector<double>& rhs) {
    const int N = grid->resolution;
    const double h2 = grid->h_theta * grid->h_theta;
    std::vector<double> a(N, 0.0), b(N), c(N, 0.0), d = rhs;
    for (int i = 0; i < N; ++i) {
        const double sl = (i == 0) ? 0.0 : grid->sin_edge[i];
        const double sr = (i == N - 1) ? 0.0 : grid->sin_edge[i + 1];
        const double scale = dt * w[i] / (2.0 * h2 * grid->sin_center[i]);
        b[i] = 1.0 + scale * (sl + sr);
        if (i > 0) a[i] = -scale * sl;
        if (i < N - 1) c[i] = -scale * sr;
    }
    for (int i = 1; i < N; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    std::vector<double> x(N);
    x[N - 1] = d[N - 1] / b[N - 1];
    for (int i = N - 2; i >= 0; --i) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

} // namespace

Density form_ratio(const ScalarField& phi) {
    require_sphere(phi.grid, "form_ratio");
    std::vector<double> lap = half_lb(phi.grid, phi.v);
    Density F(phi.grid);
    for (std::size_t i = 0; i < F.ratio.size(); ++i) F.ratio[i] = 1.0 + lap[i];
    if (!(F.min_ratio() > 0.0))
        throw std::domain_error("form_ratio: omega_phi is not positive");
    F.recompute_total();
    return F;
}

ScalarField sphere_inv_laplace_beltrami(const ScalarField& q) {
    require_sphere(q.grid, "sphere_inv_laplace_beltrami");
    const GridPtr& grid = q.grid;
    const int N = grid->resolution;
    const double h = grid->h_theta;
    // project onto mean-zero so the flux closes at the far pole
    const double m = mean_ref(q);
    ScalarField f(grid);
    double flux = 0.0;
    for (int i = 0; i + 1 < N; ++i) {
        flux += h * (q.v[i] - m) * grid->sin_center[i];
        f.v[i + 1] = f.v[i] + h * flux / grid->sin_edge[i + 1];
    }
    const double fm = mean_ref(f);
    for (auto& x : f.v) x -= fm;
    return f;
}

ScalarField ricci_potential(const ScalarField& psi) {
    require_sphere(psi.grid, "ricci_potential");
    const GridPtr& grid = psi.grid;
    const double V = grid->total_volume;
    Density F = form_ratio(psi);

    ScalarField src(grid);  // (1 - F'), the omega-trace part of Ric - omega'
    for (std::size_t i = 0; i < src.size(); ++i) src.v[i] = 1.0 - F.ratio[i];
    if (std::abs(weighted_sum(grid, src.v)) > 1e-9 * V)
        throw std::runtime_error(
            "ricci_potential: source violates the cohomology constraint");

    // Lap f = (1 - F') - Lap log F'  =>  Lap_LB f = 2(1 - F') - Lap_LB log F'
    ScalarField logF(grid);
    for (std::size_t i = 0; i < logF.size(); ++i)
        logF.v[i] = std::log(F.ratio[i]);
    ScalarField rhs(grid);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.v[i] = 2.0 * src.v[i];
    ScalarField f = sphere_inv_laplace_beltrami(rhs);
    for (std::size_t i = 0; i < f.size(); ++i) f.v[i] -= logF.v[i];

    // (1/V) int e^f omega' = 1
    std::vector<double> expf(grid->nodes);
    for (std::size_t i = 0; i < expf.size(); ++i)
        expf[i] = std::exp(f.v[i]) * F.ratio[i];
    const double c = -std::log(weighted_sum(grid, expf) / V);
    for (auto& x : f.v) x += c;
    return f;
}

ScalarField scalar_curvature(const ScalarField& phi) {
    Density F = form_ratio(phi);
    std::vector<double> logF(phi.grid->nodes);
    for (std::size_t i = 0; i < logF.size(); ++i)
        logF[i] = std::log(F.ratio[i]);
    std::vector<double> lap = half_lb(phi.grid, logF);
    ScalarField s(phi.grid);
    for (std::size_t i = 0; i < s.size(); ++i)
        s.v[i] = (1.0 - lap[i]) / F.ratio[i];
    return s;
}

FlowTrajectory krf_integrate(const ScalarField& phi0,
                             const FlowControls& controls) {
    require_sphere(phi0.grid, "krf_integrate");
    const GridPtr& grid = phi0.grid;
    const double V = grid->total_volume;

    FlowTrajectory traj;
    traj.grid = grid;

    ScalarField phi = phi0;
    {
        const double m = mean_ref(phi);
        for (auto& x : phi.v) x -= m;
    }
    std::vector<double> F(grid->nodes);
    {
        std::vector<double> lap = half_lb(grid, phi.v);
        for (std::size_t i = 0; i < F.size(); ++i) F[i] = 1.0 + lap[i];
        if (*std::min_element(F.begin(), F.end()) <= 0.0)
            throw std::domain_error("krf_integrate: initial form not positive");
    }

    auto record = [&](double t, const std::vector<double>& Fprev, double dt) {
        std::vector<double> logF(grid->nodes), s(grid->nodes);
        for (std::size_t i = 0; i < F.size(); ++i) logF[i] = std::log(F[i]);
        std::vector<double> lap = half_lb(grid, logF);
        std::vector<double> sq(grid->nodes);
        double s_inf = 0.0;
        for (std::size_t i = 0; i < F.size(); ++i) {
            s[i] = (1.0 - lap[i]) / F[i];
            const double dev = s[i] - 1.0;
            sq[i] = dev * dev * F[i];
            s_inf = std::max(s_inf, std::abs(dev));
        }
        const double s_l2 = std::sqrt(std::max(0.0, weighted_sum(grid, sq)));

        std::vector<double> dot(grid->nodes);
        for (std::size_t i = 0; i < F.size(); ++i) dot[i] = logF[i] + phi.v[i];
        const double a = weighted_sum(grid, dot) / V;
        double sup_dot = 0.0, c0 = 0.0;
        for (std::size_t i = 0; i < F.size(); ++i) {
            sup_dot = std::max(sup_dot, std::abs(dot[i] - a));
            c0 = std::max(c0, std::abs(phi.v[i]));
        }

        traj.times.push_back(t);
        traj.s_l2.push_back(s_l2);
        traj.s_inf.push_back(s_inf);
        traj.sup_phidot.push_back(sup_dot);
        traj.phi_c0.push_back(c0);
        traj.volume.push_back(weighted_sum(grid, F));

        if (traj.l1_increment.empty()) {
            traj.l1_increment.push_back(0.0);
            traj.cum_dC.push_back(0.0);
            traj.cum_dV.push_back(0.0);
        } else {
            std::vector<double> gap(grid->nodes);
            for (std::size_t i = 0; i < F.size(); ++i)
                gap[i] = std::abs(F[i] - Fprev[i]);
            traj.l1_increment.push_back(weighted_sum(grid, gap));
            const double prev_s = traj.s_l2[traj.s_l2.size() - 2];
            traj.cum_dC.push_back(traj.cum_dC.back() +
                                  0.5 * dt * (prev_s + s_l2));
            traj.cum_dV.push_back(traj.cum_dV.back() +
                                  dv_between(grid, Fprev, F));
        }
    };

    record(0.0, F, 0.0);
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(phi);

    double t = 0.0, dt = controls.dt0;
    long step = 0;
    // second-order IMEX: per step, freeze the linearized diffusion
    // (1/F) Lap (still tridiagonal) and treat it with Crank-Nicolson; the
    // remainder log F + phi - (1/F) Lap phi is non-stiff and advances with
    // variable-step Adams-Bashforth 2.  The previous remainder is
    // re-evaluated with the current frozen coefficient so the splitting is
    // exact within each step and both d_C length formulas agree to O(dt^2).
    std::vector<double> phi_prev, lap_prev, F_prev_state;
    double dt_prev = 0.0;
    while (t < controls.t_end - 1e-12) {
        dt = std::min(dt, controls.t_end - t);
        std::vector<double> lap_phi = half_lb(grid, phi.v);
        std::vector<double> w(grid->nodes), nl(grid->nodes);
        for (std::size_t i = 0; i < F.size(); ++i) {
            w[i] = 1.0 / F[i];
            nl[i] = std::log(F[i]) + phi.v[i] - w[i] * lap_phi[i];
        }
        double b1 = 1.0, b0 = 0.0;
        if (dt_prev > 0.0) {
            const double r = dt / dt_prev;
            b1 = 1.0 + 0.5 * r;
            b0 = -0.5 * r;
        }
        std::vector<double> rhs(grid->nodes);
        for (std::size_t i = 0; i < F.size(); ++i) {
            const double nlp =
                phi_prev.empty()
                    ? 0.0
                    : std::log(F_prev_state[i]) + phi_prev[i] -
                          w[i] * lap_prev[i];
            rhs[i] = phi.v[i] +
                     dt * (0.5 * w[i] * lap_phi[i] + b1 * nl[i] + b0 * nlp);
        }
        std::vector<double> phi_new = implicit_solve(grid, 0.5 * dt, w, rhs);
        {
            ScalarField tmp(grid);
            tmp.v = phi_new;
            const double m = mean_ref(tmp);
            for (auto& x : phi_new) x -= m;
        }
        std::vector<double> lap = half_lb(grid, phi_new);
        std::vector<double> F_new(grid->nodes);
        double fmin = 1.0;
        for (std::size_t i = 0; i < F.size(); ++i) {
            F_new[i] = 1.0 + lap[i];
            fmin = std::min(fmin, F_new[i]);
        }
        if (fmin <= 1e-10) {
            dt *= 0.5;
            phi_prev.clear();  // restart the multistep history
            dt_prev = 0.0;
            if (dt < controls.dt_floor) {
                traj.aborted = true;
                traj.abort_reason = "positivity loss: step size below floor";
                break;
            }
            continue;
        }
        std::vector<double> Fprev = F;
        phi_prev = phi.v;
        lap_prev = std::move(lap_phi);
        F_prev_state = F;
        phi.v = phi_new;
        F = F_new;
        dt_prev = dt;
        t += dt;
        ++step;
        record(t, Fprev, dt);
        if (step % controls.record_every == 0) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(phi);
        }
    }
    if (traj.snapshot_times.back() != t) {
        traj.snapshot_times.push_back(t);
        traj.snapshots.push_back(phi);
    }
    traj.phi_final = phi;
    return traj;
}

FlowLength dC_length_of_flow(const FlowTrajectory& traj) {
    FlowLength out;
    if (!traj.cum_dC.empty()) {
        out.curvature_integral = traj.cum_dC.back();
        out.chordal_sum = traj.cum_dV.back();
    }
    return out;
}

double exponential_rate(const FlowTrajectory& traj) {
    if (traj.times.size() < 4) return 0.0;
    // fit on the last half of the samples that are still above the rounding
    // floor; on long runs the signal underflows well before t_end
    const double floor_val =
        std::max(1e-13, 1e-8 * std::max(traj.s_l2.front(), 0.0));
    std::vector<std::size_t> usable;
    for (std::size_t j = 0; j < traj.times.size(); ++j)
        if (traj.s_l2[j] > floor_val) usable.push_back(j);
    if (usable.size() < 4) return 0.0;
    const std::size_t start = usable.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (std::size_t u = start; u < usable.size(); ++u) {
        const std::size_t j = usable[u];
        const double x = traj.times[j], y = std::log(traj.s_l2[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return -(n * sxy - sx * sy) / denom;
}

ConvergenceReport convergence_report(const FlowTrajectory& traj) {
    ConvergenceReport rep;
    rep.fitted_rate = exponential_rate(traj);
    const std::size_t last = traj.times.size() - 1;
    const double dt_last =
        (last > 0) ? traj.times[last] - traj.times[last - 1] : 1.0;
    const double l1_rate =
        (dt_last > 0) ? traj.l1_increment[last] / dt_last : 0.0;

    rep.checks.push_back(
        Report::leq("krf: terminal L1 increment per unit time", l1_rate, 1e-8));
    double c0max = 0.0;
    for (double c : traj.phi_c0) c0max = std::max(c0max, c);
    rep.checks.push_back(Report::leq("krf: sup_t |phi|_C0 bounded", c0max,
                                     std::max(1.0, 10.0 * traj.phi_c0.front() + 1.0)));
    const double len = traj.cum_dC.empty() ? 0.0 : traj.cum_dC.back();
    rep.checks.push_back(
        Report::boolean("krf: d_C length finite", std::isfinite(len)));
    rep.checks.push_back(Report::leq("krf: terminal |s - 1|_inf",
                                     traj.s_inf.back(), 1e-3));

    const bool converged = !traj.aborted && rep.checks[0].pass &&
                           rep.checks[3].pass;
    rep.status = converged ? "converged" : "inconclusive";
    return rep;
}

StabilityReport cr_stability_report(const std::vector<ScalarField>& initial_data,
                                    const FlowControls& controls) {
    StabilityReport out;
    out.all_converged = true;
    int idx = 0;
    for (const auto& phi0 : initial_data) {
        FlowTrajectory traj = krf_integrate(phi0, controls);
        StabilityRun run;
        run.label = "run_" + std::to_string(idx++);
        run.report = convergence_report(traj);
        run.dC_length = dC_length_of_flow(traj).curvature_integral;
        if (run.report.status != "converged") out.all_converged = false;
        out.runs.push_back(std::move(run));
    }
    return out;
}

ScalarField legendre_mode(const GridPtr& grid, int l, double amplitude) {
    require_sphere(grid, "legendre_mode");
    ScalarField f(grid);
    for (std::size_t i = 0; i < f.size(); ++i)
        f.v[i] = amplitude * std::legendre(unsigned(l),
                                           std::cos(grid->coord(i, 0)));
    const double m = mean_ref(f);
    for (auto& x : f.v) x -= m;
    return f;
}

} // namespace calgeo::krf
