#include "calgeo/density.hpp"
#include "calgeo/ops.hpp"
#include "calgeo/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace calgeo::dens {

namespace {

constexpr double pi = std::numbers::pi;

void require_positive(const Density& mu, const char* who) {
    if (!(mu.min_ratio() > 0.0))
        throw std::invalid_argument(std::string(who) +
                                    ": density vanishes at a node");
}

void require_nonnegative(const Density& mu, const char* who) {
    if (mu.min_ratio() < 0.0)
        throw std::invalid_argument(std::string(who) + ": negative density");
}

double quad(const GridPtr& grid, const std::vector<double>& pointwise) {
    std::vector<double> terms(grid->nodes);
    for (std::size_t i = 0; i < grid->nodes; ++i)
        terms[i] = grid->weights[i] * pointwise[i];
    return pairwise_sum(terms);
}

} // namespace

double gtilde_inner(const Density& mu, const ScalarField& a, const ScalarField& b) {
    require_same_grid(mu.grid, a.grid);
    require_same_grid(mu.grid, b.grid);
    require_positive(mu, "gtilde_inner");
    std::vector<double> terms(mu.grid->nodes);
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = a.v[i] * b.v[i] / mu.ratio[i];
    return quad(mu.grid, terms);
}

double gV_inner(const Density& mu, const ScalarField& a, const ScalarField& b) {
    const double tol = 1e-8 * std::max(1.0, mu.total);
    if (std::abs(integrate_ref(a)) > tol || std::abs(integrate_ref(b)) > tol)
        throw std::invalid_argument("gV_inner: tangent density has nonzero mass");
    return gtilde_inner(mu, a, b);
}

ScalarField phi_map(const Density& mu) {
    require_nonnegative(mu, "phi_map");
    ScalarField w(mu.grid);
    for (std::size_t i = 0; i < w.size(); ++i) w.v[i] = 2.0 * std::sqrt(mu.ratio[i]);
    return w;
}

Density phi_inverse(const ScalarField& w) {
    for (double x : w.v)
        if (x < 0.0)
            throw std::invalid_argument("phi_inverse: negative half-density");
    Density mu(w.grid);
    for (std::size_t i = 0; i < w.size(); ++i) mu.ratio[i] = 0.25 * w.v[i] * w.v[i];
    mu.recompute_total();
    return mu;
}

ScalarField phi_differential(const Density& mu, const ScalarField& a) {
    require_positive(mu, "phi_differential");
    ScalarField w(mu.grid);
    for (std::size_t i = 0; i < w.size(); ++i)
        w.v[i] = a.v[i] / std::sqrt(mu.ratio[i]);
    return w;
}

Density ambient_geodesic(const Density& mu, const ScalarField& a, double t) {
    require_same_grid(mu.grid, a.grid);
    require_positive(mu, "ambient_geodesic");
    Density out(mu.grid);
    for (std::size_t i = 0; i < out.ratio.size(); ++i) {
        const double f = 1.0 + 0.5 * t * a.v[i] / mu.ratio[i];
        out.ratio[i] = f * f * mu.ratio[i];
    }
    out.recompute_total();
    return out;
}

namespace {
double overlap_cosine(const Density& mu1, const Density& mu2, double V) {
    std::vector<double> terms(mu1.grid->nodes);
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = std::sqrt(std::max(0.0, mu1.ratio[i] * mu2.ratio[i]));
    const double x = quad(mu1.grid, terms) / V;
    return std::clamp(x, -1.0, 1.0);
}
} // namespace

double geodesic_length(const Density& mu1, const Density& mu2) {
    require_same_grid(mu1.grid, mu2.grid);
    require_nonnegative(mu1, "geodesic_length");
    require_nonnegative(mu2, "geodesic_length");
    const double V = mu1.grid->total_volume;
    return 2.0 * std::sqrt(V) * std::acos(overlap_cosine(mu1, mu2, V));
}

Density calabi_geodesic(const Density& mu1, const Density& mu2, double t) {
    require_same_grid(mu1.grid, mu2.grid);
    require_positive(mu1, "calabi_geodesic");
    require_positive(mu2, "calabi_geodesic");
    const double V = mu1.grid->total_volume;
    if (std::abs(mu1.total - V) > 1e-8 * V || std::abs(mu2.total - V) > 1e-8 * V)
        throw std::invalid_argument("calabi_geodesic: endpoints must have mass V");
    const double T = geodesic_length(mu1, mu2);
    if (T == 0.0) return mu1;
    const double sV = std::sqrt(V);
    const double denom = std::sin(0.5 * T / sV);
    const double c1 = std::sin(0.5 * (T - t) / sV) / denom;
    const double c2 = std::sin(0.5 * t / sV) / denom;
    Density out(mu1.grid);
    for (std::size_t i = 0; i < out.ratio.size(); ++i) {
        const double s = c1 * std::sqrt(mu1.ratio[i]) + c2 * std::sqrt(mu2.ratio[i]);
        out.ratio[i] = s * s;
    }
    out.recompute_total();
    return out;
}

double dV_distance(const Density& mu1, const Density& mu2) {
    return geodesic_length(mu1, mu2);
}

double dtildeV_distance(const Density& mu1, const Density& mu2) {
    require_same_grid(mu1.grid, mu2.grid);
    require_nonnegative(mu1, "dtildeV_distance");
    require_nonnegative(mu2, "dtildeV_distance");
    std::vector<double> terms(mu1.grid->nodes);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double d = std::sqrt(mu2.ratio[i]) - std::sqrt(mu1.ratio[i]);
        terms[i] = d * d;
    }
    return 2.0 * std::sqrt(quad(mu1.grid, terms));
}

std::vector<Report> equivalence_check(const Density& mu1, const Density& mu2) {
    const double dv = dV_distance(mu1, mu2);
    const double dt = dtildeV_distance(mu1, mu2);
    std::vector<Report> reports;
    reports.push_back(Report::leq("equivalence: dtildeV <= dV", dt, dv));
    // strict side: dV < pi/(2 sqrt 2) dtildeV for distinct inputs
    const double cap = pi / (2.0 * std::sqrt(2.0)) * dt;
    if (dt == 0.0)
        reports.push_back(Report::leq("equivalence: dV < pi/(2 sqrt2) dtildeV", dv, 0.0));
    else {
        Report strict = Report::leq("equivalence: dV < pi/(2 sqrt2) dtildeV", dv, cap);
        strict.pass = dv < cap;
        reports.push_back(strict);
    }
    // proof-path convexity: x - (pi/2) sin x <= 0 on [0, pi/2]
    const double V = mu1.grid->total_volume;
    const double x = 0.5 * dv / std::sqrt(V);
    reports.push_back(
        Report::leq("equivalence: x - (pi/2) sin x <= 0", x - 0.5 * pi * std::sin(x),
                    0.0, 1e-14));
    return reports;
}

Density chord_projection(const Density& mu1, const Density& mu2, double t) {
    require_same_grid(mu1.grid, mu2.grid);
    const ScalarField w1 = phi_map(mu1);
    const ScalarField w2 = phi_map(mu2);
    ScalarField w(mu1.grid);
    for (std::size_t i = 0; i < w.size(); ++i)
        w.v[i] = (1.0 - t) * w1.v[i] + t * w2.v[i];
    Density chord = phi_inverse(w);
    const double V = mu1.grid->total_volume;
    const double scale = V / chord.total;
    for (auto& r : chord.ratio) r *= scale;
    chord.recompute_total();
    return chord;
}

BoundaryRay boundary_ray(const Density& mu, const ScalarField& G, int samples) {
    require_same_grid(mu.grid, G.grid);
    require_positive(mu, "boundary_ray");
    const double V = mu.grid->total_volume;
    ScalarField Gmu(mu.grid), G2mu(mu.grid);
    for (std::size_t i = 0; i < G.size(); ++i) {
        Gmu.v[i] = G.v[i];
        G2mu.v[i] = G.v[i] * G.v[i];
    }
    if (std::abs(integrate(Gmu, mu)) > 1e-8 * std::max(1.0, V) ||
        std::abs(integrate(G2mu, mu) - 1.0) > 1e-8)
        throw std::invalid_argument(
            "boundary_ray: direction must satisfy int G dV = 0, int G^2 dV = 1");

    const double sV = std::sqrt(V);
    // first zero of sqrt(V) sin(s) G + cos(s) over nodes; s = t / (2 sqrt V)
    double s_min = 0.5 * pi;  // G = 0 nodes vanish exactly at a quarter turn
    for (double g : G.v) {
        double s;
        if (g < 0.0)
            s = std::atan(1.0 / (sV * (-g)));
        else if (g > 0.0)
            s = pi - std::atan(1.0 / (sV * g));
        else
            s = 0.5 * pi;
        s_min = std::min(s_min, s);
    }
    BoundaryRay ray;
    ray.t_max = 2.0 * sV * s_min;
    for (int j = 0; j < samples; ++j) {
        const double t = ray.t_max * j / (samples - 1);
        const double s = 0.5 * t / sV;
        Density p(mu.grid);
        for (std::size_t i = 0; i < p.ratio.size(); ++i) {
            const double f = G.v[i] * sV * std::sin(s) + std::cos(s);
            p.ratio[i] = std::max(0.0, f * f) * mu.ratio[i];
        }
        p.recompute_total();
        ray.times.push_back(t);
        ray.densities.push_back(std::move(p));
    }
    return ray;
}

double l1_distance(const Density& mu, const Density& nu) {
    require_same_grid(mu.grid, nu.grid);
    std::vector<double> terms(mu.grid->nodes);
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = std::abs(mu.ratio[i] - nu.ratio[i]);
    return quad(mu.grid, terms);
}

namespace {
bool converged_trend(const std::vector<double>& e, double tol) {
    const std::size_t n = e.size();
    if (n < 3) return false;
    // slack absorbs rounding-floor noise once the values are deep below tol
    const double slack = 0.01 * tol;
    return e[n - 1] < tol && e[n - 2] < tol && e[n - 3] < tol &&
           e[n - 1] <= e[n - 2] + slack && e[n - 2] <= e[n - 3] + slack;
}
} // namespace

std::vector<Report> l1_convergence_check(const std::vector<Density>& seq,
                                         const Density& limit, double tol) {
    std::vector<double> l1, dv;
    for (const auto& mu : seq) {
        l1.push_back(l1_distance(mu, limit));
        dv.push_back(dV_distance(mu, limit));
    }
    const bool l1_conv = converged_trend(l1, tol);
    // d_V and L1 live on different scales; compare against sqrt-scaled tol
    const bool dv_conv = converged_trend(dv, std::sqrt(tol));
    std::vector<Report> reports;
    reports.push_back(Report::boolean("completion: L1 conv <=> dV conv", l1_conv == dv_conv));
    Report tail("completion: terminal L1 vs dV", 0, 0, 0, tol, true);
    tail.lhs = l1.empty() ? 0.0 : l1.back();
    tail.rhs = dv.empty() ? 0.0 : dv.back();
    reports.push_back(tail);
    return reports;
}

std::vector<Report> l1_l2_equivalence(const std::vector<ScalarField>& fk,
                                      const ScalarField& f, double tol) {
    std::vector<double> l2err, l1sq_err;
    for (const auto& g : fk) {
        std::vector<double> t2(f.grid->nodes), t1(f.grid->nodes);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double d = g.v[i] - f.v[i];
            t2[i] = d * d;
            t1[i] = std::abs(g.v[i] * g.v[i] - f.v[i] * f.v[i]);
        }
        l2err.push_back(std::sqrt(quad(f.grid, t2)));
        l1sq_err.push_back(quad(f.grid, t1));
    }
    const bool l2_conv = converged_trend(l2err, tol);
    const bool l1_conv = converged_trend(l1sq_err, tol);
    std::vector<Report> reports;
    reports.push_back(
        Report::boolean("completion: L2(f_k) <=> L1(f_k^2) conv", l2_conv == l1_conv));
    return reports;
}

std::pair<Density, Density> bump_pair(const GridPtr& grid, double eps) {
    auto bump_at = [&](const std::vector<double>& center) {
        Density mu(grid);
        const double R = grid->is_torus() ? 0.22 : 0.7;
        for (std::size_t p = 0; p < grid->nodes; ++p) {
            double r2 = 0.0;
            for (int a = 0; a < grid->coord_dim; ++a) {
                double d = std::abs(grid->coord(p, a) - center[a]);
                if (grid->is_torus()) d = std::min(d, 1.0 - d);
                r2 += d * d;
            }
            double b = 0.0;
            if (r2 < R * R) b = std::exp(1.0 - 1.0 / (1.0 - r2 / (R * R)));
            mu.ratio[p] = eps + b;
        }
        mu.recompute_total();
        const double scale = grid->total_volume / mu.total;
        for (auto& r : mu.ratio) r *= scale;
        mu.recompute_total();
        return mu;
    };
    std::vector<double> c1(std::size_t(grid->coord_dim), 0.5);
    std::vector<double> c2 = c1;
    if (grid->is_torus()) {
        c1[0] = 0.25;
        c2[0] = 0.75;
    } else {
        c1[0] = 0.25 * pi;
        c2[0] = 0.75 * pi;
    }
    return {bump_at(c1), bump_at(c2)};
}

Density random_density(const GridPtr& grid, std::mt19937_64& rng,
                       double roughness) {
    ScalarField f = random_smooth_field(grid, rng, roughness);
    Density mu(grid);
    for (std::size_t i = 0; i < mu.ratio.size(); ++i)
        mu.ratio[i] = std::exp(f.v[i]);
    mu.recompute_total();
    const double scale = grid->total_volume / mu.total;
    for (auto& r : mu.ratio) r *= scale;
    mu.recompute_total();
    return mu;
}

} // namespace calgeo::dens
