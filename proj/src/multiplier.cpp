#include "thermoplate/multiplier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "thermoplate/rng.hpp"

namespace thermoplate::multiplier {

std::vector<cx> sweep_lambda_set(double phi, int n_radii, int n_angles, double r_min,
                                 double r_max) {
    if (n_radii < 1 || n_angles < 1 || !(r_min > 0.0) || !(r_max >= r_min)) {
        throw PreconditionViolated("sweep_lambda_set: bad grid parameters");
    }
    std::vector<double> radii;
    for (int i = 0; i < n_radii; ++i) {
        const double fr = (n_radii == 1) ? 0.0 : static_cast<double>(i) / (n_radii - 1);
        radii.push_back(r_min * std::pow(r_max / r_min, fr));
    }
    for (const auto& lam : symbol::eigen_decompose_M().eigenvalues) {
        if (lam.imag() < 0.0) {
            continue;  // conjugate pair shares its modulus
        }
        for (int j = -5; j <= 5; ++j) {
            radii.push_back(std::abs(lam) * std::exp(0.02 * j));
        }
    }
    const double half_open = (kPi - phi) * 0.999;
    std::vector<cx> out;
    out.reserve(radii.size() * static_cast<std::size_t>(n_angles));
    for (const double r : radii) {
        for (int j = 0; j < n_angles; ++j) {
            const double fa = (n_angles == 1) ? 0.5 : static_cast<double>(j) / (n_angles - 1);
            out.push_back(std::polar(r, -half_open + 2.0 * half_open * fa));
        }
    }
    return out;
}

SymbolEval make_kappa_eval(std::vector<int> alpha) {
    return [alpha = std::move(alpha)](cx lambda, std::span<const double> zeta) {
        return symbol::kappa(lambda, zeta, alpha);
    };
}

SymbolEval make_hf_eval(symbol::TestFunction f, symbol::ContourSpec contour) {
    return [f = std::move(f), contour](cx /*lambda*/, std::span<const double> zeta) {
        return symbol::holomorphic_calculus(f, zeta, contour);
    };
}

namespace {

// Delta_k^{gamma2} m(xi, k) by subset expansion; k entries live at the tail
// of the frequency vector.
Mat3 diff_k(const SymbolEval& eval, cx lambda, std::span<const double> xi,
            std::span<const int> k, std::span<const int> gamma2) {
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < gamma2.size(); ++j) {
        if (gamma2[j] == 1) active.push_back(j);
    }
    std::vector<double> zeta(xi.size() + k.size());
    std::copy(xi.begin(), xi.end(), zeta.begin());
    Mat3 acc = Mat3::zero();
    const std::size_t n_subsets = std::size_t{1} << active.size();
    for (std::size_t mask = 0; mask < n_subsets; ++mask) {
        int sign = 1;
        for (std::size_t j = 0; j < k.size(); ++j) {
            zeta[xi.size() + j] = static_cast<double>(k[j]);
        }
        for (std::size_t b = 0; b < active.size(); ++b) {
            if ((mask >> b) & 1u) {
                zeta[xi.size() + active[b]] -= 1.0;
                sign = -sign;
            }
        }
        const Mat3 v = eval(lambda, zeta);
        if (sign > 0) {
            acc += v;
        } else {
            acc -= v;
        }
    }
    return acc;
}

// Mixed central differences over the xi directions flagged in gamma1, with
// all steps scaled by the same factor so Richardson extrapolation applies.
Mat3 mixed_fd(const SymbolEval& eval, cx lambda, std::vector<double>& xi,
              std::span<const int> k, std::span<const int> gamma1,
              std::span<const int> gamma2, std::span<const double> steps,
              std::size_t dim) {
    while (dim < gamma1.size() && gamma1[dim] == 0) ++dim;
    if (dim >= gamma1.size()) {
        return diff_k(eval, lambda, xi, k, gamma2);
    }
    const double h = steps[dim];
    const double x0 = xi[dim];
    xi[dim] = x0 + h;
    const Mat3 plus = mixed_fd(eval, lambda, xi, k, gamma1, gamma2, steps, dim + 1);
    xi[dim] = x0 - h;
    const Mat3 minus = mixed_fd(eval, lambda, xi, k, gamma1, gamma2, steps, dim + 1);
    xi[dim] = x0;
    return (plus - minus) * cx(0.5 / h, 0.0);
}

Mat3 weighted_derivative(const SymbolEval& eval, cx lambda, const std::vector<double>& xi,
                         const std::vector<int>& k, const std::vector<int>& gamma1,
                         const std::vector<int>& gamma2, double fd_rel_step) {
    const bool any_fd =
        std::any_of(gamma1.begin(), gamma1.end(), [](int g) { return g == 1; });
    std::vector<double> xi_work = xi;
    Mat3 d;
    if (!any_fd) {
        d = diff_k(eval, lambda, xi, k, gamma2);
    } else {
        std::vector<double> steps(xi.size(), 0.0);
        for (std::size_t j = 0; j < xi.size(); ++j) {
            steps[j] = fd_rel_step * std::abs(xi[j]);
        }
        const Mat3 coarse =
            mixed_fd(eval, lambda, xi_work, k, gamma1, gamma2, steps, 0);
        for (auto& s : steps) s *= 0.5;
        const Mat3 fine = mixed_fd(eval, lambda, xi_work, k, gamma1, gamma2, steps, 0);
        d = (fine * cx(4.0, 0.0) - coarse) * cx(1.0 / 3.0, 0.0);
    }
    double weight = 1.0;
    for (std::size_t j = 0; j < gamma1.size(); ++j) {
        if (gamma1[j] == 1) weight *= xi[j];
    }
    for (std::size_t j = 0; j < gamma2.size(); ++j) {
        if (gamma2[j] == 1) weight *= static_cast<double>(k[j]);
    }
    return d * cx(weight, 0.0);
}

std::vector<std::vector<double>> xi_product_grid(const MichlinSweepSpec& spec) {
    std::vector<double> mags;
    for (int i = 0; i < spec.xi_points; ++i) {
        const double f = (spec.xi_points == 1) ? 0.0
                                               : static_cast<double>(i) / (spec.xi_points - 1);
        mags.push_back(spec.xi_min * std::pow(spec.xi_max / spec.xi_min, f));
    }
    std::vector<double> axis;
    for (double m : mags) axis.push_back(-m);
    for (double m : mags) axis.push_back(m);

    std::vector<std::vector<double>> out;
    std::vector<std::size_t> odo(static_cast<std::size_t>(spec.n1), 0);
    for (;;) {
        std::vector<double> xi(static_cast<std::size_t>(spec.n1));
        for (std::size_t d = 0; d < odo.size(); ++d) xi[d] = axis[odo[d]];
        out.push_back(std::move(xi));
        std::size_t d = 0;
        while (d < odo.size() && ++odo[d] == axis.size()) {
            odo[d] = 0;
            ++d;
        }
        if (d == odo.size()) break;
    }
    return out;
}

std::vector<std::vector<int>> k_product_grid(const MichlinSweepSpec& spec, bool exclude_box) {
    std::vector<int> axis;
    for (int k = -spec.k_max; k <= spec.k_max; ++k) axis.push_back(k);
    std::vector<std::vector<int>> out;
    if (spec.n2 == 0) {
        out.push_back({});
        return out;
    }
    std::vector<std::size_t> odo(static_cast<std::size_t>(spec.n2), 0);
    for (;;) {
        std::vector<int> k(static_cast<std::size_t>(spec.n2));
        bool in_box = true;
        for (std::size_t d = 0; d < odo.size(); ++d) {
            k[d] = axis[odo[d]];
            if (std::abs(k[d]) > 1) in_box = false;
        }
        if (!(exclude_box && in_box)) {
            out.push_back(std::move(k));
        }
        std::size_t d = 0;
        while (d < odo.size() && ++odo[d] == axis.size()) {
            odo[d] = 0;
            ++d;
        }
        if (d == odo.size()) break;
    }
    return out;
}

}  // namespace

MichlinTable michlin_sweep(const MichlinSweepSpec& spec, const SymbolEval& eval) {
    if (spec.n1 < 0 || spec.n2 < 0 || spec.n1 + spec.n2 < 1) {
        throw PreconditionViolated("michlin_sweep: n1 + n2 >= 1 required");
    }
    if (spec.n1 > 0 && (!(spec.xi_min > 0.0) || !(spec.xi_max >= spec.xi_min))) {
        throw PreconditionViolated("michlin_sweep: xi grid must exclude 0");
    }
    const int nd = spec.n1 + spec.n2;
    const std::vector<std::vector<double>> xi_grid =
        spec.n1 > 0 ? xi_product_grid(spec) : std::vector<std::vector<double>>{{}};
    const std::vector<cx> lambdas =
        spec.lambdas.empty() ? std::vector<cx>{cx(1.0, 0.0)} : spec.lambdas;

    MichlinTable table;
    table.family = spec.family;
    table.lambda_samples = spec.lambdas.size();
    table.xi_points = spec.xi_points;
    table.k_max = spec.k_max;

    for (std::size_t gbits = 0; gbits < (std::size_t{1} << nd); ++gbits) {
        std::vector<int> gamma(static_cast<std::size_t>(nd));
        std::vector<int> gamma1(static_cast<std::size_t>(spec.n1));
        std::vector<int> gamma2(static_cast<std::size_t>(spec.n2));
        bool g2_nonzero = false;
        for (int d = 0; d < nd; ++d) {
            const int bit = static_cast<int>((gbits >> d) & 1u);
            gamma[static_cast<std::size_t>(d)] = bit;
            if (d < spec.n1) {
                gamma1[static_cast<std::size_t>(d)] = bit;
            } else {
                gamma2[static_cast<std::size_t>(d - spec.n1)] = bit;
                if (bit == 1) g2_nonzero = true;
            }
        }
        const std::vector<std::vector<int>> k_grid = k_product_grid(spec, g2_nonzero);

        const std::size_t n_points = lambdas.size() * xi_grid.size() * k_grid.size();
        std::atomic<bool> nonfinite{false};
        std::mutex sup_mtx;
        double sup = 0.0;
        parallel_for_chunked(n_points, 256, [&](std::size_t lo, std::size_t hi) {
            double local = 0.0;
            for (std::size_t idx = lo; idx < hi; ++idx) {
                cx lambda = lambdas[idx / (xi_grid.size() * k_grid.size())];
                const std::size_t rem = idx % (xi_grid.size() * k_grid.size());
                const auto& xi = xi_grid[rem / k_grid.size()];
                const auto& k = k_grid[rem % k_grid.size()];
                if (spec.lambda_relative) {
                    double zsq = 0.0;
                    for (const double x : xi) zsq += x * x;
                    for (const int kk : k) zsq += static_cast<double>(kk) * kk;
                    lambda *= zsq;
                }
                const Mat3 w =
                    weighted_derivative(eval, lambda, xi, k, gamma1, gamma2, spec.fd_rel_step);
                const double v = op2_norm(w);
                if (!std::isfinite(v)) {
                    nonfinite.store(true);
                    return;
                }
                local = std::max(local, v);
            }
            std::lock_guard<std::mutex> lock(sup_mtx);
            sup = std::max(sup, local);
        });
        if (nonfinite.load()) {
            throw NonFiniteValue("michlin_sweep: symbol evaluation overflowed near the singular set");
        }
        table.rows.push_back({std::move(gamma), sup});
    }
    return table;
}

MichlinStability michlin_stability(const MichlinSweepSpec& spec, const SymbolEval& eval,
                                   std::span<const cx> refined_lambdas) {
    MichlinStability out;
    out.base = michlin_sweep(spec, eval);
    MichlinSweepSpec fine = spec;
    fine.xi_points *= 2;
    fine.k_max *= 2;
    fine.lambdas.assign(refined_lambdas.begin(), refined_lambdas.end());
    out.refined = michlin_sweep(fine, eval);
    out.refined.grid_level = 1;
    out.stable = true;
    out.worst_ratio = 1.0;
    for (std::size_t i = 0; i < out.base.rows.size(); ++i) {
        const double a = out.base.rows[i].sup;
        const double b = out.refined.rows[i].sup;
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        const double ratio = (lo == 0.0) ? (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                                         : hi / lo;
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        if (!(ratio < 2.0)) out.stable = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// R-bounds.
// ---------------------------------------------------------------------------

namespace {

double rademacher_lp_norm(const std::vector<Vec3>& summands, double p, int n_draws,
                          const CounterRng& rng) {
    double acc = 0.0;
    for (int d = 0; d < n_draws; ++d) {
        Vec3 s{};
        for (std::size_t j = 0; j < summands.size(); ++j) {
            const double eps =
                static_cast<double>(rng.sign(j, static_cast<std::uint64_t>(d)));
            s[0] += eps * summands[j][0];
            s[1] += eps * summands[j][1];
            s[2] += eps * summands[j][2];
        }
        acc += std::pow(norm2(s), p);
    }
    return std::pow(acc / n_draws, 1.0 / p);
}

}  // namespace

double rbound_estimate(const RBoundSample& sample, double p) {
    const std::size_t n = sample.operators.size();
    if (n == 0 || sample.vectors.size() != n) {
        throw ShapeMismatch("rbound_estimate: need N >= 1 operators with matching vectors");
    }
    if (!(p >= 1.0)) {
        throw PreconditionViolated("rbound_estimate: p >= 1 required");
    }
    if (n == 1) {
        const double den = norm2(sample.vectors[0]);
        if (den < 1e-14) {
            throw DegenerateDenominator("rbound_estimate: ||x_1|| below 1e-14");
        }
        return norm2(sample.operators[0] * sample.vectors[0]) / den;
    }
    if (sample.n_draws < 100) {
        throw PreconditionViolated("rbound_estimate: n_draws >= 100 required");
    }
    std::vector<Vec3> mapped(n);
    for (std::size_t j = 0; j < n; ++j) {
        mapped[j] = sample.operators[j] * sample.vectors[j];
    }
    const CounterRng rng(sample.seed);
    const double den = rademacher_lp_norm(sample.vectors, p, sample.n_draws, rng);
    if (den < 1e-14) {
        throw DegenerateDenominator("rbound_estimate: Rademacher denominator below 1e-14");
    }
    return rademacher_lp_norm(mapped, p, sample.n_draws, rng) / den;
}

std::vector<double> rbound_nested_scan(const RBoundSample& sample, double p) {
    std::vector<double> out;
    double running = 0.0;
    for (std::size_t m = 1; m <= sample.operators.size(); ++m) {
        RBoundSample prefix;
        prefix.operators.assign(sample.operators.begin(),
                                sample.operators.begin() + static_cast<std::ptrdiff_t>(m));
        prefix.vectors.assign(sample.vectors.begin(),
                              sample.vectors.begin() + static_cast<std::ptrdiff_t>(m));
        prefix.n_draws = sample.n_draws;
        prefix.seed = sample.seed;
        running = std::max(running, rbound_estimate(prefix, p));
        out.push_back(running);
    }
    return out;
}

KahaneResult kahane_check(std::span<const cx> a, std::span<const cx> b,
                          std::span<const Vec3> x, double p, int n_draws,
                          std::uint64_t seed) {
    const std::size_t n = x.size();
    if (a.size() != n || b.size() != n || n == 0) {
        throw ShapeMismatch("kahane_check: a, b, x must share a positive length");
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(a[j]) > std::abs(b[j]) * (1.0 + 1e-12)) {
            throw PreconditionViolated("kahane_check: |a_j| <= |b_j| required");
        }
    }
    if (n_draws < 1) {
        throw PreconditionViolated("kahane_check: n_draws >= 1 required");
    }
    std::vector<Vec3> ya(n), yb(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < 3; ++c) {
            ya[j][c] = a[j] * x[j][c];
            yb[j][c] = b[j] * x[j][c];
        }
    }
    const CounterRng rng(seed);
    KahaneResult res{};
    res.lhs = rademacher_lp_norm(ya, p, n_draws, rng);
    res.rhs = rademacher_lp_norm(yb, p, n_draws, rng);
    if (res.rhs < 1e-14) {
        throw DegenerateDenominator("kahane_check: right-hand side below 1e-14");
    }
    res.ratio = res.lhs / res.rhs;
    res.ok = res.lhs <= 2.0 * res.rhs * 1.05;
    return res;
}

}  // namespace thermoplate::multiplier
