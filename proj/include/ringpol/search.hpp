// Parameter sweeps and root finding for polarizing configurations.
//
// A sweep walks one variable (ka, so_ratio or gamma2) over a uniform grid,
// optionally re-deriving the free junction angle from a geometry family at
// every sample, and records transmissions plus the polarization-condition
// residuals of both cases. Seed values quoted to a few decimals only
// bracket a root, so grid minima are treated as seeds: a golden-section
// pass narrows the dip and a damped Gauss-Newton polish over (so_ratio, ka)
// then drives the full four-component condition residual to machine zero.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polarization.hpp"
#include "ring.hpp"
#include "transport.hpp"

namespace ringpol::search {

enum class SweepVariable { ka, so_ratio, gamma2 };

inline std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::ka: return "ka";
        case SweepVariable::so_ratio: return "so_ratio";
        case SweepVariable::gamma2: return "gamma2";
    }
    return "";
}

inline SweepVariable sweep_variable_from_string(const std::string& s) {
    if (s == "ka") return SweepVariable::ka;
    if (s == "so_ratio") return SweepVariable::so_ratio;
    if (s == "gamma2") return SweepVariable::gamma2;
    throw std::invalid_argument("sweep variable must be one of: ka, so_ratio, gamma2");
}

struct FamilyRule {
    polar::FamilyAnchor anchor{polar::FamilyAnchor::fixed_gamma2};
    int index{0};
    int sign{-1};
};

struct GeometryRule {
    bool use_family{false};
    FamilyRule family{};
};

struct SweepSpec {
    SweepVariable variable{SweepVariable::ka};
    double lo{}, hi{};
    int samples{2000};
    GeometryRule rule{};
    polar::PolarizationCase case_tag{polar::PolarizationCase::a};
};

inline void validate(const SweepSpec& s) {
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || !(s.lo < s.hi))
        throw std::invalid_argument("sweep range must be finite with lo < hi");
    if (s.samples < 2) throw std::invalid_argument("sweep needs at least 2 samples");
}

// ---------------------------------------------------------------------------
// Sample resolution
// ---------------------------------------------------------------------------

struct ResolvedSample {
    RingParams params{};
    RingGeometry geom{};
};

// Substitute the swept value and apply the geometry rule. Empty when the
// sample has no valid geometry (family angle out of range, bad ordering).
inline std::optional<ResolvedSample> resolve_sample(const SweepSpec& spec,
                                                    const RingGeometry& base_geom,
                                                    const RingParams& base_params, double x) {
    ResolvedSample r;
    r.params = base_params;
    r.geom = base_geom;
    switch (spec.variable) {
        case SweepVariable::ka: r.params.ka = x; break;
        case SweepVariable::so_ratio: r.params.so_ratio = x; break;
        case SweepVariable::gamma2: r.geom.gamma2 = x; break;
    }
    if (!(r.params.ka > 0.0) || !(r.params.so_ratio >= 0.0)) return std::nullopt;
    if (spec.rule.use_family) {
        const DerivedParams d = derive(r.params);
        const double fixed = (spec.rule.family.anchor == polar::FamilyAnchor::fixed_gamma2)
                                 ? r.geom.gamma2
                                 : r.geom.gamma1;
        const auto fam = polar::geometry_family(fixed, spec.rule.family.anchor,
                                                spec.rule.family.index, spec.rule.family.sign, d.q);
        if (!fam) return std::nullopt;
        r.geom = *fam;
    }
    if (!(0.0 < r.geom.gamma1 && r.geom.gamma1 < r.geom.gamma2 && r.geom.gamma2 < 2.0 * kPi))
        return std::nullopt;
    return r;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    double x{};
    bool valid{};
    double gamma1{}, gamma2{};
    double eta1{}, eta2{}, reflect{};
    double residual_a{}, residual_b{};
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool clipped{};
    double clip_lo{}, clip_hi{};  // actual grid bounds after validity clipping
};

// RINGPOL_THREADS overrides the worker count (1..256); otherwise the
// hardware concurrency is used. Partitioning is static and rows are written
// by index, so results are bit-identical for any thread count.
inline unsigned thread_count() {
    if (const char* env = std::getenv("RINGPOL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 256)
            throw std::invalid_argument("RINGPOL_THREADS must be an integer in [1, 256]");
        return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace detail {

inline SweepRow evaluate_row(const SweepSpec& spec, const RingGeometry& base_geom,
                             const RingParams& base_params, double x) {
    SweepRow row;
    row.x = x;
    row.valid = false;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.gamma1 = row.gamma2 = row.eta1 = row.eta2 = row.reflect = nan;
    row.residual_a = row.residual_b = nan;
    const auto sample = resolve_sample(spec, base_geom, base_params, x);
    if (!sample) return row;
    try {
        const DerivedParams d = derive(sample->params);
        const transport::ScatteringSolution sol = transport::solve_scattering(sample->geom, d);
        row.gamma1 = sample->geom.gamma1;
        row.gamma2 = sample->geom.gamma2;
        row.eta1 = sol.eta[0];
        row.eta2 = sol.eta[1];
        row.reflect = sol.reflect_prob;
        row.residual_a = polar::condition_residual(sample->geom, d, polar::PolarizationCase::a);
        row.residual_b = polar::condition_residual(sample->geom, d, polar::PolarizationCase::b);
        row.valid = true;
    } catch (const resonance_error&) {
        // keep the row, marked invalid: a resonance sample must not kill a sweep
    }
    return row;
}

}  // namespace detail

inline SweepResult sweep(const SweepSpec& spec, const RingGeometry& base_geom,
                         const RingParams& base_params) {
    validate(spec);
    const auto grid_at = [](double lo, double hi, int n, int i) {
        return (i == n - 1) ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    };
    const auto resolvable = [&](double x) {
        return resolve_sample(spec, base_geom, base_params, x).has_value();
    };

    // Clip the range to the contiguous valid region so family sweeps whose
    // requested range overshoots the geometric validity bound still produce
    // a full grid of usable rows.
    double lo = spec.lo, hi = spec.hi;
    bool clipped = false;
    {
        std::vector<int> valid_idx;
        for (int i = 0; i < spec.samples; ++i)
            if (resolvable(grid_at(spec.lo, spec.hi, spec.samples, i))) valid_idx.push_back(i);
        if (valid_idx.empty())
            throw std::invalid_argument("sweep range contains no valid geometry");
        const int first = valid_idx.front(), last = valid_idx.back();
        if (first > 0) {
            double bad = grid_at(spec.lo, spec.hi, spec.samples, first - 1);
            double good = grid_at(spec.lo, spec.hi, spec.samples, first);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (bad + good);
                (resolvable(mid) ? good : bad) = mid;
            }
            lo = good;
            clipped = true;
        }
        if (last < spec.samples - 1) {
            double good = grid_at(spec.lo, spec.hi, spec.samples, last);
            double bad = grid_at(spec.lo, spec.hi, spec.samples, last + 1);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (bad + good);
                (resolvable(mid) ? good : bad) = mid;
            }
            hi = good;
            clipped = true;
        }
    }

    SweepResult res;
    res.clipped = clipped;
    res.clip_lo = lo;
    res.clip_hi = hi;
    res.rows.resize(static_cast<std::size_t>(spec.samples));

    const unsigned nthreads =
        std::min<unsigned>(thread_count(), static_cast<unsigned>(spec.samples));
    std::exception_ptr first_error;
    std::vector<std::thread> workers;
    const auto run_chunk = [&](int begin, int end) {
        try {
            for (int i = begin; i < end; ++i)
                res.rows[static_cast<std::size_t>(i)] = detail::evaluate_row(
                    spec, base_geom, base_params, grid_at(lo, hi, spec.samples, i));
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    };
    if (nthreads <= 1) {
        run_chunk(0, spec.samples);
    } else {
        workers.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) {
            const int begin = static_cast<int>(static_cast<long>(spec.samples) * t / nthreads);
            const int end = static_cast<int>(static_cast<long>(spec.samples) * (t + 1) / nthreads);
            workers.emplace_back(run_chunk, begin, end);
        }
        for (auto& w : workers) w.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return res;
}

// ---------------------------------------------------------------------------
// Root refinement
// ---------------------------------------------------------------------------

namespace detail {

inline double case_residual(const SweepRow& row, polar::PolarizationCase c) {
    return c == polar::PolarizationCase::a ? row.residual_a : row.residual_b;
}

// Golden-section minimization of a unimodal bracket.
template <typename F>
double golden_min(F&& f, double lo, double hi) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Damped Gauss-Newton on the four-component condition residual over
// (so_ratio, ka). Returns the refined parameters; convergence is judged by
// the caller through the residual of the result.
inline RingParams polish_point(const SweepSpec& spec, const RingGeometry& base_geom,
                               const RingParams& start, polar::PolarizationCase c) {
    const auto components = [&](const RingParams& p,
                                std::array<double, 4>& out) -> bool {
        if (!(p.ka > 0.0) || !(p.so_ratio >= 0.0)) return false;
        SweepSpec local = spec;
        local.variable = SweepVariable::ka;  // geometry rule only; x ignored below
        const auto sample = resolve_sample(local, base_geom, p, p.ka);
        if (!sample) return false;
        try {
            out = polar::condition_components(sample->geom, derive(sample->params), c);
        } catch (const resonance_error&) {
            return false;
        }
        return true;
    };
    const auto norm4 = [](const std::array<double, 4>& v) {
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    };

    RingParams p = start;
    std::array<double, 4> f{};
    if (!components(p, f)) return start;
    double fnorm = norm4(f);

    for (int iter = 0; iter < 80 && fnorm > 1e-15; ++iter) {
        double jac[4][2];
        bool ok = true;
        for (int col = 0; col < 2 && ok; ++col) {
            const double v = (col == 0) ? p.so_ratio : p.ka;
            const double h = 1e-7 * std::max(1.0, std::abs(v));
            RingParams pp = p, pm = p;
            (col == 0 ? pp.so_ratio : pp.ka) = v + h;
            (col == 0 ? pm.so_ratio : pm.ka) = v - h;
            std::array<double, 4> fp{}, fm{};
            ok = components(pp, fp) && components(pm, fm);
            for (int k = 0; k < 4 && ok; ++k) jac[k][col] = (fp[k] - fm[k]) / (2.0 * h);
        }
        if (!ok) break;

        // Normal equations of the 4x2 least-squares step.
        double jtj[2][2] = {};
        double jtf[2] = {};
        for (int k = 0; k < 4; ++k) {
            for (int i = 0; i < 2; ++i) {
                jtf[i] += jac[k][i] * f[k];
                for (int j = 0; j < 2; ++j) jtj[i][j] += jac[k][i] * jac[k][j];
            }
        }
        const double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if (std::abs(det) < 1e-300) break;
        double step[2] = {-(jtj[1][1] * jtf[0] - jtj[0][1] * jtf[1]) / det,
                          -(jtj[0][0] * jtf[1] - jtj[1][0] * jtf[0]) / det};

        bool improved = false;
        for (int halving = 0; halving < 30; ++halving) {
            RingParams trial = p;
            trial.so_ratio = std::max(0.0, p.so_ratio + step[0]);
            trial.ka = p.ka + step[1];
            std::array<double, 4> ft{};
            if (components(trial, ft)) {
                const double fnt = norm4(ft);
                if (fnt < fnorm) {
                    p = trial;
                    f = ft;
                    fnorm = fnt;
                    improved = true;
                    break;
                }
            }
            step[0] *= 0.5;
            step[1] *= 0.5;
        }
        if (!improved) break;
    }
    return p;
}

}  // namespace detail

// Grid-scan the case residual, bracket every interior dip, narrow it by
// golden section along the swept variable, then polish in (so_ratio, ka)
// with the geometry rule re-applied at every step. Only minima whose
// polished residual beats `tol` survive; each survivor also has to pass the
// determinant and output-spinor checks.
inline std::vector<polar::PolarizationPoint> find_polarization_points(
    const SweepSpec& spec, const RingGeometry& base_geom, const RingParams& base_params,
    double tol = 1e-8) {
    const SweepResult sw = sweep(spec, base_geom, base_params);
    const auto& rows = sw.rows;

    const auto residual_at = [&](double x) {
        const auto sample = resolve_sample(spec, base_geom, base_params, x);
        if (!sample) return std::numeric_limits<double>::infinity();
        try {
            return polar::condition_residual(sample->geom, derive(sample->params), spec.case_tag);
        } catch (const resonance_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<polar::PolarizationPoint> points;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        if (!rows[i - 1].valid || !rows[i].valid || !rows[i + 1].valid) continue;
        const double rm = detail::case_residual(rows[i - 1], spec.case_tag);
        const double r0 = detail::case_residual(rows[i], spec.case_tag);
        const double rp = detail::case_residual(rows[i + 1], spec.case_tag);
        if (!(r0 < rm && r0 < rp)) continue;

        const double x_star = detail::golden_min(residual_at, rows[i - 1].x, rows[i + 1].x);
        auto seed = resolve_sample(spec, base_geom, base_params, x_star);
        if (!seed) continue;
        RingGeometry polish_geom = base_geom;
        if (spec.variable == SweepVariable::gamma2) polish_geom.gamma2 = x_star;
        const RingParams polished =
            detail::polish_point(spec, polish_geom, seed->params, spec.case_tag);
        auto refined = resolve_sample(spec, base_geom, polished,
                                      spec.variable == SweepVariable::gamma2 ? x_star
                                      : spec.variable == SweepVariable::ka   ? polished.ka
                                                                             : polished.so_ratio);
        if (!refined) continue;
        polar::PolarizationPoint pt =
            polar::evaluate_point(spec.case_tag, refined->params, refined->geom);
        if (!(pt.residual < tol)) continue;
        if (pt.ndet1 > 1e-8 || pt.ndet2 > 1e-8) continue;
        if (pt.fidelity1 < 1.0 - 1e-8 || pt.fidelity2 < 1.0 - 1e-8) continue;

        bool duplicate = false;
        for (const auto& prev : points) {
            if (std::abs(prev.params.ka - pt.params.ka) < 1e-7 &&
                std::abs(prev.params.so_ratio - pt.params.so_ratio) < 1e-7 &&
                std::abs(prev.geom.gamma1 - pt.geom.gamma1) < 1e-7 &&
                std::abs(prev.geom.gamma2 - pt.geom.gamma2) < 1e-7) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) points.push_back(pt);
    }
    return points;
}

// Subset of points with near-unit total transmission, best first.
inline std::vector<polar::PolarizationPoint> find_reflectionless_points(
    const std::vector<polar::PolarizationPoint>& points, double eps = 1e-3) {
    std::vector<polar::PolarizationPoint> out;
    for (const auto& p : points)
        if (1.0 - (p.eta1 + p.eta2) < eps) out.push_back(p);
    std::stable_sort(out.begin(), out.end(),
                     [](const polar::PolarizationPoint& a, const polar::PolarizationPoint& b) {
                         return (1.0 - a.eta1 - a.eta2) < (1.0 - b.eta1 - b.eta2);
                     });
    return out;
}

}  // namespace ringpol::search
