#include "gmtlab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace gmtlab {

namespace {

double reach_factor(Profile p, int dim) { return p == Profile::tensor_hat ? std::sqrt(static_cast<double>(dim)) : 1.0; }

double bump_value(Profile p, int axis, int dim, const double* y, double r, const double* x) {
    if (p == Profile::tensor_hat) {
        double v = 1.0;
        for (int k = 0; k < dim; ++k) {
            const double t = 1.0 - std::fabs(x[k] - y[k]) / r;
            if (t <= 0.0) return 0.0;
            v *= t;
        }
        return v;
    }
    const double t = 1.0 - distance(x, y, dim) / r;
    if (t <= 0.0) return 0.0;
    return p == Profile::radial_hat ? t : t * (x[axis] - y[axis]) / r;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t j) {
    const std::uint64_t data[2] = {seed, j};
    return fnv1a(data, sizeof data);
}

std::uint64_t cube_seed(std::uint64_t seed, const CubeAddress& q) {
    std::uint64_t h = fnv1a(&seed, sizeof seed);
    h = fnv1a(&q.level, sizeof q.level, h);
    return fnv1a(q.coords.data(), sizeof(std::int64_t) * static_cast<std::size_t>(q.dim), h);
}

double bump_mass(const DiscreteMeasure& mu, Profile p, int axis, const double* y, double r) {
    CompensatedSum acc;
    for (std::size_t i : mu.index().ball(y, bump_reach(p, mu.dim(), r)))
        acc.add(bump_value(p, axis, mu.dim(), y, r, mu.point(i)) * mu.weight(i));
    return acc.value();
}

std::vector<std::size_t> sorted_by_coordinates(const DiscreteMeasure& mu, std::vector<std::size_t> idx) {
    const int d = mu.dim();
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(mu.point(a), mu.point(a) + d, mu.point(b), mu.point(b) + d);
    });
    return idx;
}

void check_profile(Profile p, int axis, int dim) {
    if (p == Profile::coordinate_modulated && (axis < 0 || axis >= dim))
        throw InvalidArgument("modulation axis out of range");
}

}  // namespace

std::string to_string(Profile p) {
    switch (p) {
        case Profile::radial_hat: return "radial_hat";
        case Profile::tensor_hat: return "tensor_hat";
        case Profile::coordinate_modulated: return "coordinate_modulated";
    }
    return "?";
}

Profile profile_from_string(const std::string& name) {
    if (name == "radial_hat") return Profile::radial_hat;
    if (name == "tensor_hat") return Profile::tensor_hat;
    if (name == "coordinate_modulated") return Profile::coordinate_modulated;
    throw InvalidArgument("unknown profile '" + name + "'");
}

double bump_lipschitz(Profile p, int dim, double r) {
    switch (p) {
        case Profile::radial_hat: return 1.0 / r;
        case Profile::tensor_hat: return std::sqrt(static_cast<double>(dim)) / r;
        case Profile::coordinate_modulated: return 2.0 / r;
    }
    return 0.0;
}

double bump_reach(Profile p, int dim, double r) { return reach_factor(p, dim) * r; }

double TestFunction::operator()(const double* x) const {
    double v = 0.0;
    if (c1 != 0.0) v += c1 * bump_value(profile, axis, dim, bump1.data(), bump_radius, x);
    if (c2 != 0.0) v -= c2 * bump_value(profile, axis, dim, bump2.data(), bump_radius, x);
    return v;
}

std::vector<std::size_t> TestFunction::support_indices(const DiscreteMeasure& mu) const {
    if (bump_radius <= 0.0) return {};
    const double reach = bump_reach(profile, dim, bump_radius);
    std::vector<std::size_t> out;
    if (c1 != 0.0) out = mu.index().ball(bump1.data(), reach);
    if (c2 != 0.0) {
        const auto b = mu.index().ball(bump2.data(), reach);
        std::vector<std::size_t> merged;
        std::merge(out.begin(), out.end(), b.begin(), b.end(), std::back_inserter(merged));
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        out = std::move(merged);
    }
    return out;
}

std::vector<double> TestFunction::on_support(const DiscreteMeasure& mu) const {
    std::vector<double> out(mu.size(), 0.0);
    for (std::size_t i : support_indices(mu)) out[i] = (*this)(mu.point(i));
    return out;
}

TestFunctionAudit audit_test_function(const DiscreteMeasure& mu, const TestFunction& f, std::size_t max_pairs,
                                      std::uint64_t seed) {
    TestFunctionAudit a;
    const int d = f.dim;
    const double reach = bump_reach(f.profile, d, f.bump_radius);
    const double tol = 1e-12 * f.radius;
    a.support_ok = distance(f.bump1.data(), f.center.data(), d) + reach <= f.radius + tol &&
                   distance(f.bump2.data(), f.center.data(), d) + reach <= f.radius + tol &&
                   distance(f.bump1.data(), f.bump2.data(), d) >= 2.0 * reach - tol;
    const double analytic = std::max(std::fabs(f.c1), std::fabs(f.c2)) * bump_lipschitz(f.profile, d, f.bump_radius);
    a.support_ok = a.support_ok && (f.bump_radius > 0.0 || (f.c1 == 0.0 && f.c2 == 0.0));
    const bool analytic_ok = f.bump_radius <= 0.0 || analytic <= f.lip_bound * (1 + 1e-12);

    const std::vector<std::size_t> inner = f.support_indices(mu);
    CompensatedSum mean;
    std::vector<double> vin(inner.size());
    for (std::size_t t = 0; t < inner.size(); ++t) {
        vin[t] = f(mu.point(inner[t]));
        mean.add(vin[t] * mu.weight(inner[t]));
    }
    a.mean = mean.value();
    a.mean_ok = std::fabs(a.mean) <= 1e-12 * mu.total_mass();

    // Pairs with at least one point where psi can be nonzero.
    const std::vector<std::size_t> ball = mu.index().ball(f.center.data(), f.radius);
    auto quotient = [&](std::size_t i, double vi, std::size_t j) {
        if (i == j) return 0.0;
        const double vj = f(mu.point(j));
        return std::fabs(vi - vj) / distance(mu.point(i), mu.point(j), d);
    };
    if (inner.size() * ball.size() <= max_pairs) {
        for (std::size_t t = 0; t < inner.size(); ++t)
            for (std::size_t j : ball) a.max_quotient = std::max(a.max_quotient, quotient(inner[t], vin[t], j));
        a.pairs = inner.size() * ball.size();
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pi(0, inner.size() - 1), pj(0, ball.size() - 1);
        for (std::size_t p = 0; p < max_pairs; ++p) {
            const std::size_t t = pi(rng);
            a.max_quotient = std::max(a.max_quotient, quotient(inner[t], vin[t], ball[pj(rng)]));
        }
        a.pairs = max_pairs;
    }
    a.lipschitz_ok = analytic_ok && a.max_quotient <= f.lip_bound * (1 + 1e-12);
    return a;
}

TestFunction make_test_function(const DiscreteMeasure& mu, std::span<const double> center, double side, double A,
                                Profile profile, int axis, std::span<const double> y1, std::span<const double> y2,
                                double r) {
    const int d = mu.dim();
    if (center.size() != static_cast<std::size_t>(d) || y1.size() != center.size() || y2.size() != center.size())
        throw InvalidArgument("test function points must have the measure's dimension");
    if (!(side > 0.0) || !(A > 0.0) || !(r > 0.0)) throw InvalidArgument("side, A and r must be positive");
    check_profile(profile, axis, d);
    TestFunction f;
    f.profile = profile;
    f.axis = axis;
    f.dim = d;
    f.center.assign(center.begin(), center.end());
    f.radius = A * side;
    f.side = side;
    f.bump1.assign(y1.begin(), y1.end());
    f.bump2.assign(y2.begin(), y2.end());
    f.bump_radius = r;
    const double reach = bump_reach(profile, d, r);
    if (distance(y1.data(), y2.data(), d) < 2.0 * reach) throw InvalidArgument("bumps overlap");
    if (distance(y1.data(), center.data(), d) + reach > f.radius || distance(y2.data(), center.data(), d) + reach > f.radius)
        throw InvalidArgument("bumps leave the ball B(x_Q, A l(Q))");

    const double m1 = bump_mass(mu, profile, axis, y1.data(), r);
    const double m2 = bump_mass(mu, profile, axis, y2.data(), r);
    if (m1 != 0.0 && m2 != 0.0) {
        f.c1 = m2;
        f.c2 = m1;
    } else {
        // One constraint, at most one charged bump: keep only the uncharged one.
        f.degenerate = true;
        f.c1 = m1 == 0.0 ? 1.0 : 0.0;
        f.c2 = m1 == 0.0 ? (m2 == 0.0 ? 1.0 : 0.0) : 1.0;
    }
    const double scale = (1.0 / side) / (std::max(std::fabs(f.c1), std::fabs(f.c2)) * bump_lipschitz(profile, d, r));
    f.c1 *= scale;
    f.c2 *= scale;
    f.lip_bound = 1.0 / side;
    if (!audit_test_function(mu, f, 512).ok()) throw Error("test function failed its audit");
    return f;
}

TestFunction make_test_function(const DiscreteMeasure& mu, const DyadicLattice& lattice, const CubeAddress& q,
                                double A, Profile profile, int axis, std::uint64_t seed, int max_attempts) {
    const int d = mu.dim();
    if (lattice.dim() != d) throw InvalidArgument("lattice and measure dimensions differ");
    if (!(A > 100.0 * std::sqrt(static_cast<double>(d)))) throw InvalidArgument("A must exceed 100 sqrt(d)");
    check_profile(profile, axis, d);
    const std::vector<double> xq = lattice.center(q);
    const double side = DyadicLattice::side(q.level);
    const double big = A * side;
    if (!(ball_mass(mu, xq.data(), big) > 0.0)) throw InvalidArgument("mu(B(x_Q, A l(Q))) = 0");

    std::vector<std::size_t> near = mu.index().ball(xq.data(), 6.0 * std::sqrt(static_cast<double>(d)) * side);
    if (near.empty()) near = mu.index().ball(xq.data(), 0.5 * big);
    if (near.empty()) near = mu.index().ball(xq.data(), big);
    near = sorted_by_coordinates(mu, std::move(near));

    const double rf = reach_factor(profile, d);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> expo(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, near.size() - 1);
    std::normal_distribution<double> gauss;
    TestFunction last;
    bool have = false;
    std::vector<double> y2(d);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        double r = side * std::exp2(expo(rng));
        const std::size_t i1 = near[pick(rng)];
        const double* y1 = mu.point(i1);
        if (near.size() >= 2) {
            std::size_t i2 = i1;
            while (i2 == i1) i2 = near[pick(rng)];
            std::copy(mu.point(i2), mu.point(i2) + d, y2.begin());
        } else {
            double n2 = 0.0;
            std::vector<double> v(d);
            for (double& t : v) {
                t = gauss(rng);
                n2 += t * t;
            }
            const double len = 2.5 * rf * r / std::sqrt(n2);
            for (int k = 0; k < d; ++k) y2[k] = y1[k] + v[k] * len;
        }
        const double shrink = 1.0 - 1e-9;
        r = std::min(r, distance(y1, y2.data(), d) / (2.0 * rf) * shrink);
        r = std::min(r, (big - distance(y1, xq.data(), d)) / rf * shrink);
        r = std::min(r, (big - distance(y2.data(), xq.data(), d)) / rf * shrink);
        if (!(r > side / 64.0)) continue;
        last = make_test_function(mu, xq, side, A, profile, axis, std::span<const double>(y1, d), y2, r);
        have = true;
        if (!last.degenerate) return last;
    }
    if (have) return last;
    TestFunction zero;
    zero.profile = profile;
    zero.axis = axis;
    zero.dim = d;
    zero.center = xq;
    zero.radius = big;
    zero.side = side;
    zero.bump1 = zero.bump2 = xq;
    zero.lip_bound = 1.0 / side;
    zero.degenerate = true;
    return zero;
}

std::vector<TestFunction> make_dictionary(const DiscreteMeasure& mu, const DyadicLattice& lattice,
                                          const CubeAddress& q, double A, std::size_t n, std::uint64_t seed) {
    const int d = mu.dim();
    std::vector<TestFunction> out(n);
    parallel_for(n, [&](std::size_t j) {
        const std::size_t kind = j % static_cast<std::size_t>(2 + d);
        const Profile p = kind == 0 ? Profile::radial_hat : kind == 1 ? Profile::tensor_hat : Profile::coordinate_modulated;
        const int axis = kind >= 2 ? static_cast<int>(kind - 2) : 0;
        out[j] = make_test_function(mu, lattice, q, A, p, axis, mix_seed(seed, j));
    });
    return out;
}

namespace {

nlohmann::json to_json(const TestFunction& f) {
    return {{"profile", to_string(f.profile)},
            {"axis", f.axis},
            {"center", f.center},
            {"radius", f.radius},
            {"side", f.side},
            {"bump_centers", {f.bump1, f.bump2}},
            {"bump_radius", f.bump_radius},
            {"coefficients", {f.c1, f.c2}},
            {"lip_bound", f.lip_bound},
            {"degenerate", f.degenerate}};
}

}  // namespace

std::string test_function_json(const TestFunction& f) { return to_json(f).dump(); }

std::string dictionary_json(const std::vector<TestFunction>& dictionary) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : dictionary) arr.push_back(to_json(f));
    return arr.dump();
}

OscillationResult oscillation_lower(const DiscreteMeasure& mu, const PairingField& field,
                                    const std::vector<TestFunction>& dictionary) {
    if (dictionary.empty()) throw InvalidArgument("empty dictionary");
    OscillationResult out;
    out.values.resize(dictionary.size());
    parallel_for(dictionary.size(), [&](std::size_t j) {
        const std::vector<double> f = dictionary[j].on_support(mu);
        out.values[j] = norm(field.pair(f));
    });
    for (std::size_t j = 0; j < dictionary.size(); ++j)
        if (out.values[j] > out.value) {
            out.value = out.values[j];
            out.best = j;
        }
    return out;
}

OscillationResult oscillation_lower(const DiscreteMeasure& mu, const KernelSpec& K,
                                    const std::vector<TestFunction>& dictionary) {
    if (dictionary.empty()) throw InvalidArgument("empty dictionary");
    const std::vector<double> one(mu.size(), 1.0);
    return oscillation_lower(mu, PairingField(mu, K, one), dictionary);
}

ThetaRatio theta_density_ratio(const DiscreteMeasure& mu, const PairingField& field, double s,
                               const DyadicLattice& lattice, const CubeAddress& q,
                               const std::vector<TestFunction>& dictionary) {
    ThetaRatio out;
    const CubeDensity dq = density(mu, lattice, q, s);
    out.mass = dq.mass;
    out.density = dq.density;
    out.theta = oscillation_lower(mu, field, dictionary).value;
    if (!(dq.mass > 0.0)) {
        out.vacuous = true;
        return out;
    }
    out.ratio = out.theta / (dq.density * dq.mass);
    return out;
}

ThetaRatio theta_density_ratio(const DiscreteMeasure& mu, const KernelSpec& K, const DyadicLattice& lattice,
                               const CubeAddress& q, const std::vector<TestFunction>& dictionary) {
    const std::vector<double> one(mu.size(), 1.0);
    return theta_density_ratio(mu, PairingField(mu, K, one), K.s(), lattice, q, dictionary);
}

std::vector<ThetaRow> theta_table(const DiscreteMeasure& mu, const KernelSpec& K, const DyadicLattice& lattice,
                                  const std::vector<CubeAddress>& cubes, double A, std::size_t n,
                                  std::uint64_t seed) {
    const std::vector<double> one(mu.size(), 1.0);
    const PairingField field(mu, K, one);
    std::vector<ThetaRow> rows(cubes.size());
    for (std::size_t c = 0; c < cubes.size(); ++c) {
        rows[c].cube = cubes[c];
        const CubeAddress& q = cubes[c];
        const CubeDensity dq = density(mu, lattice, q, K.s());
        if (!(dq.mass > 0.0)) {
            rows[c].ratio.vacuous = true;
            continue;
        }
        const auto dict = make_dictionary(mu, lattice, q, A, n, cube_seed(seed, q));
        rows[c].ratio = theta_density_ratio(mu, field, K.s(), lattice, q, dict);
    }
    return rows;
}

std::string theta_csv(const std::vector<ThetaRow>& rows, int dim) {
    std::ostringstream os;
    os.precision(17);
    os << "level";
    for (int k = 0; k < dim; ++k) os << ",c" << k;
    os << ",mass_3Q,density,theta_lower,ratio,vacuous\n";
    for (const auto& r : rows) {
        os << r.cube.level;
        for (int k = 0; k < dim; ++k) os << ',' << r.cube.coords[k];
        os << ',' << r.ratio.mass << ',' << r.ratio.density << ',' << r.ratio.theta << ',' << r.ratio.ratio << ','
           << (r.ratio.vacuous ? 1 : 0) << '\n';
    }
    return os.str();
}

RieszSystem build_riesz_system(const DiscreteMeasure& mu, const DyadicLattice& lattice, double A,
                               std::uint64_t seed, Profile profile) {
    RieszSystem sys;
    sys.A = A;
    if (mu.empty()) return sys;
    const DensityTable table = populated_cubes(mu, lattice, static_cast<double>(mu.dim()));
    const std::size_t n = table.size();
    sys.cubes = table.cubes();
    sys.psi.resize(n);
    sys.rho.resize(n);
    sys.inner_mass.resize(n);
    sys.psi_norm2.resize(n);
    sys.index.resize(n);
    sys.values.resize(n);
    parallel_for(n, [&](std::size_t c) {
        const CubeAddress& q = sys.cubes[c];
        const std::vector<double> xq = lattice.center(q);
        const double side = DyadicLattice::side(q.level);
        sys.psi[c] = make_test_function(mu, lattice, q, A, profile, 0, cube_seed(seed, q), 16);
        sys.rho[c] = ball_mass(mu, xq.data(), 3.0 * A * side);
        sys.inner_mass[c] = ball_mass(mu, xq.data(), A * side);
        sys.index[c] = sys.psi[c].support_indices(mu);
        CompensatedSum n2;
        sys.values[c].reserve(sys.index[c].size());
        for (std::size_t i : sys.index[c]) {
            const double v = sys.psi[c](mu.point(i));
            sys.values[c].push_back(v);
            n2.add(v * v * mu.weight(i));
        }
        sys.psi_norm2[c] = n2.value();
    });
    return sys;
}

std::vector<std::vector<double>> riesz_samples(const DiscreteMeasure& mu, std::size_t m, std::uint64_t seed) {
    const int d = mu.dim();
    const std::size_t n = mu.size();
    std::vector<std::vector<double>> out;
    out.emplace_back(n, 1.0);
    for (int k = 0; k < d; ++k) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = mu.point(i)[k];
        out.push_back(std::move(f));
    }
    const double lo = n >= 2 ? 1.0 / mu.diameter() : 1.0;
    const double hi = n >= 2 ? 1.0 / mu.min_spacing() : 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss;
    for (std::size_t t = 0; t < m; ++t) {
        std::vector<double> w(d);
        double n2 = 0.0;
        for (double& x : w) {
            x = gauss(rng);
            n2 += x * x;
        }
        const double mag = std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
        for (double& x : w) x *= mag / std::sqrt(n2);
        const double phase = 2.0 * std::numbers::pi * u(rng);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) {
            double dot = phase;
            for (int k = 0; k < d; ++k) dot += w[k] * mu.point(i)[k];
            f[i] = std::cos(dot);
        }
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

double inner_with(const DiscreteMeasure& mu, const RieszSystem& sys, std::size_t c, std::span<const double> f) {
    CompensatedSum acc;
    for (std::size_t t = 0; t < sys.index[c].size(); ++t) {
        const std::size_t i = sys.index[c][t];
        acc.add(f[i] * sys.values[c][t] * mu.weight(i));
    }
    return acc.value();
}

double l2_norm2(const DiscreteMeasure& mu, std::span<const double> f) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < mu.size(); ++i) acc.add(f[i] * f[i] * mu.weight(i));
    return acc.value();
}

}  // namespace

RieszReport riesz_system_constant(const DiscreteMeasure& mu, const RieszSystem& system,
                                  const std::vector<std::vector<double>>& samples) {
    RieszReport rep;
    rep.cubes = system.cubes.size();
    for (const auto& f : samples)
        if (f.size() != mu.size()) throw InvalidArgument("sample length differs from the number of points");
    const double a2 = 4.0 * system.A * system.A;
    for (std::size_t c = 0; c < rep.cubes; ++c)
        if (system.psi_norm2[c] > a2 * system.inner_mass[c] * (1 + 1e-12)) ++rep.sup_bound_violations;

    rep.ratios.assign(samples.size(), 0.0);
    std::vector<std::size_t> cs(samples.size(), 0);
    parallel_for(samples.size(), [&](std::size_t j) {
        const double f2 = l2_norm2(mu, samples[j]);
        if (!(f2 > 0.0)) return;
        CompensatedSum lhs;
        for (std::size_t c = 0; c < rep.cubes; ++c) {
            if (!(system.rho[c] > 0.0)) continue;
            const double ip = inner_with(mu, system, c, samples[j]);
            if (ip * ip > f2 * system.psi_norm2[c] * (1 + 1e-10)) ++cs[j];
            lhs.add(ip * ip / system.rho[c]);
        }
        rep.ratios[j] = lhs.value() / f2;
    });
    for (std::size_t j = 0; j < samples.size(); ++j) {
        rep.cs_violations += cs[j];
        if (rep.ratios[j] > rep.constant) {
            rep.constant = rep.ratios[j];
            rep.argmax = j;
        }
    }
    return rep;
}

std::vector<double> riesz_synthesis(const DiscreteMeasure& mu, const RieszSystem& system,
                                    std::span<const double> a) {
    if (a.size() != system.cubes.size()) throw InvalidArgument("one coefficient per cube expected");
    std::vector<CompensatedSum> acc(mu.size());
    for (std::size_t c = 0; c < a.size(); ++c) {
        if (a[c] == 0.0 || !(system.rho[c] > 0.0)) continue;
        const double k = a[c] / std::sqrt(system.rho[c]);
        for (std::size_t t = 0; t < system.index[c].size(); ++t) acc[system.index[c][t]].add(k * system.values[c][t]);
    }
    std::vector<double> f(mu.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = acc[i].value();
    return f;
}

double dual_riesz_check(const DiscreteMeasure& mu, const RieszSystem& system, std::span<const double> a) {
    CompensatedSum a2;
    for (double x : a) a2.add(x * x);
    if (!(a2.value() > 0.0)) return 0.0;
    return l2_norm2(mu, riesz_synthesis(mu, system, a)) / a2.value();
}

double riesz_gram_norm(const DiscreteMeasure& mu, const RieszSystem& system, double rtol, int max_iterations) {
    const std::size_t n = system.cubes.size();
    if (n == 0) return 0.0;
    std::vector<double> a(n);
    for (std::size_t c = 0; c < n; ++c) a[c] = 1.0 + 0.25 * std::sin(static_cast<double>(c) + 1.0);
    double prev = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        const double an = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
        if (!(an > 0.0)) return 0.0;
        for (double& x : a) x /= an;
        const std::vector<double> f = riesz_synthesis(mu, system, a);
        const double lambda = l2_norm2(mu, f);  // Rayleigh quotient, a unit
        for (std::size_t c = 0; c < n; ++c)
            a[c] = system.rho[c] > 0.0 ? inner_with(mu, system, c, f) / std::sqrt(system.rho[c]) : 0.0;
        if (it > 0 && std::fabs(lambda - prev) <= rtol * lambda) return lambda;
        prev = lambda;
    }
    throw ConvergenceError("Gram power iteration did not converge", 0.0);
}

std::string riesz_csv(const RieszSystem& system, int dim) {
    std::ostringstream os;
    os.precision(17);
    os << "level";
    for (int k = 0; k < dim; ++k) os << ",c" << k;
    os << ",rho,inner_mass,psi_norm2,degenerate\n";
    for (std::size_t c = 0; c < system.cubes.size(); ++c) {
        os << system.cubes[c].level;
        for (int k = 0; k < dim; ++k) os << ',' << system.cubes[c].coords[k];
        os << ',' << system.rho[c] << ',' << system.inner_mass[c] << ',' << system.psi_norm2[c] << ','
           << (system.psi[c].degenerate ? 1 : 0) << '\n';
    }
    return os.str();
}

namespace {

// Integers c in R^{dim-k} with |c - u|^2 < rem2, coordinates k.. only.
std::size_t count_lattice(const double* u, int k, int dim, double rem2) {
    if (!(rem2 > 0.0)) return 0;
    const double rho = std::sqrt(rem2);
    const double lo = std::floor(u[k] - rho), hi = std::ceil(u[k] + rho);
    if (k == dim - 1) return static_cast<std::size_t>(std::max(0.0, hi - lo - 1.0));
    std::size_t total = 0;
    for (double c = lo + 1.0; c < hi; c += 1.0) {
        const double t = c - u[k];
        total += count_lattice(u, k + 1, dim, rem2 - t * t);
    }
    return total;
}

}  // namespace

std::size_t overlap_count_at(const DyadicLattice& lattice, const double* y, int level, double A) {
    const int d = lattice.dim();
    const double side = DyadicLattice::side(level);
    std::vector<double> u(d);
    for (int k = 0; k < d; ++k) u[k] = (y[k] - lattice.offset()[k]) / side - 0.5;
    return count_lattice(u.data(), 0, d, A * A);
}

OverlapReport overlap_count(const DiscreteMeasure& mu, const DyadicLattice& lattice, double A) {
    if (!(A > 0.0)) throw InvalidArgument("A must be positive");
    const int d = lattice.dim();
    OverlapReport rep;
    const double radius = A + 0.5 * std::sqrt(static_cast<double>(d));
    rep.bound = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(radius, d);
    const int levels = lattice.k_max() - lattice.k_min() + 1;
    std::vector<std::size_t> best(mu.size(), 0);
    std::vector<int> best_level(mu.size(), lattice.k_min());
    parallel_for(mu.size(), [&](std::size_t i) {
        for (int l = 0; l < levels; ++l) {
            const std::size_t c = overlap_count_at(lattice, mu.point(i), lattice.k_min() + l, A);
            if (c > best[i]) {
                best[i] = c;
                best_level[i] = lattice.k_min() + l;
            }
        }
    });
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (best[i] > rep.max_count) {
            rep.max_count = best[i];
            rep.level = best_level[i];
            rep.point = i;
        }
    return rep;
}

}  // namespace gmtlab
