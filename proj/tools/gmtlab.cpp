// gmtlab command-line interface. Every subcommand prints an aligned summary,
// optionally writes a JSON report (+ .txt summary) and CSV tables.
// Exit codes: 0 pass/complete, 1 check violation, 2 usage or input error,
// 3 runtime failure (resource cap, non-convergence).
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "gmtlab/acceptance.hpp"
#include "gmtlab/lcv.hpp"
#include "gmtlab/measure_io.hpp"
#include "gmtlab/oscillation.hpp"
#include "gmtlab/potential.hpp"
#include "gmtlab/regularity.hpp"
#include "gmtlab/report.hpp"
#include "gmtlab/transform.hpp"
#include "gmtlab/wolff.hpp"
#include "gmtlab/zoo.hpp"

using namespace gmtlab;
using nlohmann::json;

namespace {

struct Output {
    std::string report;
    std::string csv;
    bool json_stdout = false;
};

struct MeasureOpt {
    std::string path;
};

struct LatticeOpt {
    std::optional<int> kmin, kmax;
    std::string offset;
};

struct KernelOpt {
    std::string name = "riesz";
    std::optional<double> s;
    double alpha = 1.0;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw InvalidArgument("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

DiscreteMeasure load_measure(const MeasureOpt& m, Report& rep) {
    const std::string bytes = read_file(m.path);
    DiscreteMeasure mu = bytes.rfind("GMTM", 0) == 0 ? measure_from_binary(bytes) : measure_from_json(bytes);
    rep.set_measure(m.path, bytes, mu);
    return mu;
}

DyadicLattice make_lattice(const DiscreteMeasure& mu, const LatticeOpt& l, Report& rep) {
    const int d = mu.dim();
    std::pair<int, int> window{0, 0};
    if (!l.kmin || !l.kmax) {
        if (mu.size() < 2) throw InvalidArgument("default lattice window needs two points; pass --kmin/--kmax");
        window = DyadicLattice::default_window(mu);
    }
    const int kmin = l.kmin.value_or(window.first), kmax = l.kmax.value_or(window.second);
    std::vector<double> offset = l.offset.empty() ? std::vector<double>(d, 0.0) : parse_list(l.offset);
    if (static_cast<int>(offset.size()) != d) throw InvalidArgument("--offset needs one value per dimension");
    rep.parameters()["lattice"] = {{"k_min", kmin}, {"k_max", kmax}, {"offset", offset}};
    return DyadicLattice(d, offset, kmin, kmax);
}

KernelSpec make_kernel(const DiscreteMeasure& mu, const KernelOpt& k, Report& rep) {
    KernelSpec K = [&] {
        if (k.name == "riesz") return KernelSpec::riesz(mu.dim(), k.s.value_or(mu.dim() - 1.0), k.alpha);
        if (k.name == "planar") {
            if (k.s && *k.s != 1.0) throw InvalidArgument("the planar kernel has s = 1");
            return KernelSpec::planar_conjugate(k.alpha);
        }
        throw InvalidArgument("unknown kernel '" + k.name + "' (riesz, planar)");
    }();
    rep.parameters()["kernel"] = {{"name", k.name}, {"s", K.s()}, {"alpha", k.alpha}};
    return K;
}

void add_measure(CLI::App* sub, MeasureOpt& m) {
    sub->add_option("--measure", m.path, "measure file (.gmtm binary or JSON)")->required();
}

void add_lattice(CLI::App* sub, LatticeOpt& l) {
    sub->add_option("--kmin", l.kmin, "finest lattice level (default: measure window)");
    sub->add_option("--kmax", l.kmax, "coarsest lattice level (default: measure window)");
    sub->add_option("--offset", l.offset, "lattice offset, comma separated");
}

void add_kernel(CLI::App* sub, KernelOpt& k) {
    sub->add_option("--kernel", k.name, "riesz or planar")->capture_default_str();
    sub->add_option("--kernel-s", k.s, "kernel homogeneity s (default d - 1)");
    sub->add_option("--alpha", k.alpha, "smoothness exponent")->capture_default_str();
}

void add_output(CLI::App* sub, Output& o, bool csv) {
    sub->add_option("--report", o.report, "write the JSON report here (and a .txt summary next to it)");
    sub->add_flag("--json", o.json_stdout, "print the JSON report instead of the summary");
    if (csv) sub->add_option("--csv", o.csv, "write the plot-ready CSV table here");
}

int finish(const Report& rep, const Output& o, const std::string& csv = {}) {
    if (!o.csv.empty()) write_file_atomic(o.csv, csv);
    if (!o.report.empty()) rep.write(o.report);
    if (o.json_stdout)
        std::cout << rep.to_json().dump(2) << "\n";
    else
        std::cout << rep.summary();
    return rep.status() == RunStatus::violation ? 1 : 0;
}

json cube_json(const CubeAddress& q) {
    return {{"level", q.level}, {"coords", std::vector<std::int64_t>(q.coords.begin(), q.coords.begin() + q.dim)}};
}

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gmtlab: measures, dyadic densities and singular-integral checks"};
    // Long-only help, so that single-letter parameters like --h stay free.
    app.set_help_flag("--help", "print this help and exit");
    app.set_version_flag("--version", std::string(gmtlab::version()));
    app.require_subcommand(1);
    std::function<int()> run;
    Output out;
    MeasureOpt mopt;
    LatticeOpt lopt;
    KernelOpt kopt;
    std::uint64_t seed = acceptance::kDefaultSeed;

    // ---- zoo
    auto* zoo = app.add_subcommand("zoo", "generate a reference measure");
    zoo->set_help_flag("--help", "print this help and exit");
    std::string zkind, zout;
    int zd = 2, zs = 1, zlevels = 5;
    double zlambda = 0.25, zh = 1.0 / 64, zL = 1.0;
    std::size_t zn = 256;
    zoo->add_option("kind", zkind, "cantor, plane, arcsine, disc or segment")
        ->required()
        ->check(CLI::IsMember({"cantor", "plane", "arcsine", "disc", "segment"}));
    zoo->add_option("--out", zout, "output file (.gmtm binary, otherwise JSON)")->required();
    zoo->add_option("--d", zd, "ambient dimension")->capture_default_str();
    zoo->add_option("--lambda", zlambda, "Cantor contraction ratio")->capture_default_str();
    zoo->add_option("--levels", zlevels, "Cantor depth")->capture_default_str();
    zoo->add_option("--s", zs, "plane dimension")->capture_default_str();
    zoo->add_option("--h", zh, "plane grid spacing")->capture_default_str();
    zoo->add_option("--L", zL, "plane extent")->capture_default_str();
    zoo->add_option("--n", zn, "number of points (arcsine, disc, segment)")->capture_default_str();
    add_output(zoo, out, false);
    zoo->callback([&] {
        run = [&] {
            Report rep("zoo");
            json& p = rep.parameters();
            p["kind"] = zkind;
            DiscreteMeasure mu;
            if (zkind == "cantor") {
                p.update({{"d", zd}, {"lambda", zlambda}, {"levels", zlevels}});
                mu = cantor_measure(zd, zlambda, zlevels);
            } else if (zkind == "plane") {
                p.update({{"d", zd}, {"s", zs}, {"h", zh}, {"L", zL}});
                mu = plane_measure(zd, zs, zh, zL);
            } else if (zkind == "arcsine") {
                p["n"] = zn;
                mu = arcsine_measure(zn);
            } else if (zkind == "disc") {
                p["n"] = zn;
                mu = disc_lebesgue(zn);
            } else {
                p.update({{"n", zn}, {"d", zd}});
                mu = segment_measure(zn, zd);
            }
            p["out"] = zout;
            write_measure(mu, zout);
            rep.set_measure(zout, read_file(zout), mu);
            rep.result() = {{"points", mu.size()}, {"dim", mu.dim()}, {"total_mass", mu.total_mass()}};
            rep.line("points", std::to_string(mu.size()));
            rep.line("total mass", exact(mu.total_mass()));
            return finish(rep, out);
        };
    });

    // ---- energy
    auto* en = app.add_subcommand("energy", "Riesz-type energy and its coordinate split");
    en->set_help_flag("--help", "print this help and exit");
    double es = 2.0;
    add_measure(en, mopt);
    en->add_option("--s", es, "exponent s (kernel |x|^{-(s-1)})")->required();
    add_output(en, out, false);
    en->callback([&] {
        run = [&] {
            Report rep("energy");
            const auto mu = load_measure(mopt, rep);
            rep.parameters()["s"] = es;
            const double e = energy(mu, es);
            const auto parts = coordinate_energies(mu, es);
            const double sum = compensated_sum(parts);
            const double rel = e == 0.0 ? std::fabs(sum) : std::fabs(sum - e) / e;
            rep.result() = {{"energy", e}, {"coordinate_energies", parts}, {"identity_relative_error", rel}};
            rep.line("energy", exact(e));
            rep.line("sum of coordinates", exact(sum));
            rep.line("identity rel. error", rel);
            return finish(rep, out);
        };
    });

    // ---- wolff
    auto* wo = app.add_subcommand("wolff", "Wolff potential at the support points");
    wo->set_help_flag("--help", "print this help and exit");
    double wp = 2.0, ws = 1.0, wr = INFINITY;
    bool wno_self = false;
    add_measure(wo, mopt);
    wo->add_option("--p", wp, "exponent p")->capture_default_str();
    wo->add_option("--s", ws, "dimension s")->capture_default_str();
    wo->add_option("--r-max", wr, "upper radius (default infinity)");
    wo->add_flag("--keep-self", wno_self, "do not exclude each point's own atom");
    add_output(wo, out, true);
    wo->callback([&] {
        run = [&] {
            Report rep("wolff");
            const auto mu = load_measure(mopt, rep);
            const WolffParams w{wp, ws, wr};
            rep.parameters() = {{"p", wp}, {"s", ws}, {"r_max", std::isinf(wr) ? json("inf") : json(wr)},
                                {"self_exclusion", !wno_self}};
            const auto vals = wolff_at_support(mu, w, !wno_self);
            CompensatedSum integral;
            double mx = 0.0;
            for (std::size_t i = 0; i < mu.size(); ++i) {
                integral.add(vals[i] * mu.weight(i));
                mx = std::max(mx, vals[i]);
            }
            rep.result() = {{"integral", integral.value()}, {"max", mx}};
            std::ostringstream csv;
            csv.precision(17);
            csv << "index,wolff\n";
            for (std::size_t i = 0; i < vals.size(); ++i) csv << i << ',' << vals[i] << '\n';
            rep.line("int W dmu", exact(integral.value()));
            rep.line("max W", exact(mx));
            return finish(rep, out, csv.str());
        };
    });

    // ---- dyadic-sum
    auto* ds = app.add_subcommand("dyadic-sum", "dyadic Wolff sum over populated cubes");
    ds->set_help_flag("--help", "print this help and exit");
    double dp = 2.0, dsv = 1.0;
    add_measure(ds, mopt);
    add_lattice(ds, lopt);
    ds->add_option("--p", dp, "exponent p")->capture_default_str();
    ds->add_option("--s", dsv, "dimension s")->capture_default_str();
    add_output(ds, out, true);
    ds->callback([&] {
        run = [&] {
            Report rep("dyadic-sum");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            rep.parameters().update({{"p", dp}, {"s", dsv}});
            const auto table = populated_cubes(mu, lat, dsv);
            const double sum = dyadic_wolff_sum(table, dp);
            const double cont = wolff_integral(mu, {dp, dsv});
            rep.result() = {{"dyadic_sum", sum}, {"continuous_integral", cont}, {"cubes", table.size()}};
            rep.line("dyadic sum", exact(sum));
            rep.line("int W_p dmu", exact(cont));
            rep.line("populated cubes", std::to_string(table.size()));
            return finish(rep, out, table.to_csv());
        };
    });

    // ---- mpv-check
    auto* mpv = app.add_subcommand("mpv-check", "testing-condition ratios over populated cubes");
    mpv->set_help_flag("--help", "print this help and exit");
    double ms = 1.0;
    std::optional<double> mbound;
    add_measure(mpv, mopt);
    add_lattice(mpv, lopt);
    mpv->add_option("--s", ms, "Wolff exponent s")->capture_default_str();
    mpv->add_option("--bound", mbound, "exit 1 if the sup exceeds this");
    add_output(mpv, out, true);
    mpv->callback([&] {
        run = [&] {
            Report rep("mpv-check");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            rep.parameters()["s"] = ms;
            if (mbound) rep.parameters()["bound"] = *mbound;
            const auto table = populated_cubes(mu, lat, ms);
            const auto r = mpv_condition_test(mu, lat, table.cubes(), ms);
            rep.result() = {{"sup", r.sup}, {"vacuous", r.vacuous}, {"cubes_tested", r.entries.size()},
                            {"witness", r.witness ? cube_json(*r.witness) : json(nullptr)}};
            std::ostringstream csv;
            csv.precision(17);
            csv << "level";
            for (int k = 0; k < mu.dim(); ++k) csv << ",c" << k;
            csv << ",mass,integral,ratio\n";
            for (const auto& e : r.entries) {
                csv << e.cube.level;
                for (int k = 0; k < mu.dim(); ++k) csv << ',' << e.cube.coords[k];
                csv << ',' << e.mass << ',' << e.integral << ',' << e.ratio << '\n';
            }
            rep.line("sup ratio", exact(r.sup));
            if (r.witness) rep.line("witness", to_string(*r.witness));
            if (mbound) rep.set_status(r.sup <= *mbound ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out, csv.str());
        };
    });

    // ---- truncated-bound
    auto* tb = app.add_subcommand("truncated-bound", "truncated transform energy against int W_2");
    tb->set_help_flag("--help", "print this help and exit");
    std::string teps;
    std::optional<double> tbound;
    add_measure(tb, mopt);
    add_kernel(tb, kopt);
    tb->add_option("--epsilons", teps, "comma-separated truncation radii (default geometric grid)");
    tb->add_option("--bound", tbound, "exit 1 if the max ratio exceeds this");
    add_output(tb, out, true);
    tb->callback([&] {
        run = [&] {
            Report rep("truncated-bound");
            const auto mu = load_measure(mopt, rep);
            const auto K = make_kernel(mu, kopt, rep);
            const auto grid = teps.empty() ? default_epsilon_grid(mu) : parse_list(teps);
            rep.parameters()["epsilons"] = grid;
            if (tbound) rep.parameters()["bound"] = *tbound;
            const auto r = truncated_bound_check(mu, K, grid);
            json entries = json::array();
            std::ostringstream csv;
            csv.precision(17);
            csv << "epsilon,lhs,ratio\n";
            for (const auto& e : r.entries) {
                entries.push_back({{"epsilon", e.epsilon}, {"lhs", e.lhs}, {"ratio", e.ratio}});
                csv << e.epsilon << ',' << e.lhs << ',' << e.ratio << '\n';
            }
            rep.result() = {{"rhs", r.rhs}, {"max_lhs", r.max_lhs}, {"max_ratio", r.max_ratio},
                            {"violation", r.violation}, {"entries", entries}};
            rep.line("int W_2 dnu", exact(r.rhs));
            rep.line("max LHS", exact(r.max_lhs));
            rep.line("max ratio", exact(r.max_ratio));
            bool bad = r.violation || (tbound && r.max_ratio > *tbound);
            if (r.violation || tbound) rep.set_status(bad ? RunStatus::violation : RunStatus::pass);
            return finish(rep, out, csv.str());
        };
    });

    // ---- riesz-norm
    auto* rn = app.add_subcommand("riesz-norm", "L2(mu) operator norm of the truncated transform");
    rn->set_help_flag("--help", "print this help and exit");
    std::string rdeltas;
    PowerOptions popt;
    add_measure(rn, mopt);
    add_kernel(rn, kopt);
    rn->add_option("--deltas", rdeltas, "comma-separated delta values (default geometric grid)");
    rn->add_option("--rtol", popt.rtol, "residual tolerance")->capture_default_str();
    rn->add_option("--max-iterations", popt.max_iterations, "iteration cap")->capture_default_str();
    rn->add_option("--block", popt.block, "subspace block size")->capture_default_str();
    rn->add_option("--seed", seed, "start vector seed")->capture_default_str();
    add_output(rn, out, true);
    rn->callback([&] {
        run = [&] {
            Report rep("riesz-norm");
            const auto mu = load_measure(mopt, rep);
            const auto K = make_kernel(mu, kopt, rep);
            const auto grid = rdeltas.empty() ? default_delta_grid(mu) : parse_list(rdeltas);
            popt.seed = seed;
            rep.parameters().update({{"deltas", grid}, {"rtol", popt.rtol}, {"max_iterations", popt.max_iterations},
                                     {"block", popt.block}, {"seed", seed}});
            const auto r = operator_norm(mu, K, grid, popt);
            json entries = json::array();
            std::ostringstream csv;
            csv.precision(17);
            csv << "delta,norm,iterations,residual\n";
            for (const auto& e : r.entries) {
                entries.push_back(
                    {{"delta", e.delta}, {"norm", e.norm}, {"iterations", e.iterations}, {"residual", e.residual}});
                csv << e.delta << ',' << e.norm << ',' << e.iterations << ',' << e.residual << '\n';
                rep.line("delta " + format(e.delta), exact(e.norm));
            }
            rep.result() = {{"sup", r.sup}, {"sup_delta", r.sup_delta}, {"entries", entries}};
            rep.line("sup over deltas", exact(r.sup));
            return finish(rep, out, csv.str());
        };
    });

    // ---- senior
    auto* se = app.add_subcommand("senior", "senior cubes of nu = D(3Q)^p mu(3Q)");
    se->set_help_flag("--help", "print this help and exit");
    double sp = 2.0, ss = 1.0;
    std::optional<double> sM;
    add_measure(se, mopt);
    add_lattice(se, lopt);
    se->add_option("--p", sp, "exponent p")->capture_default_str();
    se->add_option("--s", ss, "dimension s")->capture_default_str();
    se->add_option("--M", sM, "decay exponent (default: smallest admissible for d)");
    add_output(se, out, true);
    se->callback([&] {
        run = [&] {
            Report rep("senior");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            const double M = sM.value_or(smallest_cube_M(mu.dim()));
            rep.parameters().update({{"p", sp}, {"s", ss}, {"M", M}});
            const auto table = populated_cubes(mu, lat, ss);
            const auto r = cube_senior_vertices(table, sp, M);
            std::size_t suspect = 0;
            for (char c : r.boundary_suspect) suspect += c;
            rep.result() = {{"cubes", table.size()}, {"seniors", r.seniors.size()}, {"boundary_suspect", suspect}};
            rep.line("populated cubes", std::to_string(table.size()));
            rep.line("senior cubes", std::to_string(r.seniors.size()));
            rep.line("near window edge", std::to_string(suspect));
            return finish(rep, out, seniors_csv(table, r));
        };
    });

    // ---- regular
    auto* rg = app.add_subcommand("regular", "epsilon-regular cubes");
    rg->set_help_flag("--help", "print this help and exit");
    double reps = 0.1, rsv = 1.0;
    int rR = 4;
    add_measure(rg, mopt);
    add_lattice(rg, lopt);
    rg->add_option("--epsilon", reps, "regularity exponent")->capture_default_str();
    rg->add_option("--s", rsv, "dimension s")->capture_default_str();
    rg->add_option("--R", rR, "graph radius of the comparison")->capture_default_str();
    add_output(rg, out, true);
    rg->callback([&] {
        run = [&] {
            Report rep("regular");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            rep.parameters().update({{"epsilon", reps}, {"s", rsv}, {"R", rR}});
            const auto table = populated_cubes(mu, lat, rsv);
            const auto idx = epsilon_regular_cubes(table, reps, rR);
            std::ostringstream csv;
            csv.precision(17);
            csv << "level";
            for (int k = 0; k < mu.dim(); ++k) csv << ",c" << k;
            csv << ",mass_3Q,density\n";
            for (std::size_t i : idx) {
                csv << table.cube(i).level;
                for (int k = 0; k < mu.dim(); ++k) csv << ',' << table.cube(i).coords[k];
                csv << ',' << table.value(i).mass << ',' << table.value(i).density << '\n';
            }
            rep.result() = {{"cubes", table.size()}, {"regular", idx.size()}};
            rep.line("populated cubes", std::to_string(table.size()));
            rep.line("epsilon-regular", std::to_string(idx.size()));
            return finish(rep, out, csv.str());
        };
    });

    // ---- chain-check
    auto* cc = app.add_subcommand("chain-check", "seniors are (M+s)/(p+1)-regular; domination ratio");
    double cp = 2.0, cs = 1.0;
    std::optional<double> cM;
    add_measure(cc, mopt);
    add_lattice(cc, lopt);
    cc->add_option("--p", cp, "exponent p")->capture_default_str();
    cc->add_option("--s", cs, "dimension s")->capture_default_str();
    cc->add_option("--M", cM, "decay exponent (default: smallest admissible for d)");
    add_output(cc, out, true);
    cc->callback([&] {
        run = [&] {
            Report rep("chain-check");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            const double M = cM.value_or(smallest_cube_M(mu.dim()));
            rep.parameters().update({{"p", cp}, {"s", cs}, {"M", M}});
            const auto table = populated_cubes(mu, lat, cs);
            const auto r = senior_regular_chain_check(table, M, cp);
            json viol = json::array();
            for (const auto& v : r.violations)
                viol.push_back({{"senior", cube_json(table.cube(v.senior))},
                                {"other", cube_json(table.cube(v.other))},
                                {"distance", v.distance},
                                {"excess", v.excess}});
            const bool ok = r.violations.empty() && r.domination_ratio <= r.domination_bound + 0.01;
            rep.result() = {{"cubes", r.cubes},
                            {"seniors", r.seniors},
                            {"boundary_suspect", r.boundary_suspect},
                            {"epsilon", r.epsilon},
                            {"domination_ratio", r.domination_ratio},
                            {"domination_bound", r.domination_bound},
                            {"regular_constant", r.regular_constant},
                            {"violations", viol}};
            rep.line("seniors / cubes", std::to_string(r.seniors) + " / " + std::to_string(r.cubes));
            rep.line("regularity violations", std::to_string(r.violations.size()));
            rep.line("domination ratio", exact(r.domination_ratio));
            rep.line("domination bound", exact(r.domination_bound));
            rep.set_status(ok ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out, seniors_csv(table, r.detail));
        };
    });

    // ---- lcv
    auto* lc = app.add_subcommand("lcv", "delta-non-LCV cubes with witnesses");
    lc->set_help_flag("--help", "print this help and exit");
    double ldelta = 0.1;
    std::size_t lbudget = 40000;
    add_measure(lc, mopt);
    add_lattice(lc, lopt);
    lc->add_option("--delta", ldelta, "clearance fraction in (0,1)")->capture_default_str();
    lc->add_option("--pair-budget", lbudget, "exhaustive pair scan limit per cube")->capture_default_str();
    add_output(lc, out, true);
    lc->callback([&] {
        run = [&] {
            Report rep("lcv");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            rep.parameters().update({{"delta", ldelta}, {"pair_budget", lbudget}});
            const auto r = non_lcv_cubes(mu, lat, ldelta, lbudget);
            json flagged = json::array();
            for (const auto& q : r.flagged) flagged.push_back(cube_json(q));
            rep.result() = {{"cubes", r.cubes.size()}, {"flagged", flagged}, {"sampled", r.sampled}};
            rep.line("populated cubes", std::to_string(r.cubes.size()));
            rep.line("flagged", std::to_string(r.flagged.size()));
            rep.line("sampled scans", std::to_string(r.sampled));
            return finish(rep, out, lcv_csv(r, mu.dim()));
        };
    });

    // ---- packing
    auto* pk = app.add_subcommand("packing", "Carleson packing constant of the non-LCV family");
    pk->set_help_flag("--help", "print this help and exit");
    double pdelta = 0.1, ps = 1.0;
    std::optional<double> pbound;
    add_measure(pk, mopt);
    add_lattice(pk, lopt);
    pk->add_option("--delta", pdelta, "clearance fraction in (0,1)")->capture_default_str();
    pk->add_option("--s", ps, "packing exponent s")->capture_default_str();
    pk->add_option("--bound", pbound, "exit 1 if the constant exceeds this");
    add_output(pk, out, true);
    pk->callback([&] {
        run = [&] {
            Report rep("packing");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            rep.parameters().update({{"delta", pdelta}, {"s", ps}});
            if (pbound) rep.parameters()["bound"] = *pbound;
            const auto l = non_lcv_cubes(mu, lat, pdelta);
            std::vector<CubeAddress> tops;
            for (const auto& c : l.cubes) tops.push_back(c.cube);
            const auto r = carleson_constant(l.flagged, tops, ps);
            std::ostringstream csv;
            csv.precision(17);
            csv << "level";
            for (int k = 0; k < mu.dim(); ++k) csv << ",c" << k;
            csv << ",packing\n";
            for (std::size_t t = 0; t < tops.size(); ++t) {
                csv << tops[t].level;
                for (int k = 0; k < mu.dim(); ++k) csv << ',' << tops[t].coords[k];
                csv << ',' << r.ratios[t] << '\n';
            }
            rep.result() = {{"constant", r.constant},
                            {"argmax", r.argmax ? cube_json(*r.argmax) : json(nullptr)},
                            {"family", l.flagged.size()},
                            {"tops", tops.size()}};
            rep.line("family size", std::to_string(l.flagged.size()));
            rep.line("packing constant", exact(r.constant));
            if (r.argmax) rep.line("attained at", to_string(*r.argmax));
            if (pbound) rep.set_status(r.constant <= *pbound ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out, csv.str());
        };
    });

    // ---- oscillation
    auto* os = app.add_subcommand("oscillation", "Theta lower bounds and density ratios per cube");
    os->set_help_flag("--help", "print this help and exit");
    double oA = 0.0, os_s = 1.0;
    std::size_t on = 8;
    std::optional<int> olevel;
    add_measure(os, mopt);
    add_lattice(os, lopt);
    add_kernel(os, kopt);
    os->add_option("--A", oA, "test-function aperture (default 128 sqrt d)");
    os->add_option("--n", on, "dictionary size per cube")->capture_default_str();
    os->add_option("--s", os_s, "density exponent s")->capture_default_str();
    os->add_option("--level", olevel, "only cubes of this level");
    os->add_option("--seed", seed, "placement seed")->capture_default_str();
    add_output(os, out, true);
    os->callback([&] {
        run = [&] {
            Report rep("oscillation");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            const auto K = make_kernel(mu, kopt, rep);
            const double A = oA > 0.0 ? oA : 128.0 * std::sqrt(static_cast<double>(mu.dim()));
            rep.parameters().update({{"A", A}, {"n", on}, {"s", os_s}, {"seed", seed}});
            const auto table = populated_cubes(mu, lat, os_s);
            std::vector<CubeAddress> cubes;
            for (const auto& q : table.cubes())
                if (!olevel || q.level == *olevel) cubes.push_back(q);
            if (olevel) rep.parameters()["level"] = *olevel;
            const auto rows = theta_table(mu, K, lat, cubes, A, on, seed);
            double mx = 0.0;
            std::size_t vac = 0;
            for (const auto& r : rows) {
                mx = std::max(mx, r.ratio.ratio);
                vac += r.ratio.vacuous;
            }
            rep.result() = {{"cubes", rows.size()}, {"vacuous", vac}, {"max_ratio", mx}};
            rep.line("cubes", std::to_string(rows.size()));
            rep.line("vacuous", std::to_string(vac));
            rep.line("max Theta/density", exact(mx));
            return finish(rep, out, theta_csv(rows, mu.dim()));
        };
    });

    // ---- riesz-system
    auto* rs = app.add_subcommand("riesz-system", "empirical Riesz-system constant of the psi_Q family");
    rs->set_help_flag("--help", "print this help and exit");
    double rA = 0.0;
    std::size_t rm = 50;
    bool rgram = false;
    add_measure(rs, mopt);
    add_lattice(rs, lopt);
    rs->add_option("--A", rA, "aperture (default 128 sqrt d)");
    rs->add_option("--samples", rm, "random plane waves besides constants and coordinates")->capture_default_str();
    rs->add_flag("--gram", rgram, "also compute the Gram-matrix norm (exact for this family)");
    rs->add_option("--seed", seed, "placement and sample seed")->capture_default_str();
    add_output(rs, out, true);
    rs->callback([&] {
        run = [&] {
            Report rep("riesz-system");
            const auto mu = load_measure(mopt, rep);
            const auto lat = make_lattice(mu, lopt, rep);
            const double A = rA > 0.0 ? rA : 128.0 * std::sqrt(static_cast<double>(mu.dim()));
            rep.parameters().update({{"A", A}, {"samples", rm}, {"seed", seed}, {"gram", rgram}});
            const auto sys = build_riesz_system(mu, lat, A, seed);
            const auto r = riesz_system_constant(mu, sys, riesz_samples(mu, rm, seed + 1));
            rep.result() = {{"constant", r.constant}, {"argmax", r.argmax}, {"cubes", r.cubes},
                            {"cs_violations", r.cs_violations}, {"sup_bound_violations", r.sup_bound_violations}};
            rep.line("cubes", std::to_string(r.cubes));
            rep.line("empirical C", exact(r.constant));
            if (rgram) {
                const double g = riesz_gram_norm(mu, sys);
                rep.result()["gram_norm"] = g;
                rep.line("Gram norm", exact(g));
            }
            rep.line("CS violations", std::to_string(r.cs_violations));
            rep.line("sup-bound violations", std::to_string(r.sup_bound_violations));
            const bool ok = r.cs_violations == 0 && r.sup_bound_violations == 0 && std::isfinite(r.constant);
            rep.set_status(ok ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out, riesz_csv(sys, mu.dim()));
        };
    });

    // ---- defect
    auto* df = app.add_subcommand("defect", "reflectionless defect over a smooth mean-zero dictionary");
    df->set_help_flag("--help", "print this help and exit");
    std::string dcenters, danchor = "0,0";
    std::size_t dring = 8;
    std::string dradii = "0.3,0.6";
    double dr = 0.2, dar = 0.45, dR = INFINITY;
    std::optional<double> dtol;
    bool dplain = false;
    add_measure(df, mopt);
    add_kernel(df, kopt);
    df->add_option("--centers", dcenters, "bump centers, flat comma list (default: ring layout)");
    df->add_option("--ring", dring, "directions of the ring layout")->capture_default_str();
    df->add_option("--radii", dradii, "radii of the ring layout")->capture_default_str();
    df->add_option("--bump-radius", dr, "bump radius")->capture_default_str();
    df->add_option("--anchor", danchor, "anchor bump center")->capture_default_str();
    df->add_option("--anchor-radius", dar, "anchor bump radius")->capture_default_str();
    df->add_option("--R", dR, "pair against 1 on B(0,R) (default: everywhere)");
    df->add_flag("--no-modulated", dplain, "omit the x-modulated bumps");
    df->add_option("--tolerance", dtol, "exit 1 if the defect exceeds this");
    add_output(df, out, false);
    df->callback([&] {
        run = [&] {
            Report rep("defect");
            const auto mu = load_measure(mopt, rep);
            const auto K = make_kernel(mu, kopt, rep);
            const auto anchor = parse_list(danchor);
            const auto centers =
                dcenters.empty() ? ring_centers(mu.dim(), dring, parse_list(dradii)) : parse_list(dcenters);
            const auto dict = bump_dictionary(mu, centers, dr, anchor, dar, !dplain);
            if (dict.empty()) throw InvalidArgument("the anchor bump carries no mass");
            rep.parameters().update({{"centers", centers}, {"bump_radius", dr}, {"anchor", anchor},
                                     {"anchor_radius", dar}, {"modulated", !dplain},
                                     {"R", std::isinf(dR) ? json("inf") : json(dR)}});
            if (dtol) rep.parameters()["tolerance"] = *dtol;
            const auto r = reflectionless_defect(mu, K, dict, dR);
            rep.result() = {{"defect", r.defect}, {"argmax", r.argmax}, {"dictionary", dict.size()}, {"values", r.values}};
            rep.line("dictionary size", std::to_string(dict.size()));
            rep.line("defect", exact(r.defect));
            if (dtol) rep.set_status(r.defect <= *dtol ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out);
        };
    });

    // ---- divergence
    auto* dv = app.add_subcommand("divergence", "mollified divergence identity residual (s = d - 1)");
    dv->set_help_flag("--help", "print this help and exit");
    DivergenceOptions dopt;
    std::string dmoll = "cone";
    std::optional<double> dvtol;
    add_measure(dv, mopt);
    dv->add_option("--rho", dopt.rho, "mollifier radius")->capture_default_str();
    dv->add_option("--h", dopt.h, "grid step")->capture_default_str();
    dv->add_option("--mollifier", dmoll, "cone or smooth")
        ->capture_default_str()
        ->check(CLI::IsMember({"cone", "smooth"}));
    dv->add_option("--margin", dopt.margin, "grid margin in units of rho")->capture_default_str();
    dv->add_option("--tolerance", dvtol, "exit 1 if the residual exceeds this");
    add_output(dv, out, false);
    dv->callback([&] {
        run = [&] {
            Report rep("divergence");
            const auto mu = load_measure(mopt, rep);
            dopt.mollifier = dmoll == "cone" ? Mollifier::cone : Mollifier::smooth;
            const auto K = KernelSpec::riesz(mu.dim(), mu.dim() - 1.0);
            rep.parameters() = {{"rho", dopt.rho}, {"h", dopt.h}, {"mollifier", dmoll}, {"margin", dopt.margin}};
            if (dvtol) rep.parameters()["tolerance"] = *dvtol;
            const auto r = riesz_divergence_check(mu, K, dopt);
            rep.result() = {{"max_residual", r.max_residual}, {"argmax", r.argmax}, {"b", r.b},
                            {"b_analytic", r.b_analytic}, {"grid_points", r.grid_points}};
            rep.line("calibrated b", exact(r.b));
            rep.line("sphere area", exact(r.b_analytic));
            rep.line("max residual", exact(r.max_residual));
            rep.line("grid points", std::to_string(r.grid_points));
            if (dvtol) rep.set_status(r.max_residual <= *dvtol ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out);
        };
    });

    // ---- pv-fractional
    auto* pv = app.add_subcommand("pv-fractional", "annulus integral of the fractional-Laplacian identity");
    pv->set_help_flag("--help", "print this help and exit");
    std::string pat;
    PvPlan plan;
    add_measure(pv, mopt);
    add_kernel(pv, kopt);
    pv->add_option("--at", pat, "evaluation point x0, comma separated")->required();
    pv->add_option("--tau", plan.tau, "inner radius")->capture_default_str();
    pv->add_option("--outer", plan.outer, "outer radius")->capture_default_str();
    pv->add_option("--tolerance", plan.tolerance, "quadrature tolerance")->capture_default_str();
    add_output(pv, out, false);
    pv->callback([&] {
        run = [&] {
            Report rep("pv-fractional");
            const auto mu = load_measure(mopt, rep);
            const auto K = make_kernel(mu, kopt, rep);
            const auto x0 = parse_list(pat);
            rep.parameters().update({{"at", x0}, {"tau", plan.tau}, {"outer", plan.outer}, {"tolerance", plan.tolerance}});
            const auto r = pv_fractional_check(mu, K, x0, plan);
            rep.result() = {{"residual", r.residual}, {"error_estimate", r.error_estimate}};
            for (std::size_t c = 0; c < r.residual.size(); ++c)
                rep.line("component " + std::to_string(c), exact(r.residual[c]));
            rep.line("error estimate", exact(r.error_estimate));
            return finish(rep, out);
        };
    });

    // ---- verify-all
    auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
    va->set_help_flag("--help", "print this help and exit");
    std::string suite = "desk";
    std::vector<int> only;
    va->add_option("--suite", suite, "suite name")->capture_default_str()->check(CLI::IsMember({"desk"}));
    va->add_option("--only", only, "criterion ids to run (default all)")->delimiter(',')->check(
        CLI::Range(1, acceptance::kCriteria));
    va->add_option("--seed", seed, "suite seed")->capture_default_str();
    add_output(va, out, false);
    va->callback([&] {
        run = [&] {
            Report rep("verify-all");
            rep.parameters() = {{"suite", suite}, {"only", only}, {"seed", seed}};
            const auto results = acceptance::run_suite(only, seed, [&](const acceptance::CriterionResult& r) {
                if (!out.json_stdout) std::cout << acceptance::format_line(r) << std::endl;
            });
            json arr = json::array();
            int pass = 0, documented = 0;
            for (const auto& r : results) {
                json m = json::object();
                for (const auto& [k, v] : r.metrics) m[k] = v;
                arr.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass},
                               {"documented_failure", r.documented_failure}, {"seconds", r.seconds},
                               {"budget_s", r.budget}, {"summary", r.summary}, {"metrics", m}});
                pass += r.pass;
                documented += r.documented_failure;
            }
            rep.result() = {{"criteria", arr}, {"passed", pass}, {"documented_failures", documented}};
            rep.line("passed", std::to_string(pass) + " / " + std::to_string(results.size()));
            rep.line("documented failures", std::to_string(documented));
            rep.set_status(acceptance::suite_ok(results) ? RunStatus::pass : RunStatus::violation);
            return finish(rep, out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        std::cerr << "\n" << app.help();
        return 2;
    }
    try {
        return run();
    } catch (const InvalidArgument& e) {
        std::cerr << "gmtlab: " << e.what() << "\n";
        return 2;
    } catch (const ResourceLimit& e) {
        std::cerr << "gmtlab: " << e.what() << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        std::cerr << "gmtlab: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        // read_file and the measure parsers report bad input as plain errors.
        std::cerr << "gmtlab: " << e.what() << "\n";
        return 2;
    }
}
