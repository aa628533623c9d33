// sprshift: countable-state Markov shift thermodynamics at desk scale.
// Non-interactive: every subcommand reads files, writes a JSON summary to
// stdout plus report files, and exits 0 (pass), 1 (input error), or
// 2 (check failure).

#include <CLI11.hpp>

#include <complex>
#include <filesystem>
#include <iostream>

#include "sprshift/census.hpp"
#include "sprshift/io.hpp"
#include "sprshift/measure.hpp"
#include "sprshift/pliss.hpp"
#include "sprshift/spectral.hpp"
#include "sprshift/spr_gate.hpp"
#include "sprshift/stochastics.hpp"

namespace fs = std::filesystem;
using namespace sprshift;

namespace {

struct CommonOpts {
    std::string graph_path;
    std::string out_dir = ".";
};

std::string file_stem_hash(const fs::path& input) {
    std::ifstream in(input, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 8);
}

void emit(const CommonOpts& common, const std::string& stem, const json& summary,
          const std::vector<std::pair<std::string, std::string>>& extra_files = {}) {
    fs::create_directories(common.out_dir);
    const fs::path base = fs::path(common.out_dir) / stem;
    write_text_atomic(base.string() + ".json", summary.dump(2) + "\n");
    for (const auto& [suffix, contents] : extra_files)
        write_text_atomic(base.string() + suffix, contents);
    std::cout << summary.dump(2) << "\n";
}

CylinderPotential load_observable(const std::string& path, const DirectedGraph& g) {
    CylinderPotential psi = load_potential(path);
    psi.validate_against(g);
    return psi;
}

// census of whatever the file describes: explicit edges beat the ideal rule
LoopCensus census_of(const GraphSource& src, Vertex base, int horizon) {
    if (src.graph) return count_loops(*src.graph, base, horizon);
    return bouquet_census(*src.bouquet, horizon);
}

int cmd_graph(const CommonOpts& common) {
    const GraphSource src = load_graph_source(common.graph_path);
    const DirectedGraph g = realize_graph(src);
    json out;
    out["graph"] = serialize_graph(g);
    out["proper"] = g.proper();
    out["locally_finite"] = g.locally_finite();
    if (g.bouquet_clamped())
        out["note"] = "length-1 loop multiplicity clamped to 1 in the materialization";
    json comps = json::array();
    for (const auto& comp : strongly_connected_components(g)) {
        json c;
        c["vertices"] = comp.vertices;
        c["wandering"] = comp.wandering;
        if (!comp.wandering) {
            const SpectralDecomposition dec = spectral_decomposition(g, comp);
            c["period"] = dec.period;
            c["classes"] = dec.classes;
        }
        comps.push_back(c);
    }
    out["components"] = comps;
    emit(common, "graph-" + graph_hash(g), out);
    return 0;
}

int cmd_entropy(const CommonOpts& common, Vertex base, int horizon) {
    const GraphSource src = load_graph_source(common.graph_path);
    const LoopCensus census = census_of(src, base, horizon);
    int p = 1;
    if (src.graph) {
        for (const auto& comp : strongly_connected_components(*src.graph))
            if (std::binary_search(comp.vertices.begin(), comp.vertices.end(), base) &&
                !comp.wandering)
                p = period(*src.graph, comp);
    }
    const EntropyEstimate est = gurevich_entropy(census, p);
    const RadiusEstimate radii = convergence_radii(census);

    json out;
    out["h"] = est.h;
    out["h_lo"] = est.h_lo;
    out["h_hi"] = est.h_hi;
    out["window"] = est.window;
    out["period"] = est.period;
    out["r_a"] = radii.r_a;
    out["R_a"] = std::isinf(radii.R_a) ? json("inf") : json(radii.R_a);
    out["R_exact"] = radii.R_exact;
    out["census"] = serialize_census(census);

    std::string csv = "n,Z_n,Zstar_n\n";
    for (int n = 1; n <= census.horizon; ++n)
        csv += std::to_string(n) + "," + census.loops(n).str() + "," +
               census.first_returns(n).str() + "\n";
    emit(common, "entropy-" + file_stem_hash(common.graph_path), out, {{"-census.csv", csv}});
    return 0;
}

int cmd_spr(const CommonOpts& common, Vertex base, int horizon, const std::vector<int>& W,
            const std::string& potential_path) {
    const GraphSource src = load_graph_source(common.graph_path);
    json out;
    if (!potential_path.empty()) {
        if (!src.graph) fail_input("spr", "weighted gate needs an explicit finite graph");
        const CylinderPotential phi = load_observable(potential_path, *src.graph);
        const WeightedCensus wc = weighted_census(*src.graph, base, phi, horizon);
        out = serialize_verdict(wc.verdict);
        out["pressure"] = wc.pressure;
        out["pressure_rate"] = wc.pressure_rate;
        out["first_return_rate"] =
            std::isinf(wc.first_return_rate) ? json("-inf") : json(wc.first_return_rate);
        out["finite_support"] = wc.finite_support;
    } else if (src.graph) {
        SprOptions opt;
        opt.base = base;
        opt.horizon = horizon;
        for (int w : W) opt.W.push_back(w);
        out = serialize_verdict(spr_diagnose(*src.graph, opt));
    } else {
        out = serialize_verdict(spr_diagnose(*src.bouquet, horizon));
    }
    emit(common, "spr-" + file_stem_hash(common.graph_path), out);
    return 0;
}

int cmd_mme(const CommonOpts& common) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const MarkovMeasure m = parry_measure(g);
    json out = serialize_measure(m);
    const TransferOperator op = transfer_operator(m);
    const SpectralGap gap = spectral_gap(op);
    out["spectral_gap"] = {{"subleading", gap.subleading},
                           {"period", gap.period},
                           {"converged", gap.converged}};
    out["normalization_defect"] = op.normalization_defect;
    emit(common, "mme-" + graph_hash(g), out);
    return 0;
}

int cmd_pressure(const CommonOpts& common, const std::string& obs_path,
                 const std::string& base_path, double tmin, double tmax, int steps) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const CylinderPotential psi = load_observable(obs_path, g);
    const CylinderPotential phi = base_path.empty() ? CylinderPotential::constant(0.0, g)
                                                    : load_observable(base_path, g);
    std::vector<double> grid;
    for (int i = 0; i <= steps; ++i) grid.push_back(tmin + (tmax - tmin) * i / steps);
    const PressureCurve curve = pressure_curve(g, phi, psi, grid);

    json out;
    out["convexity_defect"] = curve.max_convexity_defect;
    out["third_difference"] = curve.max_third_difference;
    out["samples"] = curve.t.size();
    const std::string csv = csv_table({"t", "P"}, {curve.t, curve.value});
    emit(common, "pressure-" + graph_hash(g), out, {{"-curve.csv", csv}});
    return 0;
}

int cmd_variance(const CommonOpts& common, const std::string& obs_path, long n, int R,
                 std::uint64_t seed) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const CylinderPotential psi = load_observable(obs_path, g);
    const MarkovMeasure m = parry_measure(g);
    const SpectralGap gap = spectral_gap(transfer_operator(m));
    const VarianceResult gk = green_kubo_variance(m, psi, gap);
    const VarianceResult lr =
        linear_response_variance(g, CylinderPotential::constant(0.0, g), psi);

    json out;
    out["green_kubo"] = gk.sigma2;
    out["green_kubo_truncation"] = gk.truncation;
    out["linear_response"] = lr.sigma2;
    out["linear_response_raw"] = {{"h=1e-2", lr.raw_coarse}, {"h=1e-3", lr.raw_fine}};
    const bool agree = std::abs(gk.sigma2 - lr.sigma2) <= 1e-6 * std::max(1.0, gk.sigma2);
    out["agree"] = agree;
    bool empirical_ok = true;
    if (n > 0 && R > 0) {
        TrajectoryBatch batch{&m, n, R, seed};
        const EmpiricalVariance emp = empirical_variance(batch, psi);
        out["empirical"] = emp.sigma2;
        out["empirical_se"] = emp.standard_error;
        empirical_ok =
            std::abs(emp.sigma2 - gk.sigma2) <= 3.0 * std::max(emp.standard_error, 1e-12);
        out["empirical_agree"] = empirical_ok;
    }
    emit(common, "variance-" + graph_hash(g), out);
    return (agree && empirical_ok) ? 0 : 2;
}

int cmd_ldp(const CommonOpts& common, const std::string& obs_path, double a, int s_points) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const CylinderPotential psi_raw = load_observable(obs_path, g);
    const MarkovMeasure m = parry_measure(g);
    const SpectralGap gap = spectral_gap(transfer_operator(m));

    // center the observable; the rate function is for psi - mu(psi)
    const double mean = m.mean(psi_raw);
    std::map<std::vector<Vertex>, double> shifted;
    for (const auto& [word, val] : psi_raw.table()) shifted[word] = val - mean;
    const CylinderPotential psi(psi_raw.range(), std::move(shifted));

    const double sigma2 = green_kubo_variance(m, psi, gap).sigma2;
    if (sigma2 <= 0) fail_pre("ldp", "zero asymptotic variance; no rate function");

    const CylinderPotential zero = CylinderPotential::constant(0.0, g);
    auto Lambda = [&](double t) { return pressure_at(g, zero, psi, t) - std::log(m.lambda); };
    std::vector<double> s_grid;
    const double smax = 2.0 * std::sqrt(sigma2);
    for (int i = -s_points; i <= s_points; ++i) s_grid.push_back(smax * i / s_points);
    const RateFunction rf = rate_function(Lambda, sigma2, s_grid, 60.0);

    json out;
    out["sigma2"] = sigma2;
    out["curvature_at_zero"] = rf.curvature_at_zero;
    out["curvature_expected"] = 1.0 / sigma2;
    out["domain"] = rf.domain;
    if (std::abs(a) > rf.domain)
        fail_pre("ldp", "a outside the verified rate-function domain |s| <= " +
                            format_double(rf.domain));

    const double rate_at_a = rate_function(Lambda, sigma2, {a}, 60.0).value[0];
    LdpOptions opt;
    opt.a = a;
    const StatReport slope = ldp_empirical(m, psi, rate_at_a, opt);
    out["rate_at_a"] = rate_at_a;
    out["slope_report"] = serialize_report(slope);
    const std::string csv = csv_table({"s", "I"}, {rf.s, rf.value});
    emit(common, "ldp-" + graph_hash(g), out, {{"-rate.csv", csv}});
    return slope.pass ? 0 : 2;
}

int cmd_tail(const CommonOpts& common, Vertex base, int N) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const MarkovMeasure m = parry_measure(g);
    const ReturnTimeTail tail = return_time_tail(m, base, N);
    json out;
    out["theta"] = tail.theta;
    out["base"] = base;
    std::vector<double> ns(N);
    for (int i = 0; i < N; ++i) ns[i] = i + 1;
    const std::string csv = csv_table({"n", "survival", "survival_from_base"},
                                      {ns, tail.survival, tail.survival_from_base});
    emit(common, "tail-" + graph_hash(g), out, {{"-tail.csv", csv}});
    return 0;
}

int cmd_simulate(const CommonOpts& common, const std::string& obs_path, long n, int R,
                 std::uint64_t seed) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const CylinderPotential psi = load_observable(obs_path, g);
    const MarkovMeasure m = parry_measure(g);
    const CompiledObservable obs = compile_observable(m, psi, false);
    TrajectoryBatch batch{&m, n, R, seed};
    const std::vector<double> sums = replica_final_sums(batch, obs);
    double mean = 0;
    for (double s : sums) mean += s;
    mean /= R;
    double var = 0;
    for (double s : sums) var += (s - mean) * (s - mean);
    var /= std::max(1, R - 1);

    json out;
    out["n"] = n;
    out["replicas"] = R;
    out["seed"] = seed;
    out["birkhoff_mean"] = mean;
    out["birkhoff_variance"] = var;
    out["normalized_variance"] = var / double(n);
    std::vector<double> idx(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) idx[i] = double(i);
    const std::string csv = csv_table({"replica", "birkhoff_sum"}, {idx, sums});
    emit(common, "simulate-" + graph_hash(g) + "-s" + std::to_string(seed), out,
         {{"-sums.csv", csv}});
    return 0;
}

int cmd_stats(const CommonOpts& common, const std::string& obs_path, const std::string& suite,
              long n, int R, std::uint64_t seed, long lil_n, int lil_traj,
              double tolerance_scale, Vertex base) {
    const DirectedGraph g = realize_graph(load_graph_source(common.graph_path));
    const CylinderPotential psi = load_observable(obs_path, g);
    const MarkovMeasure m = parry_measure(g);
    const SpectralGap gap = spectral_gap(transfer_operator(m));
    const double sigma2 = green_kubo_variance(m, psi, gap).sigma2;
    const double sigma = std::sqrt(std::max(sigma2, 0.0));

    TrajectoryBatch batch{&m, n, R, seed};
    std::vector<StatReport> reports;
    std::stringstream suite_ss(suite);
    std::string item;
    while (std::getline(suite_ss, item, ',')) {
        if (item == "clt") {
            const auto r = clt_check(batch, psi, sigma);
            reports.insert(reports.end(), r.begin(), r.end());
        } else if (item == "arcsine") {
            reports.push_back(arcsine_check(batch, psi, sigma,
                                            {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 1.0}));
        } else if (item == "records") {
            reports.push_back(records_check(
                batch, psi, sigma,
                {0.0, 0.25 * sigma, 0.5 * sigma, sigma, 1.5 * sigma, 2.0 * sigma}));
        } else if (item == "fclt") {
            const auto r = fclt_check(batch, psi, sigma);
            reports.insert(reports.end(), r.begin(), r.end());
        } else if (item == "laplace") {
            const auto r = laplace_transform_checks(
                batch, psi, sigma,
                {std::complex<double>(0.5, 0), std::complex<double>(-0.5, 0),
                 std::complex<double>(0, 1), std::complex<double>(0, -1)});
            reports.insert(reports.end(), r.begin(), r.end());
        } else if (item == "lil") {
            LilOptions opt;
            opt.n = lil_n;
            opt.trajectories = lil_traj;
            const auto r = lil_strassen_check(m, psi, sigma, opt, seed);
            reports.insert(reports.end(), r.begin(), r.end());
        } else if (item == "tail") {
            const ReturnTimeTail tail = return_time_tail(m, base, 20);
            reports.push_back(empirical_tail_check(m, base, tail.survival, 20, 1000000, seed));
        } else if (item == "ergodicity") {
            std::vector<double> grid;
            for (int i = -20; i <= 20; ++i)
                if (i != 0) grid.push_back(i * 0.05);
            reports.push_back(effective_ergodicity_scan(g, psi, grid).report);
        } else {
            fail_input("stats", "unknown suite item '" + item + "'");
        }
    }

    if (tolerance_scale != 1.0) {
        for (auto& r : reports) {
            r.tolerance *= tolerance_scale;
            r.pass = std::abs(r.estimate - r.reference) <= r.tolerance;
            r.notes += (r.notes.empty() ? "" : "; ");
            r.notes += "tolerance scaled by " + format_double(tolerance_scale);
        }
    }

    json out;
    out["sigma2"] = sigma2;
    json arr = json::array();
    bool all_pass = true;
    std::vector<std::pair<std::string, std::string>> curves;
    for (const auto& r : reports) {
        arr.push_back(serialize_report(r));
        all_pass = all_pass && r.pass;
        if (!r.curve_x.empty())
            curves.emplace_back("-" + r.name + ".csv",
                                csv_table({"x", "empirical", "reference"},
                                          {r.curve_x, r.curve_empirical, r.curve_reference}));
    }
    out["reports"] = arr;
    out["all_pass"] = all_pass;
    emit(common, "stats-" + graph_hash(g) + "-s" + std::to_string(seed), out, curves);
    return all_pass ? 0 : 2;
}

int cmd_pliss(const CommonOpts& common, const std::string& orbits_path, const std::string& mode,
              double beta, double A, double kappa, double chi, double eps, int n0) {
    const std::vector<CocycleOrbit> all_orbits = load_orbits(orbits_path);
    // scalar modes and matrix modes each act on their kind of orbit
    const bool wants_scalar = (mode == "points" || mode == "envelope");
    std::vector<CocycleOrbit> orbits;
    for (const auto& orbit : all_orbits)
        if (orbit.scalar() == wants_scalar) orbits.push_back(orbit);
    if (orbits.empty())
        fail_input("pliss", "no " + std::string(wants_scalar ? "scalar" : "matrix") +
                                " orbits in the ensemble for mode '" + mode + "'");
    json out;
    out["orbits_used"] = orbits.size();
    out["orbits_skipped"] = all_orbits.size() - orbits.size();
    bool pass = true;
    if (mode == "points") {
        json arr = json::array();
        for (const auto& orbit : orbits) {
            const PlissResult res = pliss_points(orbit, beta, A, kappa);
            json r;
            r["measure"] = res.measure;
            r["lower_bound"] = res.lower_bound;
            r["points"] = res.points;
            r["holds"] = res.bound_holds;
            pass = pass && res.bound_holds;
            arr.push_back(r);
        }
        out["pliss"] = arr;
    } else if (mode == "envelope") {
        json arr = json::array();
        for (const auto& orbit : orbits) {
            if (!orbit.scalar()) fail_input("pliss", "envelope mode needs scalar orbits");
            const TemperedEnvelope env = tempered_envelope(orbit.values, eps);
            json r;
            r["envelope"] = env.envelope;
            r["c0"] = env.c0;
            r["tail_factor"] = env.tail_factor;
            r["holds"] = env.tail_holds;
            pass = pass && env.tail_holds;
            arr.push_back(r);
        }
        out["envelopes"] = arr;
    } else if (mode == "pesin") {
        json arr = json::array();
        for (const auto& orbit : orbits) {
            const PesinCertificate cert = optimal_pesin_constant(orbit, chi, eps);
            json r;
            r["K"] = cert.K;
            r["K_at"] = cert.K_at;
            r["tempered"] = cert.tempered;
            pass = pass && cert.tempered;
            arr.push_back(r);
        }
        out["certificates"] = arr;
    } else if (mode == "block") {
        const PesinBlockComparison cmp = pliss_set_to_block(orbits, n0, chi, eps);
        out["outside_block"] = cmp.measure_outside_block;
        out["outside_pliss"] = cmp.measure_outside_pliss;
        out["factor"] = cmp.factor;
        out["threshold_C"] = cmp.C;
        out["vacuous"] = cmp.vacuous;
        out["holds"] = cmp.holds;
        pass = cmp.holds;
    } else {
        fail_input("pliss", "mode must be points|envelope|pesin|block");
    }
    out["pass"] = pass;
    emit(common, "pliss-" + file_stem_hash(orbits_path), out);
    return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sprshift: thermodynamics of countable-state Markov shifts with "
        "strong-positive-recurrence diagnostics"};
    app.require_subcommand(1);

    CommonOpts common;
    Vertex base = 0;
    int horizon = 64;
    int tail_n = 30;
    std::vector<int> W;
    std::string obs_path, potential_path, suite = "clt,arcsine,records";
    std::string orbits_path, mode = "points";
    double tmin = -1, tmax = 1, a = 0.2;
    int steps = 40;
    int s_points = 60;
    long n = 10000;
    int R = 10000;
    std::uint64_t seed = 1;
    long lil_n = 10000000;
    int lil_traj = 100;
    double tolerance_scale = 1.0;
    double beta = 0, A = 1, kappa = 0, chi = 0.5, eps = 0.25;
    int n0 = 1;

    auto add_graph = [&](CLI::App* cmd) {
        cmd->add_option("--graph", common.graph_path, "graph description file (JSON)")
            ->required();
        cmd->add_option("--out", common.out_dir, "output directory");
    };

    auto* c_graph = app.add_subcommand(
        "graph", "validate and analyze a graph: components, period, cyclic classes "
                 "(spectral decomposition of irreducible shifts)");
    add_graph(c_graph);

    auto* c_entropy = app.add_subcommand(
        "entropy", "loop census and Gurevich entropy with a rigorous lower envelope "
                   "(base-vertex independent)");
    add_graph(c_entropy);
    c_entropy->add_option("--base", base, "base vertex");
    c_entropy->add_option("--horizon", horizon, "census horizon");

    auto* c_spr = app.add_subcommand(
        "spr", "strong positive recurrence gate: Vere-Jones generating function, "
               "positive-recurrence series, Gurevich-Zargaryan exit paths");
    add_graph(c_spr);
    c_spr->add_option("--base", base, "base vertex");
    c_spr->add_option("--horizon", horizon, "census horizon");
    c_spr->add_option("--W", W, "window vertices for the exit-path probe");
    c_spr->add_option("--potential", potential_path, "weighted (SPR-potential) variant");

    auto* c_mme = app.add_subcommand(
        "mme", "Parry measure of maximal entropy with eigendata and the transfer "
               "operator's spectral gap");
    add_graph(c_mme);

    auto* c_pressure = app.add_subcommand(
        "pressure", "pressure curve P(t) = log lambda(t) of tilted potentials, with "
                    "convexity and smoothness probes");
    add_graph(c_pressure);
    c_pressure->add_option("--obs", obs_path, "direction potential")->required();
    c_pressure->add_option("--potential", potential_path, "base potential (default 0)");
    c_pressure->add_option("--tmin", tmin, "grid start");
    c_pressure->add_option("--tmax", tmax, "grid end");
    c_pressure->add_option("--steps", steps, "grid steps");

    auto* c_variance = app.add_subcommand(
        "variance", "asymptotic variance: Green-Kubo series, linear-response second "
                    "derivative of the pressure, optional empirical cross-check");
    add_graph(c_variance);
    c_variance->add_option("--obs", obs_path, "observable")->required();
    c_variance->add_option("--n", n, "empirical trajectory length (0 = skip)");
    c_variance->add_option("--R", R, "empirical replicas");
    c_variance->add_option("--seed", seed, "sampler seed");

    auto* c_ldp = app.add_subcommand(
        "ldp", "large deviations: Legendre-transform rate function and exact tilted "
               "tail decay of Birkhoff sums");
    add_graph(c_ldp);
    c_ldp->add_option("--obs", obs_path, "observable")->required();
    c_ldp->add_option("--a", a, "deviation level");
    c_ldp->add_option("--s-points", s_points, "rate-function grid points per side");

    auto* c_tail = app.add_subcommand(
        "tail", "exact return-time tail mu[tau_a > n] by taboo-matrix powers, with "
                "the geometric ratio theta < 1");
    add_graph(c_tail);
    c_tail->add_option("--base", base, "return vertex");
    c_tail->add_option("--N", tail_n, "tail horizon");

    auto* c_sim = app.add_subcommand(
        "simulate", "sample stationary trajectories with per-replica substreams; "
                    "Birkhoff-sum summaries");
    add_graph(c_sim);
    c_sim->add_option("--obs", obs_path, "observable")->required();
    c_sim->add_option("--n", n, "trajectory length");
    c_sim->add_option("--R", R, "replicas");
    c_sim->add_option("--seed", seed, "seed");

    auto* c_stats = app.add_subcommand(
        "stats", "limit-theorem suite: CLT, arcsine law, law of records, functional "
                 "CLT, Laplace transform, iterated logarithm/Strassen, return tails, "
                 "effective intrinsic ergodicity");
    add_graph(c_stats);
    c_stats->add_option("--obs", obs_path, "observable")->required();
    c_stats->add_option("--suite", suite,
                        "comma list: clt,arcsine,records,fclt,laplace,lil,tail,ergodicity");
    c_stats->add_option("--n", n, "trajectory length");
    c_stats->add_option("--R", R, "replicas");
    c_stats->add_option("--seed", seed, "seed");
    c_stats->add_option("--lil-n", lil_n, "long-trajectory length for the lil suite");
    c_stats->add_option("--lil-traj", lil_traj, "trajectories for the Strassen fraction");
    c_stats->add_option("--tolerance-scale", tolerance_scale,
                        "scale every check tolerance (reports keep estimate and reference)");
    c_stats->add_option("--base", base, "return vertex for the tail suite item");

    auto* c_pliss = app.add_subcommand(
        "pliss", "finite-orbit Pesin theory: Pliss points with measure bound, tempered "
                 "envelopes, optimal Pesin constants, Pliss-to-block comparison");
    c_pliss->add_option("--orbits", orbits_path, "orbit ensemble file (JSON)")->required();
    c_pliss->add_option("--out", common.out_dir, "output directory");
    c_pliss->add_option("--mode", mode, "points|envelope|pesin|block");
    c_pliss->add_option("--beta", beta, "Pliss slope");
    c_pliss->add_option("--A", A, "Pliss level");
    c_pliss->add_option("--kappa", kappa, "mass allowed above A");
    c_pliss->add_option("--chi", chi, "hyperbolicity rate");
    c_pliss->add_option("--eps", eps, "temperedness rate");
    c_pliss->add_option("--n0", n0, "Pliss-set step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_graph->parsed()) return cmd_graph(common);
        if (c_entropy->parsed()) return cmd_entropy(common, base, horizon);
        if (c_spr->parsed()) return cmd_spr(common, base, horizon, W, potential_path);
        if (c_mme->parsed()) return cmd_mme(common);
        if (c_pressure->parsed())
            return cmd_pressure(common, obs_path, potential_path, tmin, tmax, steps);
        if (c_variance->parsed()) return cmd_variance(common, obs_path, n, R, seed);
        if (c_ldp->parsed()) return cmd_ldp(common, obs_path, a, s_points);
        if (c_tail->parsed()) return cmd_tail(common, base, tail_n);
        if (c_sim->parsed()) return cmd_simulate(common, obs_path, n, R, seed);
        if (c_stats->parsed())
            return cmd_stats(common, obs_path, suite, n, R, seed, lil_n, lil_traj,
                             tolerance_scale, base);
        if (c_pliss->parsed())
            return cmd_pliss(common, orbits_path, mode, beta, A, kappa, chi, eps, n0);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
