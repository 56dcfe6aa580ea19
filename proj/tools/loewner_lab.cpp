// loewner-lab: seeded Monte Carlo experiments on Loewner evolutions.
//
// Subcommands: simulate | energy | unzip | rate | return-prob | bessel-check
//              | tightness | metrics | rn-check | verify-manifest
// Every experiment writes its data files plus a manifest.json sufficient to
// reproduce each output byte for byte. Exit codes: 0 completion/PASS,
// 2 assertion-style FAIL, 1 usage error.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "loewner/bessel.hpp"
#include "loewner/chordal.hpp"
#include "loewner/errors.hpp"
#include "loewner/geometry.hpp"
#include "loewner/harness.hpp"
#include "loewner/io.hpp"
#include "loewner/radial.hpp"
#include "loewner/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace loewner;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Output {
    std::string file;
    std::string content;
};

// Per-cell substream bases recorded in manifests for reproducibility.
json substream_seeds(std::uint64_t seed, std::size_t n_cells) {
    json out = json::array();
    for (std::size_t i = 0; i < n_cells; ++i)
        out.push_back(hash_combine(seed, i));
    return out;
}

// Writes data files plus the manifest; returns the manifest json.
json write_run(const std::string& out_dir, const std::string& subcommand,
               const json& params, std::uint64_t seed,
               const std::vector<Output>& outputs, long wall_ms) {
    fs::create_directories(out_dir);
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["subcommand"] = subcommand;
    manifest["params"] = params;
    manifest["master_seed"] = seed;
    manifest["wall_ms"] = wall_ms;
    manifest["outputs"] = json::array();
    for (const auto& out : outputs) {
        const std::string path = out_dir + "/" + out.file;
        write_file(path, out.content);
        manifest["outputs"].push_back(
            {{"file", out.file}, {"fnv1a64", string_digest(out.content)}});
    }
    write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

Mode parse_mode(const std::string& s) {
    if (s == "chordal") return Mode::chordal;
    if (s == "radial") return Mode::radial;
    throw FormatError("mode must be chordal or radial");
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stod(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<int> parse_ints(const std::string& csv) {
    std::vector<int> out;
    for (double v : parse_doubles(csv)) out.push_back(static_cast<int>(v));
    return out;
}

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    long ms() const {
        return static_cast<long>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count());
    }
};

// ---- experiment runners shared by the run and verify paths ----

RareEvent event_from_params(const json& p) {
    const std::string ev = p.at("event").get<std::string>();
    if (ev == "cone") return ConeEvent{p.at("theta").get<double>()};
    if (ev == "target-ball") return TargetBallEvent{p.at("r").get<double>()};
    if (ev == "return")
        return ReturnEvent{p.at("n").get<int>(), p.at("N").get<int>(),
                           parse_mode(p.at("mode").get<std::string>())};
    throw FormatError("unknown event " + ev);
}

std::vector<RateCell> run_rate(const json& p, std::uint64_t seed,
                               std::size_t cell_offset,
                               std::size_t single_cell) {
    RateConfig cfg;
    cfg.kappa_grid = p.at("kappas").get<std::vector<double>>();
    if (single_cell != static_cast<std::size_t>(-1))
        cfg.kappa_grid = {cfg.kappa_grid.at(single_cell)};
    cfg.samples = p.at("samples").get<std::size_t>();
    cfg.n_steps = p.at("n_steps").get<std::size_t>();
    cfg.seed = seed;
    cfg.horizon_override = p.value("horizon", 0.0);
    cfg.cell_offset = cell_offset;
    return rate_experiment(event_from_params(p), cfg);
}

ReturnProbResult run_return_prob(const json& p, std::uint64_t seed,
                                 std::size_t cell_offset,
                                 std::size_t single_cell) {
    std::vector<int> n_list = p.at("N_list").get<std::vector<int>>();
    if (single_cell != static_cast<std::size_t>(-1))
        n_list = {n_list.at(single_cell)};
    return return_prob_experiment(
        parse_mode(p.at("mode").get<std::string>()), p.at("n").get<int>(),
        n_list, p.at("kappa").get<double>(), p.at("samples").get<std::size_t>(),
        p.value("horizon", 0.0), p.at("n_steps").get<std::size_t>(), seed,
        p.value("slack", 0.5), 0, cell_offset);
}

std::vector<TightnessRow> run_tightness(const json& p, std::uint64_t seed,
                                        std::size_t cell_offset) {
    TightnessConstants consts;
    consts.c1 = p.value("c1", 1.0);
    consts.c2 = p.value("c2", 1.0);
    consts.c3 = p.value("c3", 1.0);
    consts.beta = p.value("beta", 0.5);
    return tightness_experiment(p.at("kappas").get<std::vector<double>>(),
                                p.at("n_list").get<std::vector<int>>(), consts,
                                p.at("samples").get<std::size_t>(), seed,
                                p.value("eval_L", false),
                                p.value("n_steps", std::size_t(0)), 0,
                                cell_offset);
}

RnCheckResult run_rn_check(const json& p, std::uint64_t seed) {
    return rn_martingale_check(
        p.at("kappa").get<double>(), p.at("T").get<double>(),
        p.at("delta").get<double>(), p.at("samples").get<std::size_t>(), seed,
        p.value("path_steps", std::size_t(20000)));
}

HitExperimentResult run_bessel_check(const json& p, std::uint64_t seed) {
    return bessel_hit_experiment(
        p.at("a").get<double>(), p.at("kappa").get<double>(),
        p.at("x0").get<double>(), p.at("delta").get<double>(),
        p.at("samples").get<std::size_t>(), p.at("dt").get<double>(), seed);
}

json rate_cells_json(const std::vector<RateCell>& cells) {
    json out = json::array();
    for (const auto& c : cells)
        out.push_back({{"kappa", c.kappa},
                       {"samples", c.samples},
                       {"hits", c.hits},
                       {"not_yet", c.not_yet},
                       {"p_hat", c.p_hat},
                       {"ci_lo", c.ci_lo},
                       {"ci_hi", c.ci_hi},
                       {"klogp", c.klogp},
                       {"flag", c.flag}});
    return out;
}

json bessel_result_json(const HitExperimentResult& r) {
    return json{{"p_hat", r.p_hat},       {"p_exact", r.p_exact},
                {"sigma", r.sigma},       {"hits", r.hits},
                {"samples", r.samples},   {"escape_bias_bound",
                                           r.escape_bias_bound},
                {"pass", r.pass}};
}

// Recomputes one pseudo-randomly chosen cell of a stored run and compares
// the regenerated rows and the stored file digests.
int verify_manifest(const std::string& manifest_path) {
    const json manifest = json::parse(read_file(manifest_path));
    const std::string dir = fs::path(manifest_path).parent_path().string();
    const std::string base = dir.empty() ? "." : dir;
    const json& params = manifest.at("params");
    const std::uint64_t seed = manifest.at("master_seed").get<std::uint64_t>();
    const std::string sub = manifest.at("subcommand").get<std::string>();

    // stored digests must match the files on disk
    for (const auto& out : manifest.at("outputs")) {
        const std::string file = out.at("file").get<std::string>();
        const std::string want = out.at("fnv1a64").get<std::string>();
        const std::string got = file_digest(base + "/" + file);
        if (want != got) {
            std::cerr << "digest mismatch for " << file << "\n";
            return 2;
        }
    }

    auto stored_lines = [&](const std::string& file) {
        const std::string text = read_file(base + "/" + file);
        std::vector<std::string> lines;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t next = text.find('\n', pos);
            if (next == std::string::npos) next = text.size();
            lines.push_back(text.substr(pos, next - pos));
            pos = next + 1;
        }
        return lines;
    };
    const std::uint64_t pick =
        fnv1a64(manifest_path.data(), manifest_path.size()) ^ seed;

    if (sub == "rate") {
        const auto kappas = params.at("kappas").get<std::vector<double>>();
        const std::size_t cell = pick % kappas.size();
        const auto cells = run_rate(params, seed, cell, cell);
        const std::string row =
            rate_cells_to_csv(cells); // header + one row
        const auto lines = stored_lines("rate.csv");
        const std::string want = lines.at(cell + 1);
        const std::string got = row.substr(row.find('\n') + 1,
                                           row.rfind('\n') - row.find('\n') - 1);
        if (want != got) {
            std::cerr << "cell " << cell << " mismatch:\n stored: " << want
                      << "\n rerun:  " << got << "\n";
            return 2;
        }
        std::cout << "verified cell " << cell << " of " << kappas.size()
                  << ": OK\n";
        return 0;
    }
    if (sub == "return-prob") {
        const auto n_list = params.at("N_list").get<std::vector<int>>();
        const std::size_t cell = pick % n_list.size();
        const ReturnProbResult res = run_return_prob(params, seed, cell, cell);
        const std::string row = return_rows_to_csv(res.rows);
        const auto lines = stored_lines("return_prob.csv");
        const std::string want = lines.at(cell + 1);
        const std::string got = row.substr(row.find('\n') + 1,
                                           row.rfind('\n') - row.find('\n') - 1);
        if (want != got) {
            std::cerr << "cell " << cell << " mismatch\n";
            return 2;
        }
        std::cout << "verified cell " << cell << " of " << n_list.size()
                  << ": OK\n";
        return 0;
    }
    // remaining subcommands re-run in full (they are cheap or single-cell)
    std::vector<Output> regenerated;
    if (sub == "tightness") {
        regenerated.push_back(
            {"tightness.csv", tightness_rows_to_csv(run_tightness(params, seed, 0))});
    } else if (sub == "rn-check") {
        regenerated.push_back(
            {"rn.csv", rn_rows_to_csv(run_rn_check(params, seed).rows)});
    } else if (sub == "bessel-check") {
        regenerated.push_back(
            {"bessel_check.json",
             bessel_result_json(run_bessel_check(params, seed)).dump(2) + "\n"});
    } else {
        std::cerr << "verify-manifest does not cover subcommand " << sub
                  << "\n";
        return 1;
    }
    for (const auto& out : regenerated) {
        const std::string want = file_digest(base + "/" + out.file);
        const std::string got = string_digest(out.content);
        if (want != got) {
            std::cerr << "recomputed " << out.file << " differs\n";
            return 2;
        }
    }
    std::cout << "verified full recomputation: OK\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Loewner evolution simulation lab"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv";
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv|json output hint")
        ->check(CLI::IsMember({"csv", "json"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "sample a Brownian driver");
    double sim_kappa = 2.0, sim_T = 1.0;
    std::size_t sim_steps = 1024;
    std::string sim_mode = "chordal";
    bool sim_trace = false;
    sim->add_option("--kappa", sim_kappa);
    sim->add_option("--T", sim_T);
    sim->add_option("--n-steps", sim_steps);
    sim->add_option("--mode", sim_mode)
        ->check(CLI::IsMember({"chordal", "radial"}));
    sim->add_flag("--trace", sim_trace, "also solve and write the trace");

    // energy
    auto* en = app.add_subcommand("energy", "Dirichlet energy of a driver CSV");
    std::string en_file;
    std::string en_mode = "chordal";
    en->add_option("driver", en_file)->required();
    en->add_option("--mode", en_mode);

    // unzip
    auto* uz = app.add_subcommand("unzip", "recover the driver of a trace CSV");
    std::string uz_file;
    uz->add_option("trace", uz_file)->required();

    // rate
    auto* rt = app.add_subcommand("rate", "rare-event rates across kappa");
    std::string rt_event = "cone", rt_kappas = "1,0.5,0.25,0.125";
    double rt_theta = M_PI / 3.0, rt_r = 0.1, rt_horizon = 0.0;
    int rt_n = 1, rt_N = 2;
    std::string rt_mode = "radial";
    std::size_t rt_samples = 1000, rt_steps = 256;
    rt->add_option("--event", rt_event)
        ->check(CLI::IsMember({"cone", "return", "target-ball"}));
    rt->add_option("--theta", rt_theta);
    rt->add_option("--r", rt_r);
    rt->add_option("--n", rt_n);
    rt->add_option("--N", rt_N);
    rt->add_option("--mode", rt_mode);
    rt->add_option("--kappas", rt_kappas);
    rt->add_option("--samples", rt_samples);
    rt->add_option("--n-steps", rt_steps);
    rt->add_option("--horizon", rt_horizon);

    // return-prob
    auto* rp = app.add_subcommand("return-prob", "return probability vs N");
    std::string rp_mode = "chordal", rp_Nlist = "2,4";
    int rp_n = 1;
    double rp_kappa = 3.0, rp_horizon = 0.0, rp_slack = 0.5;
    std::size_t rp_samples = 10000, rp_steps = 256;
    rp->add_option("--mode", rp_mode);
    rp->add_option("--n", rp_n);
    rp->add_option("--N-list", rp_Nlist);
    rp->add_option("--kappa", rp_kappa);
    rp->add_option("--samples", rp_samples);
    rp->add_option("--n-steps", rp_steps);
    rp->add_option("--horizon", rp_horizon);
    rp->add_option("--slack", rp_slack);

    // bessel-check
    auto* bc = app.add_subcommand("bessel-check",
                                  "MC vs exact Bessel hitting probability");
    double bc_a = 2.0, bc_kappa = 2.0, bc_x0 = 1.0, bc_delta = 0.5,
           bc_dt = 1e-4;
    std::size_t bc_samples = 100000;
    bc->add_option("--a", bc_a);
    bc->add_option("--kappa", bc_kappa);
    bc->add_option("--x0", bc_x0);
    bc->add_option("--delta", bc_delta);
    bc->add_option("--samples", bc_samples);
    bc->add_option("--dt", bc_dt);

    // tightness
    auto* tg = app.add_subcommand("tightness", "H(n)/L(n) violation sweep");
    std::string tg_kappas = "1,0.5,0.25,0.125", tg_nlist = "8,32,128";
    double tg_c1 = 1.0, tg_c2 = 1.0, tg_c3 = 1.0, tg_beta = 0.5;
    std::size_t tg_samples = 500, tg_steps = 0;
    bool tg_evalL = false;
    tg->add_option("--kappas", tg_kappas);
    tg->add_option("--n-list", tg_nlist);
    tg->add_option("--samples", tg_samples);
    tg->add_option("--n-steps", tg_steps);
    tg->add_option("--c1", tg_c1);
    tg->add_option("--c2", tg_c2);
    tg->add_option("--c3", tg_c3);
    tg->add_option("--beta", tg_beta);
    tg->add_flag("--eval-L", tg_evalL);

    // metrics
    auto* mt = app.add_subcommand("metrics", "distance between two trace CSVs");
    std::string mt_a, mt_b, mt_metric = "hausdorff", mt_mode = "radial";
    mt->add_option("trace_a", mt_a)->required();
    mt->add_option("trace_b", mt_b)->required();
    mt->add_option("--metric", mt_metric)
        ->check(CLI::IsMember({"hausdorff", "sup", "frechet"}));
    mt->add_option("--mode", mt_mode);

    // rn-check
    auto* rn = app.add_subcommand("rn-check",
                                  "radial/chordal RN martingale mean test");
    double rn_kappa = 2.0, rn_T = 0.5, rn_delta = 0.3;
    std::size_t rn_samples = 10000, rn_path_steps = 20000;
    rn->add_option("--kappa", rn_kappa);
    rn->add_option("--T", rn_T);
    rn->add_option("--delta", rn_delta);
    rn->add_option("--samples", rn_samples);
    rn->add_option("--path-steps", rn_path_steps);

    // verify-manifest
    auto* vm = app.add_subcommand("verify-manifest",
                                  "recompute a cell of a stored run");
    std::string vm_path;
    vm->add_option("manifest", vm_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Timer timer;
        if (sim->parsed()) {
            const Mode mode = parse_mode(sim_mode);
            const Driver d =
                sample_brownian_driver(sim_kappa, sim_T, sim_steps, seed, mode);
            std::vector<Output> outs{{"driver.csv", driver_to_csv(d)}};
            json params{{"kappa", sim_kappa}, {"T", sim_T},
                        {"n_steps", sim_steps}, {"mode", sim_mode},
                        {"trace", sim_trace}};
            if (sim_trace) {
                const Trace g = mode == Mode::chordal ? chordal_forward(d)
                                                      : radial_forward(d);
                outs.push_back({"trace.csv", trace_to_csv(g)});
            }
            write_run(out_dir, "simulate", params, seed, outs, timer.ms());
            std::cout << "wrote " << out_dir << "/driver.csv\n";
            return 0;
        }
        if (en->parsed()) {
            const Driver d =
                driver_from_csv(read_file(en_file), parse_mode(en_mode));
            const EnergyValue e = dirichlet_energy(d);
            const json res{{"energy", e.value}, {"infinite", e.is_infinite}};
            std::cout << res.dump() << "\n";
            return 0;
        }
        if (uz->parsed()) {
            const Trace g = trace_from_csv(read_file(uz_file), Mode::chordal);
            const Driver d = unzip_curve(g.points);
            json params{{"trace", uz_file},
                        {"input_digest", file_digest(uz_file)}};
            write_run(out_dir, "unzip", params, seed,
                      {{"driver.csv", driver_to_csv(d)}}, timer.ms());
            std::cout << "wrote " << out_dir << "/driver.csv (hcap = "
                      << format_double(2.0 * d.times.back()) << ")\n";
            return 0;
        }
        if (rt->parsed()) {
            json params{{"event", rt_event},
                        {"kappas", parse_doubles(rt_kappas)},
                        {"samples", rt_samples},
                        {"n_steps", rt_steps},
                        {"horizon", rt_horizon},
                        {"theta", rt_theta},
                        {"r", rt_r},
                        {"n", rt_n},
                        {"N", rt_N},
                        {"mode", rt_mode}};
            const auto cells = run_rate(params, seed, 0, std::size_t(-1));
            const RateExtrapolation fit = extrapolate_rate(cells);
            params["substream_seeds"] =
                substream_seeds(seed, cells.size());
            if (fit.valid)
                params["extrapolation"] = json{{"intercept", fit.intercept},
                                               {"slope", fit.slope},
                                               {"residuals", fit.residuals}};
            write_run(out_dir, "rate", params, seed,
                      {{"rate.csv", rate_cells_to_csv(cells)}}, timer.ms());
            if (format == "json")
                std::cout << rate_cells_json(cells).dump() << "\n";
            else
                std::cout << rate_cells_to_csv(cells);
            if (fit.valid)
                std::cout << "kappa->0 extrapolated k*log p = "
                          << format_double(fit.intercept) << "\n";
            return 0;
        }
        if (rp->parsed()) {
            json params{{"mode", rp_mode},   {"n", rp_n},
                        {"N_list", parse_ints(rp_Nlist)},
                        {"kappa", rp_kappa}, {"samples", rp_samples},
                        {"n_steps", rp_steps}, {"horizon", rp_horizon},
                        {"slack", rp_slack}};
            const ReturnProbResult res =
                run_return_prob(params, seed, 0, std::size_t(-1));
            json manifest_extra{{"slope", res.slope},
                                {"slope_valid", res.slope_valid},
                                {"slope_bound", res.slope_bound},
                                {"pass", res.pass}};
            params["result"] = manifest_extra;
            params["substream_seeds"] =
                substream_seeds(seed, res.rows.size());
            write_run(out_dir, "return-prob", params, seed,
                      {{"return_prob.csv", return_rows_to_csv(res.rows)}},
                      timer.ms());
            std::cout << return_rows_to_csv(res.rows);
            std::cout << "slope = " << format_double(res.slope)
                      << " bound = " << format_double(res.slope_bound)
                      << (res.pass ? " PASS" : " FAIL") << "\n";
            return res.pass ? 0 : 2;
        }
        if (bc->parsed()) {
            json params{{"a", bc_a},       {"kappa", bc_kappa},
                        {"x0", bc_x0},     {"delta", bc_delta},
                        {"samples", bc_samples}, {"dt", bc_dt}};
            const HitExperimentResult res = run_bessel_check(params, seed);
            const json out = bessel_result_json(res);
            write_run(out_dir, "bessel-check", params, seed,
                      {{"bessel_check.json", out.dump(2) + "\n"}}, timer.ms());
            std::cout << out.dump() << "\n";
            return res.pass ? 0 : 2;
        }
        if (tg->parsed()) {
            json params{{"kappas", parse_doubles(tg_kappas)},
                        {"n_list", parse_ints(tg_nlist)},
                        {"samples", tg_samples},
                        {"n_steps", tg_steps},
                        {"c1", tg_c1},
                        {"c2", tg_c2},
                        {"c3", tg_c3},
                        {"beta", tg_beta},
                        {"eval_L", tg_evalL}};
            const auto rows = run_tightness(params, seed, 0);
            params["substream_seeds"] = substream_seeds(seed, rows.size());
            write_run(out_dir, "tightness", params, seed,
                      {{"tightness.csv", tightness_rows_to_csv(rows)}},
                      timer.ms());
            std::cout << tightness_rows_to_csv(rows);
            return 0;
        }
        if (mt->parsed()) {
            const Mode mode = parse_mode(mt_mode);
            const Trace a = trace_from_csv(read_file(mt_a), mode);
            const Trace b = trace_from_csv(read_file(mt_b), mode);
            double value = 0.0;
            if (mt_metric == "hausdorff")
                value = hausdorff_distance(cloud_from_trace(a),
                                           cloud_from_trace(b));
            else if (mt_metric == "sup")
                value = sup_metric(a, b);
            else
                value = unparam_metric(a, b);
            const json res{{"value", value},
                           {"grid_sizes", {a.points.size(), b.points.size()}},
                           {"mode", mt_mode},
                           {"metric", mt_metric}};
            std::cout << res.dump() << "\n";
            return 0;
        }
        if (rn->parsed()) {
            json params{{"kappa", rn_kappa},
                        {"T", rn_T},
                        {"delta", rn_delta},
                        {"samples", rn_samples},
                        {"path_steps", rn_path_steps}};
            const RnCheckResult res = run_rn_check(params, seed);
            params["result"] = json{{"mean", res.mean},
                                    {"stddev", res.stddev},
                                    {"std_error", res.std_error},
                                    {"pass", res.pass}};
            const ThetaPath sample_path =
                simulate_theta(rn_kappa, rn_T, rn_path_steps, rn_delta,
                               hash_combine(seed, 0), ThetaLaw::chordal);
            write_run(out_dir, "rn-check", params, seed,
                      {{"rn.csv", rn_rows_to_csv(res.rows)},
                       {"theta_sample.csv", theta_to_csv(sample_path)}},
                      timer.ms());
            std::cout << "mean = " << format_double(res.mean)
                      << " +- " << format_double(res.std_error)
                      << (res.pass ? " PASS" : " FAIL") << "\n";
            return res.pass ? 0 : 2;
        }
        if (vm->parsed()) return verify_manifest(vm_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
