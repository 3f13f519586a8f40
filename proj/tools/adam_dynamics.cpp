// adam-dynamics: batch-mode Adam as a discrete dynamical system.
// Subcommands: simulate, cycle, sweep, verify, replay.
//
// Exit codes: 0 success, 1 usage, 2 divergence, 3 solver failure,
// 4 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adyn/bifurcation.hpp"
#include "adyn/cycles.hpp"
#include "adyn/dynamics.hpp"
#include "adyn/io.hpp"
#include "adyn/stability.hpp"
#include "adyn/verify.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_divergence = 2;
constexpr int exit_solver = 3;
constexpr int exit_verification = 4;

unsigned sweep_threads() {
    if (const char* env = std::getenv("ADAM_DYNAMICS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // auto
}

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

// "m;v;w" blocks with comma-separated components, or "m,v,w" for scalars.
adyn::AdamState parse_x0(const std::string& s, std::size_t n) {
    if (s.find(';') != std::string::npos) {
        std::vector<std::vector<double>> blocks;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ';')) blocks.push_back(parse_numbers(tok));
        if (blocks.size() != 3)
            throw std::invalid_argument("--x0 needs three ;-separated blocks m;v;w");
        return adyn::AdamState(blocks[0], blocks[1], blocks[2]);
    }
    const std::vector<double> vals = parse_numbers(s);
    if (vals.size() == 3 && n == 1)
        return adyn::AdamState::scalar(vals[0], vals[1], vals[2]);
    if (vals.size() == 3 * n) {
        std::vector<double> m(vals.begin(), vals.begin() + n);
        std::vector<double> v(vals.begin() + n, vals.begin() + 2 * n);
        std::vector<double> w(vals.begin() + 2 * n, vals.end());
        return adyn::AdamState(m, v, w);
    }
    throw std::invalid_argument("--x0 must carry 3n components");
}

adyn::QuadraticObjective load_matrix_objective(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file " + path);
    json j;
    in >> j;
    const auto& rows = j.at("C");
    const std::size_t n = rows.size();
    adyn::Matrix C(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw std::invalid_argument("matrix file: C not square");
        for (std::size_t k = 0; k < n; ++k) C(i, k) = rows[i][k].get<double>();
    }
    std::vector<double> b(n, 0.0);
    if (j.contains("b")) {
        if (j["b"].size() != n) throw std::invalid_argument("matrix file: b length mismatch");
        for (std::size_t i = 0; i < n; ++i) b[i] = j["b"][i].get<double>();
    }
    const double a = j.value("a", 0.0);
    return adyn::QuadraticObjective(C, b, a);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open params file " + path);
    json j;
    in >> j;
    return j;
}

// overwrite `value` from the params file unless the flag was given explicitly
template <typename T>
void take_param(const json& j, const CLI::App* cmd, const char* flag, const char* key,
                T& value) {
    if (j.contains(key) && cmd->count(flag) == 0) value = j.at(key).get<T>();
}

void emit_manifest(const std::string& out_path, const std::string& command,
                   const std::vector<std::string>& argv,
                   const std::map<std::string, std::string>& params,
                   const std::vector<std::string>& outputs) {
    write_file(out_path + ".manifest.json",
               adyn::make_manifest_json(command, argv, params, outputs));
}

ordered_json state_json(const adyn::AdamState& x) {
    return ordered_json{{"m", x.m}, {"v", x.v}, {"w", x.w}};
}

ordered_json eigs_json(const std::vector<std::complex<double>>& eigs) {
    ordered_json arr = ordered_json::array();
    for (const auto& z : eigs) arr.push_back({z.real(), z.imag()});
    return arr;
}

// ---------------------------------------------------------------- simulate
struct SimulateArgs {
    double alpha = 0.001, beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8, c = 1.0;
    std::string matrix_file, x0 = "0,0,0", bias = "on", preset, out, params_file;
    long steps = 1000, record_every = 1;
};

// JSON escape hatch mirroring the flags; explicit flags win
void apply_params_file(SimulateArgs& a, const CLI::App* cmd) {
    const json j = load_json(a.params_file);
    take_param(j, cmd, "--alpha", "alpha", a.alpha);
    take_param(j, cmd, "--beta1", "beta1", a.beta1);
    take_param(j, cmd, "--beta2", "beta2", a.beta2);
    take_param(j, cmd, "--epsilon", "epsilon", a.epsilon);
    take_param(j, cmd, "--c", "c", a.c);
    take_param(j, cmd, "--steps", "steps", a.steps);
    take_param(j, cmd, "--record-every", "record_every", a.record_every);
    take_param(j, cmd, "--bias-correction", "bias_correction", a.bias);
    take_param(j, cmd, "--x0", "x0", a.x0);
}

int run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
    std::optional<adyn::QuadraticObjective> obj;
    adyn::HyperParams p(a.alpha, a.beta1, a.beta2, a.epsilon);
    adyn::AdamState x0 = adyn::AdamState::scalar(0, 0, 0);

    if (!a.preset.empty()) {
        const adyn::Preset pre = adyn::experiment_preset(a.preset);
        p = pre.params;
        obj = pre.objective;
        x0 = pre.x0;
    } else {
        obj = a.matrix_file.empty() ? adyn::QuadraticObjective::scalar(a.c)
                                    : load_matrix_objective(a.matrix_file);
        x0 = parse_x0(a.x0, obj->dim());
    }
    const bool bias = a.bias != "off";

    const adyn::TrajectoryRecord rec =
        adyn::simulate(x0, p, *obj, a.steps, bias, a.record_every);

    std::ostringstream csv;
    adyn::write_trajectory_csv(csv, rec);
    std::map<std::string, std::string> params{
        {"alpha", adyn::format_double(p.alpha)},
        {"beta1", adyn::format_double(p.beta1)},
        {"beta2", adyn::format_double(p.beta2)},
        {"epsilon", adyn::format_double(p.epsilon)},
        {"steps", std::to_string(a.steps)},
        {"record_every", std::to_string(a.record_every)},
        {"bias_correction", bias ? "on" : "off"},
        {"preset", a.preset.empty() ? "-" : a.preset}};

    if (!a.out.empty()) {
        write_file(a.out, csv.str());
        emit_manifest(a.out, "simulate", argv, params, {a.out});
    } else {
        std::cout << csv.str();
    }

    if (rec.diverged) {
        std::cerr << "divergence at step " << rec.divergence_step
                  << "; partial trajectory retained\n";
        return exit_divergence;
    }
    return exit_ok;
}

// ------------------------------------------------------------------- cycle
struct CycleArgs {
    double alpha = 0.5, beta1 = 0.2, beta2 = 0.5, c = 1.0, epsilon = 0.0;
    std::string newton_seed, out;
    int period = 2;
};

int run_cycle(const CycleArgs& a, const std::vector<std::string>& argv) {
    ordered_json rep;
    const adyn::QuadraticObjective obj = adyn::QuadraticObjective::scalar(a.c);
    const auto chat = adyn::c_exception(a.alpha, a.beta1, a.beta2);
    const double det = adyn::det_dF(a.alpha, a.beta1, a.beta2, a.c);
    const bool at_exception =
        chat && std::abs(a.c - *chat) <= 1e-8 * std::max(1.0, std::abs(*chat));

    int code = exit_ok;
    if (!a.newton_seed.empty()) {
        // user-supplied seed: Newton search for a period-q orbit
        std::ifstream in(a.newton_seed);
        if (!in) throw std::invalid_argument("cannot open seed file " + a.newton_seed);
        json js;
        in >> js;
        const adyn::AdamState seed(js.at("m").get<std::vector<double>>(),
                                   js.at("v").get<std::vector<double>>(),
                                   js.at("w").get<std::vector<double>>());
        const adyn::HyperParams p(a.alpha, a.beta1, a.beta2, a.epsilon);
        const adyn::NewtonCycleResult nr =
            adyn::newton_find_cycle(seed, a.period, p, obj);
        rep["command"] = "newton";
        rep["converged"] = nr.converged;
        rep["residual"] = nr.residual;
        rep["minimal_period"] = nr.minimal_period;
        rep["iterations"] = nr.iterations;
        if (!nr.message.empty()) rep["message"] = nr.message;
        if (nr.converged) {
            rep["orbit"] = ordered_json::array();
            for (const auto& pt : nr.orbit) rep["orbit"].push_back(state_json(pt));
            const adyn::Matrix j = adyn::numeric_jacobian(
                [&](const std::vector<double>& y) {
                    adyn::AdamState s = adyn::AdamState::from_flat(y);
                    for (int i = 0; i < a.period; ++i) s = adyn::step_autonomous(s, p, obj);
                    return s.to_flat();
                },
                nr.x.to_flat());
            if (j.rows() <= 3) {
                const auto st = adyn::make_stability_report(j);
                rep["eigenvalues"] = eigs_json(st.eigenvalues);
                rep["spectral_radius"] = st.spectral_radius;
                rep["classification"] = adyn::to_string(st.classification);
            }
        } else {
            code = exit_solver;
        }
    } else if (a.epsilon > 0.0) {
        // continuation from the closed form at 0 up to the requested epsilon
        std::vector<double> targets;
        const double start = std::min(a.epsilon / 1000.0, 1e-9);
        for (double e : adyn::log_spaced(std::max(start, 1e-300), a.epsilon, 10))
            targets.push_back(e);
        const adyn::ContinuationResult cr =
            adyn::continue_in_epsilon(a.alpha, a.beta1, a.beta2, a.c, targets);
        rep["command"] = "continuation";
        rep["converged"] = cr.fully_converged;
        if (!cr.diagnostic.empty()) rep["diagnostic"] = cr.diagnostic;
        rep["continuation"] = ordered_json::array();
        for (const auto& s : cr.samples) {
            ordered_json step{{"epsilon", s.epsilon}, {"converged", s.converged}};
            if (s.cycle) {
                step["residual"] = s.cycle->residual;
                step["x1"] = state_json(s.cycle->x1);
            }
            if (s.report) {
                step["spectral_radius"] = s.report->spectral_radius;
                step["classification"] = adyn::to_string(s.report->classification);
            }
            rep["continuation"].push_back(std::move(step));
        }
        if (cr.fully_converged) {
            const auto& last = cr.samples.back();
            rep["x1"] = state_json(last.cycle->x1);
            rep["x2"] = state_json(last.cycle->x2);
            rep["residual"] = last.cycle->residual;
            rep["eigenvalues"] = eigs_json(last.report->eigenvalues);
            rep["spectral_radius"] = last.report->spectral_radius;
            rep["classification"] = adyn::to_string(last.report->classification);
        } else {
            code = exit_solver;
        }
    } else {
        // eps = 0: closed form plus the analytic Jacobian
        const adyn::TwoCycle cyc = adyn::closed_form_two_cycle(a.alpha, a.beta1, a.c);
        const adyn::Matrix j =
            adyn::analytic_jacobian_T2_scalar(a.alpha, a.beta1, a.beta2, a.c);
        const auto st = adyn::make_stability_report(j);
        rep["command"] = "closed-form";
        rep["x1"] = state_json(cyc.x1);
        rep["x2"] = state_json(cyc.x2);
        rep["residual"] = cyc.residual;
        rep["jacobian"] = ordered_json::array();
        for (std::size_t i = 0; i < 3; ++i)
            rep["jacobian"].push_back({j(i, 0), j(i, 1), j(i, 2)});
        rep["eigenvalues"] = eigs_json(st.eigenvalues);
        rep["spectral_radius"] = st.spectral_radius;
        rep["classification"] = adyn::to_string(st.classification);
    }

    rep["det_dF"] = det;
    if (chat)
        rep["c_exception"] = *chat;
    else
        rep["c_exception"] = nullptr;
    if (at_exception) rep["continuation_not_guaranteed"] = true;

    const std::string text = rep.dump(2) + "\n";
    if (!a.out.empty()) {
        write_file(a.out, text);
        emit_manifest(a.out, "cycle", argv,
                      {{"alpha", adyn::format_double(a.alpha)},
                       {"beta1", adyn::format_double(a.beta1)},
                       {"beta2", adyn::format_double(a.beta2)},
                       {"c", adyn::format_double(a.c)},
                       {"epsilon", adyn::format_double(a.epsilon)}},
                      {a.out});
    } else {
        std::cout << text;
    }
    if (code == exit_solver) std::cerr << "cycle solver failed\n";
    return code;
}

// ------------------------------------------------------------------- sweep
struct SweepArgs {
    std::string preset, out = "sweep.csv", matrix_file;
    double alpha_min = 1e-4, alpha_max = 0.01;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-6, c = 10.0;
    int points = adyn::default_sweep_points;
    long transient = adyn::default_transient_steps;
    long samples = adyn::default_sample_steps;
    std::string x0, params_file;
};

void apply_params_file(SweepArgs& a, const CLI::App* cmd) {
    const json j = load_json(a.params_file);
    take_param(j, cmd, "--alpha-min", "alpha_min", a.alpha_min);
    take_param(j, cmd, "--alpha-max", "alpha_max", a.alpha_max);
    take_param(j, cmd, "--points", "points", a.points);
    take_param(j, cmd, "--beta1", "beta1", a.beta1);
    take_param(j, cmd, "--beta2", "beta2", a.beta2);
    take_param(j, cmd, "--epsilon", "epsilon", a.epsilon);
    take_param(j, cmd, "--c", "c", a.c);
    take_param(j, cmd, "--transient", "transient", a.transient);
    take_param(j, cmd, "--samples", "samples", a.samples);
    take_param(j, cmd, "--x0", "x0", a.x0);
}

int run_sweep_cmd(const SweepArgs& a, const std::vector<std::string>& argv) {
    std::optional<adyn::SweepConfig> cfg;
    if (!a.preset.empty()) {
        adyn::Preset pre = adyn::experiment_preset(a.preset);
        cfg = pre.sweep;
    } else {
        adyn::QuadraticObjective obj = a.matrix_file.empty()
                                           ? adyn::QuadraticObjective::scalar(a.c)
                                           : load_matrix_objective(a.matrix_file);
        adyn::AdamState x0 =
            a.x0.empty()
                ? adyn::AdamState(std::vector<double>(obj.dim(), 0.0),
                                  std::vector<double>(obj.dim(), 0.0),
                                  std::vector<double>(obj.dim(), adyn::machine_eps))
                : parse_x0(a.x0, obj.dim());
        cfg = adyn::SweepConfig{
            adyn::log_spaced(a.alpha_min, a.alpha_max, a.points),
            adyn::HyperParams(a.alpha_min, a.beta1, a.beta2, a.epsilon),
            obj,
            x0,
            a.transient,
            a.samples,
            true};
    }

    const adyn::OrbitDiagram diagram = adyn::run_sweep(*cfg, sweep_threads());

    std::ostringstream csv;
    adyn::write_orbit_csv(csv, diagram);
    write_file(a.out, csv.str());

    std::map<std::string, std::string> params{
        {"preset", a.preset.empty() ? "-" : a.preset},
        {"beta1", adyn::format_double(cfg->base.beta1)},
        {"beta2", adyn::format_double(cfg->base.beta2)},
        {"epsilon", adyn::format_double(cfg->base.epsilon)},
        {"alpha_min", adyn::format_double(cfg->values.front())},
        {"alpha_max", adyn::format_double(cfg->values.back())},
        {"points", std::to_string(cfg->values.size())},
        {"transient_steps", std::to_string(cfg->transient_steps)},
        {"sample_steps", std::to_string(cfg->sample_steps)}};
    emit_manifest(a.out, "sweep", argv, params, {a.out});

    std::cerr << "sweep written to " << a.out << " (predicted bifurcation "
              << adyn::format_double(diagram.predicted_bifurcation) << ")\n";
    return exit_ok;
}

// ------------------------------------------------------------------ verify
int run_verify(const std::string& suite, std::uint64_t seed) {
    const auto results = adyn::run_verify_suite(suite, seed);
    for (const auto& r : results)
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name
                  << "  worst_error=" << adyn::format_double(r.worst_error) << "  ["
                  << r.detail << "]\n";
    return adyn::all_passed(results) ? exit_ok : exit_verification;
}

// ------------------------------------------------------------------ replay
int dispatch_args(std::vector<std::string> args);

int run_replay_impl(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        std::cerr << "cannot open manifest " << manifest_path << "\n";
        return exit_usage;
    }
    json j;
    in >> j;
    std::vector<std::string> argv = j.at("argv").get<std::vector<std::string>>();
    return dispatch_args(std::move(argv));
}

int dispatch_args(std::vector<std::string> args) {
    CLI::App app{"Batch-mode Adam as a discrete dynamical system"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Iterate Adam and write a trajectory CSV");
    s->add_option("--alpha", sim.alpha);
    s->add_option("--beta1", sim.beta1);
    s->add_option("--beta2", sim.beta2);
    s->add_option("--epsilon", sim.epsilon);
    s->add_option("--c", sim.c, "scalar objective f(w) = c/2 w^2");
    s->add_option("--matrix", sim.matrix_file, "JSON file with C (and optional b, a)");
    s->add_option("--steps", sim.steps)->check(CLI::PositiveNumber);
    s->add_option("--x0", sim.x0, "initial state m,v,w (or m..;v..;w..)");
    s->add_option("--bias-correction", sim.bias)->check(CLI::IsMember({"on", "off"}));
    s->add_option("--record-every", sim.record_every)->check(CLI::PositiveNumber);
    s->add_option("--preset", sim.preset, "experiment preset 1|2|3|multidim");
    s->add_option("--params", sim.params_file, "JSON file with the same keys as the flags");
    s->add_option("--out", sim.out, "output CSV (stdout when absent)");

    CycleArgs cyc;
    auto* c = app.add_subcommand("cycle", "Closed-form 2-cycle, stability, continuation");
    c->add_option("--alpha", cyc.alpha)->required();
    c->add_option("--beta1", cyc.beta1)->required();
    c->add_option("--beta2", cyc.beta2)->required();
    c->add_option("--c", cyc.c)->required();
    c->add_option("--epsilon", cyc.epsilon, "continue the cycle from 0 to this epsilon");
    c->add_option("--newton-seed", cyc.newton_seed, "JSON state file seeding a Newton search");
    c->add_option("--period", cyc.period, "orbit period for the Newton search");
    c->add_option("--out", cyc.out, "output JSON (stdout when absent)");

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Orbit diagram over a learning-rate range");
    w->add_option("--preset", sw.preset, "experiment preset 1|2|3|multidim");
    w->add_option("--alpha-min", sw.alpha_min);
    w->add_option("--alpha-max", sw.alpha_max);
    w->add_option("--points", sw.points)->check(CLI::PositiveNumber);
    w->add_option("--beta1", sw.beta1);
    w->add_option("--beta2", sw.beta2);
    w->add_option("--epsilon", sw.epsilon);
    w->add_option("--c", sw.c);
    w->add_option("--matrix", sw.matrix_file);
    w->add_option("--transient", sw.transient);
    w->add_option("--samples", sw.samples);
    w->add_option("--x0", sw.x0);
    w->add_option("--params", sw.params_file, "JSON file with the same keys as the flags");
    w->add_option("--out", sw.out, "output CSV path");

    std::string suite = "all";
    std::uint64_t seed = 20240817;
    auto* v = app.add_subcommand("verify", "Run the invariant property suites");
    v->add_option("--suite", suite)
        ->check(CLI::IsMember({"closed-form", "jacobian", "invariance", "decay", "all"}));
    v->add_option("--seed", seed, "seed for randomized cases");

    std::string manifest;
    auto* r = app.add_subcommand("replay", "Re-run a manifest byte-identically");
    r->add_option("manifest", manifest, "path to a .manifest.json")->required();

    // CLI11 wants argv reversed, without the program name
    std::vector<std::string> rev(args.rbegin(), args.rend());
    rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::cerr << (e.get_exit_code() == 0 ? "" : "usage error: ") << e.what() << "\n";
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return exit_ok;
        }
        std::cerr << app.help();
        return exit_usage;
    }

    try {
        if (s->parsed()) {
            if (!sim.params_file.empty()) apply_params_file(sim, s);
            return run_simulate(sim, args);
        }
        if (c->parsed()) return run_cycle(cyc, args);
        if (w->parsed()) {
            if (!sw.params_file.empty()) apply_params_file(sw, w);
            return run_sweep_cmd(sw, args);
        }
        if (v->parsed()) return run_verify(suite, seed);
        if (r->parsed()) return run_replay_impl(manifest);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_solver;
    }
    return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return dispatch_args(std::move(args));
}
