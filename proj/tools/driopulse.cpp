// driopulse: synthesize, digitize, simulate, scan, optimize, export, and
// validate robust two-level controls and their digital subpulse trains.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure,
// 64 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drio/control.hpp"
#include "drio/optimize.hpp"
#include "drio/propagate.hpp"
#include "drio/robustness.hpp"
#include "drio/schedule.hpp"
#include "drio/train.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

/// The paper-style frequency annotation treats Omega [rad/ns] as if it were
/// a cyclic rate in 1/s and quotes it in MHz: Omega * 1e3.
std::string mhz_note(double rabi_rad_per_ns)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(i.e. %.1f MHz)", rabi_rad_per_ns * 1e3);
    return buf;
}

nlohmann::json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json doc;
    in >> doc;
    return doc;
}

bool looks_like_train(const nlohmann::json& doc)
{
    return doc.contains("pulses") && doc.contains("tau_ns");
}

drio::ContinuousControl control_by_name(const std::string& name, double rabi)
{
    if (name == "pi") return drio::pi_pulse(rabi);
    if (name == "rio3" || name == "drio3") return drio::rio_third_order(rabi);
    if (name == "rio5" || name == "drio5") return drio::rio_fifth_order(rabi);
    throw CLI::ValidationError("subject", "unknown subject '" + name +
                                              "' (expected pi, drio3, drio5, or a file path)");
}

std::ostream& open_output(std::ofstream& file, const std::string& path)
{
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

/// JSON config presets, applied as defaults before CLI parsing so that
/// explicit flags override them.
struct Config {
    nlohmann::json doc = nlohmann::json::object();

    static Config from_argv(int argc, char** argv)
    {
        Config cfg;
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") {
                cfg.doc = load_json_file(argv[i + 1]);
                if (!cfg.doc.is_object()) {
                    throw std::runtime_error("config: expected a JSON object");
                }
            }
        }
        return cfg;
    }

    template <typename T> void apply(const char* key, T& target) const
    {
        if (doc.contains(key)) target = doc.at(key).get<T>();
    }
};

struct SynthArgs {
    int order = 3;
    double rabi = 0.0;
    double duration = 0.0;
    std::string output;
};

int cmd_synth(const SynthArgs& a)
{
    if ((a.rabi > 0.0) == (a.duration > 0.0)) {
        std::cerr << "synth: give exactly one of --rabi or --duration\n";
        return kExitUsage;
    }
    const double multiple = a.order == 3 ? drio::rio_third_order_params().area_multiple
                                         : drio::fifth_order_area_multiple();
    const double rabi = a.rabi > 0.0 ? a.rabi : multiple * M_PI / a.duration;
    drio::ContinuousControl control =
        a.order == 3 ? drio::rio_third_order(rabi) : drio::rio_fifth_order(rabi);

    std::printf("order           %d\n", a.order);
    std::printf("duration        %.6g ns\n", control.duration);
    std::printf("rabi_amplitude  %.6g rad/ns %s\n", rabi, mhz_note(rabi).c_str());
    std::printf("area_multiple   T*Omega = %.6g pi\n", multiple);
    if (!a.output.empty()) {
        drio::save_waveform_file(control, a.output, 512, a.order);
        std::printf("wrote %s\n", a.output.c_str());
    }
    return kExitOk;
}

struct DigitizeArgs {
    std::string input;
    int n_pulses = 15;
    double ratio = 6.0;
    std::string output;
};

int cmd_digitize(const DigitizeArgs& a)
{
    drio::ContinuousControl control = drio::load_waveform_file(a.input);
    drio::SubpulseTrain train = drio::digitize(control, a.n_pulses, a.ratio);
    drio::ValidityReport report = drio::validate(train);

    std::printf("pulses          %d\n", train.count());
    std::printf("tau             %.6g ns\n", train.tau);
    std::printf("sigma           %.6g ns\n", train.sigma);
    std::printf("total_area      %.9g pi\n", train.total_area() / M_PI);
    std::printf("rwa_margin      %.4g (threshold %.3g)\n", report.second_rwa_margin,
                report.margin_threshold);
    std::printf("validity        %s\n", report.pass ? "pass" : "FAIL");
    if (!a.output.empty()) {
        drio::save_train_file(train, a.output);
        std::printf("wrote %s\n", a.output.c_str());
    }
    return report.pass ? kExitOk : kExitValidation;
}

struct SimulateArgs {
    std::string input;
    std::string model = "delta";
    double tolerance = 1e-10;
    std::string output;
};

int cmd_simulate(const SimulateArgs& a)
{
    int k_max = 0;
    const drio::PropagationModel model = drio::parse_model_tag(a.model, &k_max);
    const nlohmann::json doc = load_json_file(a.input);

    drio::Trajectory traj;
    if (looks_like_train(doc)) {
        const drio::SubpulseTrain train = drio::train_from_json(doc);
        switch (model) {
        case drio::PropagationModel::delta:
            traj = drio::propagate_delta_train(train);
            break;
        case drio::PropagationModel::full:
            traj = drio::propagate_full(train, drio::QubitState::ground(), a.tolerance);
            break;
        case drio::PropagationModel::effective:
            traj = drio::propagate_effective(drio::effective_control(train),
                                             drio::QubitState::ground(), a.tolerance);
            break;
        case drio::PropagationModel::modes:
            traj = drio::propagate_modes(train, drio::ModeTruncation::for_train(train, k_max),
                                         drio::QubitState::ground(), a.tolerance);
            break;
        }
    } else {
        if (model != drio::PropagationModel::effective) {
            std::cerr << "simulate: waveform input supports only model=effective\n";
            return kExitUsage;
        }
        traj = drio::propagate_effective(drio::load_waveform(doc),
                                         drio::QubitState::ground(), a.tolerance);
    }

    std::ofstream file;
    drio::write_trajectory_csv(open_output(file, a.output), traj);
    std::fprintf(stderr, "final_pop_2 %.12g (model %s)\n", traj.final_pop2(),
                 traj.model_tag.c_str());
    return kExitOk;
}

struct ScanArgs {
    std::vector<std::string> subjects;
    std::string model = "delta";
    double rabi = 1.0;
    int n_pulses = 15;
    double ratio = 6.0;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    int alpha_points = 0;
    std::string output;
    std::string summary;
};

int cmd_scan(const ScanArgs& a)
{
    if (a.subjects.empty()) {
        std::cerr << "scan: at least one subject required\n";
        return kExitUsage;
    }
    std::vector<double> grid;
    if (a.alpha_points > 0) {
        if (a.alpha_min < -1.0 || a.alpha_max > 1.0 || a.alpha_min >= a.alpha_max) {
            std::cerr << "scan: alpha grid must satisfy -1 <= min < max <= 1\n";
            return kExitUsage;
        }
        for (int i = 0; i < a.alpha_points; ++i) {
            grid.push_back(a.alpha_min +
                           (a.alpha_max - a.alpha_min) * i / double(a.alpha_points - 1));
        }
    } else {
        grid = drio::default_alpha_grid();
    }

    int k_max = 0;
    drio::ScanOptions options;
    options.model = drio::parse_model_tag(a.model, &k_max);
    options.k_max = k_max;

    std::vector<drio::RobustnessProfile> profiles;
    for (const std::string& subject : a.subjects) {
        options.protocol_tag = subject;
        if (subject == "pi" || subject == "drio3" || subject == "drio5" ||
            subject == "rio3" || subject == "rio5") {
            drio::ContinuousControl control = control_by_name(subject, a.rabi);
            if (subject.rfind("rio", 0) == 0) {
                profiles.push_back(drio::scan(control, grid, options));
            } else {
                profiles.push_back(
                    drio::scan(drio::digitize(control, a.n_pulses, a.ratio), grid, options));
            }
        } else {
            const nlohmann::json doc = load_json_file(subject);
            if (looks_like_train(doc)) {
                profiles.push_back(drio::scan(drio::train_from_json(doc), grid, options));
            } else {
                profiles.push_back(drio::scan(drio::load_waveform(doc), grid, options));
            }
        }
    }

    std::ofstream file;
    std::ostream& out = open_output(file, a.output);
    if (profiles.size() == 1) {
        drio::write_profile_csv(out, profiles.front());
    } else {
        drio::write_comparison_csv(out, drio::compare(profiles));
    }
    if (!a.summary.empty()) {
        std::ofstream sfile(a.summary);
        if (!sfile) throw std::runtime_error("cannot open '" + a.summary + "' for writing");
        sfile << drio::summary_json(profiles).dump(2) << "\n";
    }
    return kExitOk;
}

struct OptimizeArgs {
    int order = 3;
    double rabi = 1.0;
    unsigned seed = 1;
    int starts = 16;
    int dimension = 8;
    double delta_cap = 4.0;
    std::string family = "fourier";
    double fixed_duration = 0.0;
    std::string output;
};

int cmd_optimize(const OptimizeArgs& a)
{
    drio::DetuningAnsatz ansatz;
    ansatz.family = a.family == "elliptic" ? drio::DetuningAnsatz::Family::elliptic_cn
                                           : drio::DetuningAnsatz::Family::fourier_odd;
    ansatz.dimension = a.dimension;
    ansatz.delta_cap = a.delta_cap;
    drio::OptimizerOptions options;
    options.seed = a.seed;
    options.starts = a.starts;

    drio::OptimizeResult result =
        a.fixed_duration > 0.0
            ? drio::optimize_fixed_duration(a.order, a.rabi, a.fixed_duration, ansatz, options)
            : drio::optimize(a.order, a.rabi, ansatz, options);

    std::printf("feasible           %s\n", result.report.feasible ? "yes" : "no");
    std::printf("duration           %.8g ns  (T*Omega = %.6g pi)\n", result.duration,
                result.report.t_times_omega_over_pi);
    std::printf("transfer_infid     %.3e\n", result.report.transfer_infidelity);
    for (std::size_t k = 0; k < result.report.residuals.size(); ++k) {
        std::printf("residual k=%zu      %.3e\n", k + 1, result.report.residuals[k]);
    }
    std::printf("seeds_tried        %d\n", result.report.seeds_tried);
    std::printf("wall_time          %.1f s\n", result.report.wall_time_s);
    if (!a.output.empty()) {
        drio::save_waveform_file(result.control, a.output, 512, a.order, "optimizer");
        std::printf("wrote %s\n", a.output.c_str());
    }
    return result.report.feasible ? kExitOk : kExitNumerical;
}

struct ExportArgs {
    std::string input;
    double dt = 2.0 / 9.0;
    std::string tag = "drio";
    int order = 0;
    std::string output;
};

int cmd_export(const ExportArgs& a)
{
    const drio::SubpulseTrain train = drio::load_train_file(a.input);
    drio::ScheduleMetadata meta;
    meta.protocol_tag = a.tag;
    meta.order = a.order;
    const drio::ScheduleDocument doc = drio::export_schedule(train, a.dt, meta);

    std::ofstream file;
    open_output(file, a.output) << drio::schedule_to_json(doc);
    std::fprintf(stderr, "exported %d instructions spanning %.6g ns at dt=%.6g ns\n",
                 static_cast<int>(doc.instructions.size()), doc.metadata.total_duration_ns,
                 doc.dt_ns);
    return kExitOk;
}

struct ValidateArgs {
    std::string input;
};

int cmd_validate(const ValidateArgs& a)
{
    const nlohmann::json doc = load_json_file(a.input);
    if (looks_like_train(doc)) {
        const drio::SubpulseTrain train = drio::train_from_json(doc);
        const drio::ValidityReport report = drio::validate(train);
        std::printf("train: %d pulses, rwa_margin %.4g, %s\n", train.count(),
                    report.second_rwa_margin, report.pass ? "pass" : "FAIL");
        return report.pass ? kExitOk : kExitValidation;
    }
    if (doc.contains("instructions")) {
        drio::validate_schedule(drio::schedule_from_json(doc.dump()));
        std::printf("schedule: %zu instructions, pass\n", doc.at("instructions").size());
        return kExitOk;
    }
    drio::ContinuousControl control = drio::load_waveform(doc);
    std::printf("waveform: duration %.6g ns, pass\n", control.duration);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Robust two-level control synthesis, digitization, and analysis"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config presetting option defaults");

    Config config;
    try {
        config = Config::from_argv(argc, argv);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }

    SynthArgs synth;
    CLI::App* s = app.add_subcommand("synth", "Synthesize a robust continuous control");
    s->add_option("--order", synth.order, "Robustness order")->check(CLI::IsMember({3, 5}));
    s->add_option("--rabi", synth.rabi, "Rabi amplitude [rad/ns]");
    s->add_option("--duration", synth.duration, "Total duration [ns]");
    s->add_option("-o,--output", synth.output, "Waveform JSON output path");

    DigitizeArgs digitize;
    CLI::App* d = app.add_subcommand("digitize", "Compile a waveform into a subpulse train");
    d->add_option("-i,--input", digitize.input, "Waveform JSON")->required();
    d->add_option("-N,--pulses", digitize.n_pulses, "Number of subpulses");
    d->add_option("--ratio", digitize.ratio, "tau/sigma ratio");
    d->add_option("-o,--output", digitize.output, "Train JSON output path");

    SimulateArgs simulate;
    CLI::App* m = app.add_subcommand("simulate", "Propagate a train or waveform");
    m->add_option("-i,--input", simulate.input, "Train or waveform JSON")->required();
    m->add_option("--model", simulate.model, "delta | full | effective | modes:k");
    m->add_option("--tolerance", simulate.tolerance, "ODE tolerance");
    m->add_option("-o,--output", simulate.output, "Trajectory CSV ('-' for stdout)");

    ScanArgs scan;
    CLI::App* c = app.add_subcommand("scan", "Amplitude-robustness profile");
    c->add_option("subjects", scan.subjects, "pi | drio3 | drio5 | rio3 | rio5 | file paths");
    c->add_option("--model", scan.model, "delta | full | effective | modes:k");
    c->add_option("--rabi", scan.rabi, "Rabi amplitude for named subjects [rad/ns]");
    c->add_option("-N,--pulses", scan.n_pulses, "Subpulses for named drio subjects");
    c->add_option("--ratio", scan.ratio, "tau/sigma for named drio subjects");
    c->add_option("--alpha-min", scan.alpha_min, "Grid start");
    c->add_option("--alpha-max", scan.alpha_max, "Grid end");
    c->add_option("--alpha-points", scan.alpha_points, "Grid size (0: default grid)");
    c->add_option("-o,--output", scan.output, "Profile CSV ('-' for stdout)");
    c->add_option("--summary", scan.summary, "Summary JSON path");

    OptimizeArgs optimize;
    CLI::App* z = app.add_subcommand("optimize", "Reconstruct a robust control");
    z->add_option("--order", optimize.order, "Robustness order")->check(CLI::IsMember({3, 5}));
    z->add_option("--rabi", optimize.rabi, "Rabi amplitude [rad/ns]");
    z->add_option("--seed", optimize.seed, "RNG seed");
    z->add_option("--starts", optimize.starts, "Multi-start count");
    z->add_option("--dimension", optimize.dimension, "Fourier ansatz dimension");
    z->add_option("--delta-cap", optimize.delta_cap, "Detuning bound in units of the Rabi rate");
    z->add_option("--family", optimize.family, "fourier | elliptic");
    z->add_option("--fixed-duration", optimize.fixed_duration,
                  "Skip bisection, solve at this duration [ns]");
    z->add_option("-o,--output", optimize.output, "Waveform JSON output path");

    ExportArgs exp;
    CLI::App* e = app.add_subcommand("export", "Emit a schedule document for a train");
    e->add_option("-i,--input", exp.input, "Train JSON")->required();
    e->add_option("--dt", exp.dt, "Scheduler time resolution [ns]");
    e->add_option("--tag", exp.tag, "Protocol tag recorded in metadata");
    e->add_option("--order", exp.order, "Robustness order recorded in metadata");
    e->add_option("-o,--output", exp.output, "Schedule JSON ('-' for stdout)");

    ValidateArgs validate;
    CLI::App* v = app.add_subcommand("validate", "Validate a train, waveform, or schedule");
    v->add_option("-i,--input", validate.input, "JSON file")->required();

    // Config presets (flags parsed afterwards override these defaults).
    config.apply("pulses", digitize.n_pulses);
    config.apply("pulses", scan.n_pulses);
    config.apply("ratio", digitize.ratio);
    config.apply("ratio", scan.ratio);
    config.apply("rabi", scan.rabi);
    config.apply("tolerance", simulate.tolerance);
    config.apply("model", simulate.model);
    config.apply("model", scan.model);
    config.apply("seed", optimize.seed);
    config.apply("starts", optimize.starts);
    config.apply("dimension", optimize.dimension);
    config.apply("dt", exp.dt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_synth(synth);
        if (d->parsed()) return cmd_digitize(digitize);
        if (m->parsed()) return cmd_simulate(simulate);
        if (c->parsed()) return cmd_scan(scan);
        if (z->parsed()) return cmd_optimize(optimize);
        if (e->parsed()) return cmd_export(exp);
        if (v->parsed()) return cmd_validate(validate);
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
