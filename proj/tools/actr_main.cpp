#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actr/compilation.hpp"
#include "actr/engine.hpp"
#include "actr/experiments.hpp"
#include "actr/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitImpasse = 2;

void apply_param_overrides(actr::Model& model,
                           const std::vector<std::string>& overrides) {
    for (const std::string& kv : overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw actr::DomainError("--param expects key=value, got '" + kv + "'");
        model.params.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw actr::Error("cannot write to '" + path + "'");
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw actr::Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_run(const std::string& model_path, bool print_trace, int max_cycles,
            const std::vector<std::string>& params) {
    actr::Model model = actr::load_model_file(model_path);
    apply_param_overrides(model, params);
    if (max_cycles > 0) model.params.engine.max_cycles = max_cycles;
    actr::Engine engine(std::move(model));
    const actr::HaltReason reason = engine.run();
    if (print_trace) std::cout << actr::serialize(engine.trace());
    std::cerr << "halted: "
              << (reason == actr::HaltReason::Complete  ? "complete"
                  : reason == actr::HaltReason::Impasse ? "impasse"
                                                        : "cycle limit")
              << " after " << engine.cycles() << " cycles at t="
              << actr::format_number(engine.now()) << "s\n";
    return reason == actr::HaltReason::Impasse ? kExitImpasse : kExitOk;
}

int cmd_powerlaw(double d, double dt, int events, const std::string& out_path) {
    const actr::PowerLawResult result = actr::powerlaw_experiment(d, dt, events);
    write_output(out_path, actr::powerlaw_csv(result));
    std::cerr << "loglog_slope " << actr::format_number(result.slope) << "\n";
    return kExitOk;
}

actr::ScheduleSpec parse_schedule(const std::string& spec) {
    // NAME=GAPxCOUNT, e.g. massed=1x10
    const size_t eq = spec.find('=');
    const size_t x = spec.find('x', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || x == std::string::npos || x < eq)
        throw actr::DomainError("--schedule expects NAME=GAPxCOUNT, got '" + spec +
                                "'");
    actr::ScheduleSpec s;
    s.name = spec.substr(0, eq);
    s.gap = std::stod(spec.substr(eq + 1, x - eq - 1));
    s.count = std::stoi(spec.substr(x + 1));
    return s;
}

int cmd_spacing(const std::string& mode_name,
                const std::vector<std::string>& schedule_specs, double test_time,
                double d, double d1, double b, double c, double alpha,
                const std::string& out_path) {
    actr::DecayMode mode;
    if (mode_name == "as91") mode = actr::SpacingAS91{d1, b};
    else if (mode_name == "pa08") mode = actr::SpacingPA08{c, alpha};
    else if (mode_name == "constant") mode = actr::ConstantDecay{d};
    else throw actr::DomainError("--mode must be as91, pa08 or constant");

    std::vector<actr::ScheduleSpec> schedules;
    for (const std::string& spec : schedule_specs)
        schedules.push_back(parse_schedule(spec));
    const auto rows = actr::spacing_experiment(mode, schedules, test_time);
    write_output(out_path, actr::spacing_csv(rows));
    return kExitOk;
}

int cmd_compile(const std::string& model_path, const std::string& trace_path,
                const std::string& rule, const std::vector<std::string>& args,
                std::string name) {
    actr::Model model = actr::load_model_file(model_path);
    const actr::Trace trace = actr::parse_trace(read_file(trace_path));

    actr::Production compiled;
    if (rule == "proceduralize") {
        // Default episode: the run's root goal.
        actr::Pattern pattern;
        if (!args.empty()) {
            pattern.kind = args[0];
        } else {
            if (trace.events.empty() ||
                trace.events.front().kind != actr::TraceKind::GoalPushed)
                throw actr::EpisodeError("trace does not begin with a pushed goal");
            pattern.kind = *trace.events.front().field("kind");
        }
        if (name.empty()) name = "PROC_" + pattern.kind;
        compiled = actr::proceduralize(trace, pattern, model, name);
    } else if (rule == "compose") {
        if (args.size() != 2)
            throw actr::DomainError("--rule compose expects two production names");
        const actr::Production* a = model.productions.by_name(args[0]);
        const actr::Production* b = model.productions.by_name(args[1]);
        if (!a || !b)
            throw actr::DomainError("unknown production '" +
                                    (a ? args[1] : args[0]) + "'");
        // The pair must actually chain somewhere in the trace.
        bool adjacent = false;
        std::string prev;
        for (const auto& e : trace.events) {
            if (e.kind != actr::TraceKind::Fired) continue;
            const std::string& cur = *e.field("production");
            if (prev == args[0] && cur == args[1]) adjacent = true;
            prev = cur;
        }
        if (!adjacent)
            throw actr::CompositionError("'" + args[0] + "' never fires immediately "
                                         "before '" + args[1] + "' in this trace");
        if (name.empty()) name = args[0] + "_" + args[1];
        compiled = actr::compose(*a, *b, model, name);
    } else {
        throw actr::DomainError("--rule must be proceduralize or compose");
    }

    if (model.productions.by_name(compiled.name))
        throw actr::DomainError("production '" + compiled.name + "' already exists");
    model.productions.add(std::move(compiled));
    std::cout << actr::print_model(model);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Production-system cognitive model runner"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a model and print its trace");
    std::string run_model;
    bool run_trace = false;
    int run_max_cycles = 0;
    std::vector<std::string> run_params;
    run->add_option("model", run_model, "model file")->required();
    run->add_flag("--trace", run_trace, "print the full trace to stdout");
    run->add_option("--max-cycles", run_max_cycles, "stop after N cycles");
    run->add_option("--param", run_params, "override a parameter (key=value)");

    // experiment-powerlaw
    auto* pl = app.add_subcommand("experiment-powerlaw",
                                  "Latency across equally spaced practice");
    double pl_d = 0.5, pl_dt = 10.0;
    int pl_events = 100;
    std::string pl_out;
    pl->add_option("--d", pl_d, "constant decay rate (0,1)");
    pl->add_option("--dt", pl_dt, "spacing between uses, seconds");
    pl->add_option("--events", pl_events, "number of uses K");
    pl->add_option("--out", pl_out, "CSV output file (stdout when omitted)");

    // experiment-spacing
    auto* sp = app.add_subcommand("experiment-spacing",
                                  "Activation after massed vs spaced practice");
    std::string sp_mode = "as91";
    std::vector<std::string> sp_schedules;
    double sp_test = 1e4;
    double sp_d = 0.5, sp_d1 = 0.5, sp_b = 1.0, sp_c = 0.25, sp_alpha = 0.1;
    std::string sp_out;
    sp->add_option("--mode", sp_mode, "decay mode: as91|pa08|constant");
    sp->add_option("--schedule", sp_schedules, "schedule NAME=GAPxCOUNT")
        ->required();
    sp->add_option("--test-time", sp_test, "seconds after the last event");
    sp->add_option("--d", sp_d, "constant mode decay rate");
    sp->add_option("--d1", sp_d1, "as91 first-event decay");
    sp->add_option("--b", sp_b, "as91 spacing constant");
    sp->add_option("--c", sp_c, "pa08 scale");
    sp->add_option("--alpha", sp_alpha, "pa08 decay floor");
    sp->add_option("--out", sp_out, "CSV output file (stdout when omitted)");

    // compile
    auto* cp = app.add_subcommand("compile",
                                  "Create a production from an execution trace");
    std::string cp_model, cp_trace, cp_name;
    std::string cp_rule;
    std::vector<std::string> cp_args;
    cp->add_option("model", cp_model, "model file")->required();
    cp->add_option("trace", cp_trace, "trace file from 'run --trace'")->required();
    cp->add_option("--rule", cp_rule, "proceduralize | compose")->required();
    cp->add_option("--name", cp_name, "name for the new production");
    cp->add_option("args", cp_args, "goal kind, or the two productions to compose");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_model, run_trace, run_max_cycles, run_params);
        if (pl->parsed()) return cmd_powerlaw(pl_d, pl_dt, pl_events, pl_out);
        if (sp->parsed())
            return cmd_spacing(sp_mode, sp_schedules, sp_test, sp_d, sp_d1, sp_b,
                               sp_c, sp_alpha, sp_out);
        if (cp->parsed()) return cmd_compile(cp_model, cp_trace, cp_rule, cp_args,
                                             cp_name);
    } catch (const actr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
