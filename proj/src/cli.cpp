#include "abmcalib/cli.hpp"

#include "abmcalib/bindings.hpp"
#include "abmcalib/bo_engine.hpp"
#include "abmcalib/errors.hpp"
#include "abmcalib/summary_io.hpp"
#include "abmcalib/text.hpp"
#include "abmcalib/toy_simulator.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace abmcalib::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

const char* kEvaluateHeader =
    "eps_od,eps_mode,eps_workers,eps_global,crit_mode_share,crit_work_spatial,"
    "crit_edu_spatial,crit_worker_count,crit_total_legs,crit_spatial_legs";

std::atomic<bool> g_interrupt{false};

std::string timestamp_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

/// Append-only sidecar log; the single place timestamps and durations go,
/// keeping the archives byte-reproducible.
class RunLog {
public:
    explicit RunLog(const std::string& path) : out_(path, std::ios::app) {}

    void line(const std::string& message) {
        if (!out_) return;
        out_ << timestamp_now() << ' ' << message << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

/// Exclusive ownership of an output directory for the process lifetime.
class OutputLock {
public:
    explicit OutputLock(const fs::path& dir) : path_(dir / ".lock") {
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (f == nullptr) {
            throw IoError("output directory is locked by another calibration (" + path_.string() +
                          " exists; delete it if no other process is running)");
        }
        std::fprintf(f, "%d\n", static_cast<int>(::getpid()));
        std::fclose(f);
    }
    ~OutputLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    fs::path path_;
};

struct ResolvedSetup {
    ParameterSpace space;
    std::unique_ptr<Evaluator> evaluator;
    RunConfig run;
    ParetoConfig pareto;
};

ResolvedSetup resolve_setup(const ToolConfig& config) {
    std::vector<std::string> errors;
    ResolvedSetup setup;
    setup.pareto = config.pareto;

    if (config.binding == SimulatorBinding::Benchmark) {
        BenchmarkProblem problem =
            config.benchmark.lower
                ? BenchmarkProblem::make(config.benchmark.function, config.benchmark.dimension,
                                         *config.benchmark.lower, *config.benchmark.upper)
                : BenchmarkProblem::make(config.benchmark.function, config.benchmark.dimension);
        setup.space = problem.space();
        setup.evaluator = std::make_unique<BenchmarkEvaluator>(problem);
    } else {
        try {
            setup.space = ParameterSpace::load_csv(config.resolve(config.space_file));
        } catch (const std::exception& e) {
            errors.push_back(std::string("space_file: ") + e.what());
        }

        if (config.binding == SimulatorBinding::Toy) {
            ToyScenario::Options options;
            options.n_agents = config.toy.agents;
            options.n_zones = config.toy.zones;
            options.n_districts = config.toy.districts;
            options.seed = config.toy.scenario_seed;
            try {
                ToyScenario scenario = ToyScenario::build(options);
                if (setup.space.dimension() > 0) {
                    for (const auto& name : ToyScenario::beta_names()) {
                        if (!setup.space.contains(name)) {
                            errors.push_back("space_file: missing behavioral parameter '" + name +
                                             "'");
                        }
                    }
                }
                const auto zone_map = scenario.zone_district_map();
                SimulationSummary targets =
                    load_summary_dir(config.resolve(config.targets_dir), &zone_map);
                setup.evaluator = std::make_unique<ToyEvaluator>(
                    std::move(scenario), setup.space, std::move(targets),
                    config.toy.simulation_seed);
            } catch (const std::exception& e) {
                errors.push_back(std::string("toy binding: ") + e.what());
            }
        } else {
            try {
                SimulationSummary targets = load_summary_dir(config.resolve(config.targets_dir));
                ExternalSimulatorConfig external = config.external;
                external.workdir = config.resolve(external.workdir);
                setup.evaluator = std::make_unique<ExternalEvaluator>(
                    std::move(external), setup.space, std::move(targets));
            } catch (const std::exception& e) {
                errors.push_back(std::string("external binding: ") + e.what());
            }
        }
    }

    if (!errors.empty()) {
        std::string what = "configuration rejected:";
        for (const auto& e : errors) what += "\n  - " + e;
        throw ConfigError(what);
    }

    setup.run.space = setup.space;
    setup.run.n_initial = config.initial_samples;
    setup.run.max_iterations = config.iterations;
    setup.run.max_wall_clock_seconds = config.wall_clock_hours * 3600.0;
    setup.run.retrain_period = config.retrain_every;
    setup.run.forest = config.forest;
    setup.run.acquisition = config.acquisition;
    setup.run.master_seed = config.master_seed;
    setup.run.n_runs = config.runs;
    setup.run.failure_cap = config.failure_cap;
    setup.run.validate();
    return setup;
}

void write_checkpoint(const std::string& path, const std::string& fingerprint, std::size_t run_id,
                      std::size_t records, bool completed) {
    Json j;
    j["version"] = 1;
    j["fingerprint"] = fingerprint;
    j["run"] = run_id;
    j["records"] = records;
    j["completed"] = completed;
    write_text_file(path, j.dump() + "\n");
}

std::string criteria_csv(const std::optional<CriterionVector>& criteria) {
    std::string out;
    for (std::size_t i = 0; i < 6; ++i) {
        out += ',';
        if (criteria) out += fmt_double((*criteria)[i]);
    }
    return out;
}

void write_trace_csv(const std::string& path, const std::vector<RunState>& states) {
    std::string out = "iteration";
    std::size_t longest = 0;
    for (const auto& state : states) {
        out += ",run_" + std::to_string(state.run_id);
        longest = std::max(longest, state.archive.size());
    }
    out += '\n';
    std::vector<double> incumbent(states.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < longest; ++i) {
        out += std::to_string(i + 1);
        for (std::size_t r = 0; r < states.size(); ++r) {
            out += ',';
            if (i < states[r].archive.size()) {
                incumbent[r] = std::min(incumbent[r], states[r].archive[i].objective());
                out += fmt_double(incumbent[r]);
            }
        }
        out += '\n';
    }
    write_text_file(path, out);
}

bool write_best_csv(const std::string& path, const ParameterSpace& space,
                    const std::vector<RunState>& states) {
    const ArchiveRecord* best = nullptr;
    for (const auto& state : states) {
        const ArchiveRecord* candidate = state.best_record();
        if (candidate != nullptr &&
            (best == nullptr || candidate->cost.eps_global < best->cost.eps_global)) {
            best = candidate;
        }
    }
    if (best == nullptr) return false;
    std::string out = "name,value\n";
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        out += space.spec(i).name;
        out += ',';
        out += fmt_double(best->theta[i]);
        out += '\n';
    }
    write_text_file(path, out);
    return true;
}

std::vector<ParetoEntry> entries_from_records(const std::vector<ArchiveRecord>& records) {
    std::vector<ParetoEntry> entries;
    for (const auto& record : records) {
        if (record.failed || !record.criteria) continue;
        entries.push_back({record.run_id, record.iteration, record.cost.eps_global,
                           *record.criteria});
    }
    return entries;
}

ParetoFront write_pareto_report(const std::string& path,
                                const std::vector<std::vector<ArchiveRecord>>& run_archives,
                                const ParetoConfig& pareto) {
    std::vector<ParetoEntry> entries;
    for (const auto& archive : run_archives) {
        const auto batch = entries_from_records(archive);
        entries.insert(entries.end(), batch.begin(), batch.end());
    }
    const ParetoFront front = pareto_front(entries, pareto);

    std::string out = "run_id,iteration,eps_od,eps_mode,eps_workers,eps_global";
    for (const char* name : kCriterionNames) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (const auto& entry : front.entries) {
        const ArchiveRecord* record = nullptr;
        for (const auto& archive : run_archives) {
            for (const auto& r : archive) {
                if (r.run_id == entry.run_id && r.iteration == entry.iteration) {
                    record = &r;
                    break;
                }
            }
        }
        if (record == nullptr) continue;
        out += std::to_string(entry.run_id) + ',' + std::to_string(entry.iteration) + ',' +
               fmt_double(record->cost.eps_od) + ',' + fmt_double(record->cost.eps_mode) + ',' +
               fmt_double(record->cost.eps_workers) + ',' + fmt_double(record->cost.eps_global);
        for (double c : entry.criteria) {
            out += ',';
            out += fmt_double(c);
        }
        out += '\n';
    }
    write_text_file(path, out);
    return front;
}

std::vector<std::vector<ArchiveRecord>> load_run_archives(const ToolConfig& config,
                                                          std::size_t n_runs) {
    std::vector<std::vector<ArchiveRecord>> archives;
    const fs::path out_dir(config.resolve(config.output_dir));
    for (std::size_t run_id = 1; run_id <= n_runs; ++run_id) {
        const fs::path archive_path = out_dir / ("run_" + std::to_string(run_id)) / "archive.jsonl";
        if (!fs::exists(archive_path)) continue;
        archives.push_back(load_archive_jsonl(archive_path.string()));
    }
    return archives;
}

int map_exception_to_exit(const char* command) {
    try {
        throw;
    } catch (const ConfigError& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace

std::atomic<bool>& interrupt_flag() { return g_interrupt; }

int cmd_init(const std::string& directory, bool force) {
    try {
        const fs::path dir(directory.empty() ? "." : directory);
        fs::create_directories(dir);

        const fs::path config_path = dir / "config.json";
        const fs::path space_path = dir / "space.csv";
        const fs::path targets_dir = dir / "targets";
        if (!force) {
            for (const fs::path& p : {config_path, space_path, targets_dir}) {
                if (fs::exists(p)) {
                    throw IoError(p.string() + " already exists (use --force to overwrite)");
                }
            }
        }

        write_text_file(config_path.string(), ToolConfig::template_text());

        const ParameterSpace space = ToyScenario::default_space();
        space.save_csv(space_path.string());

        // Targets generated at the documented ground-truth values with the
        // template's scenario/simulation seeds, so `evaluate` on
        // theta_star.csv scores exactly zero.
        const ToolConfig defaults = ToolConfig::load(config_path.string());
        ToyScenario::Options options;
        options.n_agents = defaults.toy.agents;
        options.n_zones = defaults.toy.zones;
        options.n_districts = defaults.toy.districts;
        options.seed = defaults.toy.scenario_seed;
        const ToyScenario scenario = ToyScenario::build(options);
        const ParameterVector theta_star = ToyScenario::documented_theta_star();
        const SimulationSummary targets =
            toy_simulate(scenario, space, theta_star, defaults.toy.simulation_seed);
        write_summary_dir(targets_dir.string(), targets);
        write_params_csv((targets_dir / "theta_star.csv").string(), space, theta_star);

        std::cout << "initialized " << fs::absolute(dir).string() << "\n"
                  << "  config.json        commented configuration (toy binding)\n"
                  << "  space.csv          24-parameter search space\n"
                  << "  targets/           baseline files generated at targets/theta_star.csv\n"
                  << "run `abm-calib calibrate --config " << (dir / "config.json").string()
                  << "` to start\n";
        return kExitOk;
    } catch (...) {
        return map_exception_to_exit("init");
    }
}

int cmd_calibrate(const std::string& config_path, const CalibrateOptions& options) {
    try {
        ToolConfig config = ToolConfig::load(config_path);
        if (options.seed) config.master_seed = *options.seed;
        if (options.runs) config.runs = *options.runs;
        ResolvedSetup setup = resolve_setup(config);

        const fs::path out_dir(config.resolve(config.output_dir));
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (!fs::is_directory(out_dir)) {
            throw IoError("cannot create output directory " + out_dir.string());
        }
        OutputLock lock(out_dir);
        RunLog log((out_dir / "calibration.log").string());
        const std::string fingerprint = config.fingerprint();
        log.line("calibrate start fingerprint=" + fingerprint +
                 " runs=" + std::to_string(config.runs) +
                 (options.resume ? " resume=true" : ""));

        std::vector<RunState> states;
        bool interrupted = false;
        for (std::size_t run_id = 1; run_id <= config.runs && !interrupted; ++run_id) {
            const fs::path run_dir = out_dir / ("run_" + std::to_string(run_id));
            const fs::path archive_path = run_dir / "archive.jsonl";
            const fs::path ckpt_path = run_dir / "state.ckpt";

            std::vector<ArchiveRecord> preloaded;
            if (fs::exists(archive_path)) {
                if (options.resume) {
                    if (fs::exists(ckpt_path)) {
                        const Json ckpt = Json::parse(read_text_file(ckpt_path.string()));
                        const std::string recorded = ckpt.value("fingerprint", "");
                        if (recorded != fingerprint) {
                            throw ConfigError("run " + std::to_string(run_id) +
                                              ": checkpoint fingerprint " + recorded +
                                              " does not match configuration " + fingerprint +
                                              "; refusing to resume");
                        }
                    }
                    preloaded = load_archive_jsonl(archive_path.string());
                    log.line("run " + std::to_string(run_id) + " resuming from " +
                             std::to_string(preloaded.size()) + " records");
                } else if (options.force) {
                    fs::remove_all(run_dir);
                } else {
                    throw ConfigError(archive_path.string() +
                                      " already exists; pass --resume to continue or --force to"
                                      " start over");
                }
            }
            fs::create_directories(run_dir);

            std::ofstream archive_out(archive_path, std::ios::app);
            if (!archive_out) {
                throw IoError("cannot open " + archive_path.string());
            }

            RunHooks hooks;
            hooks.interrupt = &g_interrupt;
            hooks.on_record = [&](const ArchiveRecord& record) {
                archive_out << archive_record_to_json(record) << '\n';
                archive_out.flush();
                write_checkpoint(ckpt_path.string(), fingerprint, run_id, record.iteration, false);
                log.line("run " + std::to_string(run_id) + " iter " +
                         std::to_string(record.iteration) +
                         " eval_seconds=" + fmt_double(record.eval_seconds) +
                         (record.failed ? " status=failed" : " status=ok"));
            };

            RunState state =
                run_single(setup.run, *setup.evaluator, run_id, hooks, std::move(preloaded));
            const bool complete =
                state.archive.size() >= setup.run.n_initial + setup.run.max_iterations;
            write_checkpoint(ckpt_path.string(), fingerprint, run_id, state.archive.size(),
                             complete);
            log.line("run " + std::to_string(run_id) + " finished records=" +
                     std::to_string(state.archive.size()) +
                     " best=" + fmt_double(state.incumbent_value) +
                     (state.aborted ? " aborted: " + state.abort_reason : ""));
            interrupted = g_interrupt.load();
            states.push_back(std::move(state));
        }

        // Aggregated artifacts are rebuilt on every exit path so a stopped
        // calibration still leaves consistent files.
        write_trace_csv((out_dir / "trace.csv").string(), states);
        const bool have_best = write_best_csv((out_dir / "best.csv").string(), setup.space, states);
        std::vector<std::vector<ArchiveRecord>> archives;
        archives.reserve(states.size());
        for (const auto& state : states) archives.push_back(state.archive);
        const ParetoFront front =
            write_pareto_report((out_dir / "pareto_report.csv").string(), archives, setup.pareto);

        std::size_t total_failures = 0;
        bool any_aborted = false;
        for (const auto& state : states) {
            any_aborted = any_aborted || state.aborted;
            for (const auto& r : state.archive) total_failures += r.failed ? 1 : 0;
        }

        if (!states.empty() && have_best) {
            const std::size_t best = cross_run_best(states);
            std::cout << "best eps_global " << fmt_double(states[best].incumbent_value) << " (run "
                      << states[best].run_id << "); artifacts in " << out_dir.string() << "\n";
        }
        if (front.empty_feasible_set) {
            std::cout << "warning: no archived simulation satisfies the feasibility thresholds\n";
        }
        if (total_failures > 0) {
            std::cout << "note: " << total_failures << " simulator failure(s) recorded\n";
        }
        log.line("calibrate end");

        if (interrupted) return kExitInterrupted;
        if (any_aborted) return kExitSimulator;
        return kExitOk;
    } catch (...) {
        return map_exception_to_exit("calibrate");
    }
}

int cmd_evaluate(const std::string& config_path, const std::string& params_path) {
    try {
        const ToolConfig config = ToolConfig::load(config_path);
        ResolvedSetup setup = resolve_setup(config);
        const ParameterVector theta = read_params_csv(params_path, setup.space);
        const EvaluationOutcome outcome =
            setup.evaluator->evaluate(theta, derive_seed(config.master_seed, {0xe7a1u}));

        std::cout << kEvaluateHeader << '\n'
                  << fmt_double(outcome.cost.eps_od) << ',' << fmt_double(outcome.cost.eps_mode)
                  << ',' << fmt_double(outcome.cost.eps_workers) << ','
                  << fmt_double(outcome.cost.eps_global) << criteria_csv(outcome.criteria) << '\n';
        return kExitOk;
    } catch (const SimulatorError& e) {
        std::cerr << "evaluate: " << e.what() << '\n';
        return kExitSimulator;
    } catch (...) {
        return map_exception_to_exit("evaluate");
    }
}

int cmd_pareto(const std::string& config_path, const std::vector<std::string>& from_csv) {
    try {
        const ToolConfig config = ToolConfig::load(config_path);
        const fs::path out_dir(config.resolve(config.output_dir));

        std::vector<std::vector<ArchiveRecord>> archives;
        if (from_csv.empty()) {
            archives = load_run_archives(config, std::max<std::size_t>(config.runs, 64));
            if (archives.empty()) {
                throw ConfigError("no run archives under " + out_dir.string() +
                                  "; run calibrate first or pass --from files");
            }
        } else {
            // Rows in the evaluate output format become synthetic records.
            std::vector<ArchiveRecord> synthetic;
            std::size_t row_counter = 0;
            for (const auto& file : from_csv) {
                const std::string content = read_text_file(file);
                std::istringstream in(content);
                std::string line;
                std::size_t line_no = 0;
                while (std::getline(in, line)) {
                    ++line_no;
                    const auto sv = trim(line);
                    if (sv.empty() || sv == kEvaluateHeader) continue;
                    const auto fields = split_csv(sv);
                    if (fields.size() != 10) {
                        throw ParseError(file, line_no, "expected 10 evaluate-format fields");
                    }
                    ArchiveRecord record;
                    record.run_id = 0;
                    record.iteration = ++row_counter;
                    record.cost.eps_od = parse_double(fields[0]);
                    record.cost.eps_mode = parse_double(fields[1]);
                    record.cost.eps_workers = parse_double(fields[2]);
                    record.cost.eps_global = parse_double(fields[3]);
                    if (fields[4].empty()) {
                        throw ParseError(file, line_no,
                                         "row carries no criteria; nothing to filter on");
                    }
                    CriterionVector criteria{};
                    for (std::size_t k = 0; k < criteria.size(); ++k) {
                        criteria[k] = parse_double(fields[4 + k]);
                    }
                    record.criteria = criteria;
                    synthetic.push_back(std::move(record));
                }
            }
            archives.push_back(std::move(synthetic));
        }

        std::error_code ec;
        fs::create_directories(out_dir, ec);
        const ParetoFront front = write_pareto_report((out_dir / "pareto_report.csv").string(),
                                                      archives, config.pareto);
        std::size_t candidates = 0;
        for (const auto& a : archives) candidates += entries_from_records(a).size();
        std::cout << "pareto_report.csv: " << front.entries.size() << " nondominated of "
                  << candidates << " candidate record(s)\n";
        if (front.empty_feasible_set) {
            std::cout << "warning: feasibility thresholds excluded every record\n";
        }
        return kExitOk;
    } catch (...) {
        return map_exception_to_exit("pareto");
    }
}

int cmd_report(const std::string& config_path) {
    try {
        const ToolConfig config = ToolConfig::load(config_path);
        const auto archives = load_run_archives(config, std::max<std::size_t>(config.runs, 64));
        if (archives.empty()) {
            throw ConfigError("no run archives under " + config.resolve(config.output_dir));
        }

        double cross_best = std::numeric_limits<double>::infinity();
        std::size_t cross_best_run = 0;
        std::cout << "run,evaluations,failures,best_iteration,best_eps_global\n";
        for (const auto& archive : archives) {
            std::size_t failures = 0;
            const ArchiveRecord* best = nullptr;
            for (const auto& record : archive) {
                failures += record.failed ? 1 : 0;
                if (!record.failed &&
                    (best == nullptr || record.cost.eps_global < best->cost.eps_global)) {
                    best = &record;
                }
            }
            const std::size_t run_id = archive.empty() ? 0 : archive.front().run_id;
            std::cout << run_id << ',' << archive.size() << ',' << failures << ',';
            if (best != nullptr) {
                std::cout << best->iteration << ',' << fmt_double(best->cost.eps_global);
                if (best->cost.eps_global < cross_best) {
                    cross_best = best->cost.eps_global;
                    cross_best_run = run_id;
                }
            } else {
                std::cout << ',';
            }
            std::cout << '\n';
        }
        if (cross_best_run != 0) {
            std::cout << "cross-run best: eps_global " << fmt_double(cross_best) << " in run "
                      << cross_best_run << '\n';
        }
        return kExitOk;
    } catch (...) {
        return map_exception_to_exit("report");
    }
}

} // namespace abmcalib::cli
