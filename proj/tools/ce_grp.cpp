// Command line front end: single solves, benchmark batches, radius sweeps,
// threshold ablations, the exact oracle, solution checking, figures and
// instance generation.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cegrp/batch.hpp"
#include "cegrp/driver.hpp"
#include "cegrp/exact_oracle.hpp"
#include "cegrp/instance.hpp"
#include "cegrp/metrics.hpp"
#include "cegrp/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace cegrp;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

Instance load_instance(const std::string& path, const std::optional<double>& radius,
                       bool no_disks) {
    Instance inst = parse_instance(read_file(path));
    if (no_disks) return with_radius(std::move(inst), 0.0);
    if (radius) return with_radius(std::move(inst), *radius);
    return inst;
}

DriverParams load_params(const std::string& path, DriverParams base) {
    static const std::map<std::string, int DriverParams::*> keys = {
        {"MaxIt", &DriverParams::max_it},       {"it_max", &DriverParams::it_max},
        {"rho", &DriverParams::rho},            {"tau_min", &DriverParams::tau_min},
        {"tau_max", &DriverParams::tau_max},    {"L_max", &DriverParams::l_max},
        {"lambda", &DriverParams::lambda},      {"beta", &DriverParams::beta},
        {"theta", &DriverParams::theta},        {"zeta_min", &DriverParams::zeta_min},
        {"zeta_max", &DriverParams::zeta_max},  {"xi", &DriverParams::xi},
        {"gamma_max", &DriverParams::gamma_max}, {"pass_limit", &DriverParams::pass_limit},
    };
    const nlohmann::json doc = nlohmann::json::parse(read_file(path), nullptr, true, true);
    if (!doc.is_object()) throw ParseError(path + ": params file must hold a json object");
    for (const auto& [key, value] : doc.items()) {
        const auto it = keys.find(key);
        if (it == keys.end()) throw ParseError(path + ": unknown parameter '" + key + "'");
        if (!value.is_number_integer())
            throw ParseError(path + ": parameter '" + key + "' must be an integer");
        base.*(it->second) = value.get<int>();
    }
    return base;
}

struct CommonOpts {
    std::string file;
    std::optional<double> radius;
    bool no_disks = false;
    std::uint64_t seed = 1;
    std::string params_file;
    bool no_reincrease = false;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, const char* file_help) {
    cmd->add_option("file", o.file, file_help)->required();
    cmd->add_option("--radius", o.radius, "override every node radius");
    cmd->add_flag("--no-disks", o.no_disks, "shrink every radius to zero");
    cmd->add_option("--seed", o.seed, "base random seed");
    cmd->add_option("--params", o.params_file, "json file with search parameters");
    cmd->add_flag("--no-threshold-reincrease", o.no_reincrease,
                  "never widen the acceptance band after rejections");
}

DriverParams make_params(const CommonOpts& o) {
    DriverParams params;
    if (!o.params_file.empty()) params = load_params(o.params_file, params);
    params.seed = o.seed;
    params.threshold_reincrease = !o.no_reincrease;
    return params;
}

std::ostream& num(std::ostream& os) { return os << std::fixed << std::setprecision(4); }

int run_solve(const CommonOpts& o) {
    const Instance inst = load_instance(o.file, o.radius, o.no_disks);
    const DriverParams params = make_params(o);

    RunLog log;
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solve(inst, params, &log);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const ValidationReport report = validate(res.solution, inst);
    if (!report.ok()) {
        std::cerr << "internal error: solver emitted an invalid solution\n" << report.to_string();
        return kExitValidation;
    }

    std::cout << "instance    " << inst.name << "\n"
              << "tasks       " << inst.task_count() << " (" << inst.nodes.size() << " nodes, "
              << inst.edges.size() << " edges)\n";
    num(std::cout) << "objective   " << res.objective << "\n"
                   << "center      " << res.center_total << "\n"
                   << "initial     " << res.initial_center << "\n";
    std::cout << "vehicles    " << res.solution.routes.size() << "\n"
              << "iterations  " << res.iterations << "\n";
    num(std::cout) << "seconds     " << secs << "\n";

    if (!o.out.empty()) {
        const fs::path dir = o.out;
        const fs::path sol_path = dir / (inst.name + ".solution.json");
        write_file(sol_path, solution_to_json(res.solution, inst, &res.points).dump(2) + "\n");
        write_file(dir / (inst.name + ".runlog.jsonl"), log.to_json_lines());
        write_file(dir / (inst.name + ".svg"), plot_solution(res.solution, &res.points, inst));
        std::cout << "wrote       " << sol_path.string() << "\n";
    }
    return 0;
}

int run_validate(const std::string& inst_path, const std::string& sol_path) {
    const Instance inst = parse_instance(read_file(inst_path));
    const ParsedSolution ps = parse_solution(read_file(sol_path));
    if (!ps.instance_name.empty() && ps.instance_name != inst.name)
        std::cout << "note: solution was recorded for instance '" << ps.instance_name << "'\n";

    const ValidationReport report = validate(ps.solution, inst);
    num(std::cout) << "center objective   " << total_distance(ps.solution, inst) << "\n";
    if (ps.points) {
        double touring = 0.0;
        try {
            touring = total_distance(ps.solution, inst, *ps.points);
        } catch (const std::invalid_argument& e) {
            std::cerr << "invalid points: " << e.what() << "\n";
            return kExitValidation;
        }
        num(std::cout) << "touring objective  " << touring << "\n";
        // Every representative point has to sit inside its disk, and the
        // recorded total has to match the recomputation.
        for (std::size_t r = 0; r < ps.solution.routes.size(); ++r) {
            const auto chain = vertex_sequence(ps.solution.routes[r], inst);
            const auto& pts = ps.points->routes[r];
            for (std::size_t i = 0; i < chain.size(); ++i) {
                if (dist(pts[i], chain[i].center) > chain[i].radius + 1e-6) {
                    std::cerr << "point " << i << " of route " << r << " leaves its disk\n";
                    return kExitValidation;
                }
            }
        }
        if (ps.total_distance > 0.0 && std::abs(touring - ps.total_distance) > 1e-6) {
            std::cerr << "recorded total " << ps.total_distance
                      << " does not match recomputed " << touring << "\n";
            return kExitValidation;
        }
    }
    if (!report.ok()) {
        std::cout << report.to_string();
        return kExitValidation;
    }
    std::cout << "OK\n";
    return 0;
}

int run_oracle(const CommonOpts& o, int max_tasks) {
    const Instance inst = load_instance(o.file, o.radius, o.no_disks);
    const ExactResult res = solve_exact_global(inst, max_tasks);
    if (!res.solved) {
        std::cerr << "instance exceeds the oracle size cap of " << max_tasks << " tasks\n";
        return 1;
    }
    if (!res.feasible) {
        std::cerr << "no feasible fleet assignment exists\n";
        return kExitInfeasible;
    }
    num(std::cout) << "objective   " << res.objective << "\n";
    std::cout << "vehicles    " << res.solution.routes.size() << "\n";
    if (!o.out.empty()) {
        const fs::path dir = o.out;
        write_file(dir / (inst.name + ".oracle.json"),
                   solution_to_json(res.solution, inst, &res.points).dump(2) + "\n");
        write_file(dir / (inst.name + ".oracle.svg"),
                   plot_solution(res.solution, &res.points, inst));
    }
    return 0;
}

int run_plot(const std::string& sol_path, const std::string& inst_path, std::string out) {
    const Instance inst = parse_instance(read_file(inst_path));
    const ParsedSolution ps = parse_solution(read_file(sol_path));
    const std::string svg =
        plot_solution(ps.solution, ps.points ? &*ps.points : nullptr, inst);
    if (out.empty()) out = fs::path(sol_path).replace_extension(".svg").string();
    write_file(out, svg);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_gen(std::uint64_t seed, int nodes, int edges, double area, double radius, double range,
            int capacity, int max_vehicles, const std::string& out) {
    std::optional<int> cap;
    if (max_vehicles > 0) cap = max_vehicles;
    const Instance inst = generate_instance(seed, nodes, edges, area, radius,
                                            {range, capacity, cap});
    const std::string text = serialize_instance(inst);
    if (out.empty())
        std::cout << text;
    else {
        write_file(out, text);
        std::cout << "wrote " << out << " (" << inst.name << ")\n";
    }
    return 0;
}

int run_sweep(const CommonOpts& o, const std::vector<double>& radii, int seeds, int workers) {
    const Instance inst = parse_instance(read_file(o.file));
    const DriverParams params = make_params(o);
    const auto points = sweep_radius(inst, radii, params, seeds, workers);

    std::cout << "radius        best         avg  runs\n";
    bool monotone = true;
    std::vector<SweepPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepPoint& a, const SweepPoint& b) { return a.radius < b.radius; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        monotone = monotone && sorted[i].best <= sorted[i - 1].best + 1e-6;
    for (const auto& p : points)
        num(std::cout) << std::setw(6) << p.radius << std::setw(12) << p.best << std::setw(12)
                       << p.avg << std::setw(6) << p.runs << "\n";
    std::cout << "best objective non-increasing in radius: " << (monotone ? "yes" : "no") << "\n";
    if (!o.out.empty()) write_file(o.out, sweep_csv(points));
    return 0;
}

int run_batch_cmd(const CommonOpts& o, int reps, int workers) {
    const fs::path manifest(o.file);
    std::istringstream lines(read_file(o.file));
    std::vector<BatchItem> items;
    std::string line;
    while (std::getline(lines, line)) {
        const auto from = line.find_first_not_of(" \t\r");
        if (from == std::string::npos) continue;
        const auto to = line.find_last_not_of(" \t\r");
        line = line.substr(from, to - from + 1);
        if (line.empty() || line[0] == '#') continue;
        fs::path p(line);
        if (p.is_relative()) p = manifest.parent_path() / p;
        try {
            Instance inst = load_instance(p.string(), o.radius, o.no_disks);
            std::string name = inst.name;
            items.push_back({std::move(name), std::move(inst), {}});
        } catch (const std::exception& e) {
            items.push_back({line, std::nullopt, e.what()});
        }
    }
    if (items.empty()) throw ParseError(o.file + ": manifest lists no instances");

    BatchOptions opt;
    opt.repetitions = reps;
    opt.workers = workers;
    opt.capture_logs = !o.out.empty();
    const BatchResult res = run_batch(items, make_params(o), opt);

    std::cout << "instance                     runs        best         avg       worst\n";
    for (const auto& s : res.summaries()) {
        std::cout << std::left << std::setw(28) << s.instance << std::right << std::setw(5)
                  << s.runs;
        if (s.runs > 0)
            num(std::cout) << std::setw(12) << s.best << std::setw(12) << s.avg << std::setw(12)
                           << s.worst;
        std::cout << "\n";
    }

    std::size_t failed = 0;
    for (const auto& r : res.rows)
        if (!r.ok) ++failed;
    std::cout << res.rows.size() - failed << "/" << res.rows.size() << " runs succeeded\n";

    if (!o.out.empty()) {
        const fs::path dir = o.out;
        write_file(dir / "batch.csv", res.to_csv());
        for (std::size_t k = 0; k < res.rows.size(); ++k) {
            const BatchRow& r = res.rows[k];
            if (!r.ok) continue;
            const BatchItem& item = items[k / static_cast<std::size_t>(res.repetitions)];
            const std::string stem = r.instance + "_rep" + std::to_string(r.rep);
            write_file(dir / (stem + ".solution.json"),
                       solution_to_json(r.solution, *item.instance, &r.points).dump(2) + "\n");
            write_file(dir / (stem + ".runlog.jsonl"), r.log.to_json_lines());
        }
        std::cout << "wrote " << (dir / "batch.csv").string() << "\n";
    }
    return failed == 0 ? 0 : 1;
}

int run_ablate(const CommonOpts& o, int seeds, int workers) {
    const Instance inst = load_instance(o.file, o.radius, o.no_disks);
    DriverParams params = make_params(o);

    std::vector<std::pair<std::string, bool>> variants = {{"reincrease-on", true},
                                                          {"reincrease-off", false}};
    std::ostringstream csv;
    csv << std::setprecision(12) << "variant,seed,objective\n";
    std::vector<double> avg(variants.size(), 0.0);
    std::vector<double> best(variants.size(), kInf);
    for (std::size_t v = 0; v < variants.size(); ++v) {
        params.threshold_reincrease = variants[v].second;
        std::vector<Instance> copies(static_cast<std::size_t>(1), inst);
        BatchOptions opt;
        opt.repetitions = seeds;
        opt.workers = workers;
        const BatchResult res = run_batch(copies, params, opt);
        for (const auto& r : res.rows) {
            if (!r.ok) throw InfeasibleError(r.error);
            avg[v] += r.objective;
            best[v] = std::min(best[v], r.objective);
            csv << variants[v].first << ',' << r.seed << ',' << r.objective << '\n';
        }
        avg[v] /= static_cast<double>(seeds);
        num(std::cout) << std::left << std::setw(16) << variants[v].first << std::right
                       << " avg " << std::setw(12) << avg[v] << "  best " << std::setw(12)
                       << best[v] << "\n";
    }
    num(std::cout) << "saving of re-increase on avg objective: "
                   << saving_rate(avg[1], avg[0]) << "%\n";
    if (!o.out.empty()) write_file(o.out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"close-enough general routing over disk neighborhoods"};
    app.require_subcommand(1);

    CommonOpts solve_o;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance");
    add_common(solve_cmd, solve_o, "instance file (.cegrp.json)");
    solve_cmd->add_option("--out", solve_o.out, "directory for solution, run log and figure");

    std::string val_inst, val_sol;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check a solution file");
    validate_cmd->add_option("instance", val_inst, "instance file")->required();
    validate_cmd->add_option("solution", val_sol, "solution file")->required();

    CommonOpts oracle_o;
    int oracle_cap = 7;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "exact solver for tiny instances");
    add_common(oracle_cmd, oracle_o, "instance file");
    oracle_cmd->add_option("--max-tasks", oracle_cap, "size cap for the exact search");
    oracle_cmd->add_option("--out", oracle_o.out, "directory for the optimal solution");

    std::string plot_sol, plot_inst, plot_out;
    CLI::App* plot_cmd = app.add_subcommand("plot", "render a solution file");
    plot_cmd->add_option("solution", plot_sol, "solution file")->required();
    plot_cmd->add_option("--instance", plot_inst, "instance file")->required();
    plot_cmd->add_option("--out", plot_out, "output file (defaults next to the solution)");

    std::uint64_t gen_seed = 1;
    int gen_nodes = 8, gen_edges = 4, gen_capacity = 10, gen_vehicles = 0;
    double gen_area = 100.0, gen_radius = 0.0, gen_range = 1000.0;
    std::string gen_out;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a random instance");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--nodes", gen_nodes, "required nodes");
    gen_cmd->add_option("--edges", gen_edges, "required edges");
    gen_cmd->add_option("--area", gen_area, "square side length");
    gen_cmd->add_option("--radius", gen_radius, "node neighborhood radius");
    gen_cmd->add_option("--range", gen_range, "flight range per vehicle");
    gen_cmd->add_option("--capacity", gen_capacity, "node capacity per vehicle");
    gen_cmd->add_option("--max-vehicles", gen_vehicles, "fleet cap, 0 for unlimited");
    gen_cmd->add_option("--out", gen_out, "output file (stdout when omitted)");

    CommonOpts sweep_o;
    std::vector<double> sweep_radii = {10, 30, 50, 70, 100};
    int sweep_seeds = 5, sweep_workers = 0;
    CLI::App* sweep_cmd = app.add_subcommand("sweep-radius", "objective vs neighborhood radius");
    add_common(sweep_cmd, sweep_o, "instance file");
    sweep_cmd->add_option("--radii", sweep_radii, "radii to sweep")->delimiter(',');
    sweep_cmd->add_option("--seeds", sweep_seeds, "runs per radius");
    sweep_cmd->add_option("--workers", sweep_workers, "worker threads, 0 for auto");
    sweep_cmd->add_option("--out", sweep_o.out, "csv output file");

    CommonOpts batch_o;
    int batch_reps = 1, batch_workers = 0;
    CLI::App* batch_cmd = app.add_subcommand("batch", "run every instance in a manifest");
    add_common(batch_cmd, batch_o, "manifest file, one instance path per line");
    batch_cmd->add_option("--reps", batch_reps, "repetitions per instance");
    batch_cmd->add_option("--workers", batch_workers, "worker threads, 0 for auto");
    batch_cmd->add_option("--out", batch_o.out, "directory for csv, solutions and run logs");

    CommonOpts ablate_o;
    int ablate_seeds = 5, ablate_workers = 0;
    CLI::App* ablate_cmd =
        app.add_subcommand("ablate", "compare threshold re-increase on vs off");
    add_common(ablate_cmd, ablate_o, "instance file");
    ablate_cmd->add_option("--seeds", ablate_seeds, "runs per variant");
    ablate_cmd->add_option("--workers", ablate_workers, "worker threads, 0 for auto");
    ablate_cmd->add_option("--out", ablate_o.out, "csv output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(solve_o);
        if (validate_cmd->parsed()) return run_validate(val_inst, val_sol);
        if (oracle_cmd->parsed()) return run_oracle(oracle_o, oracle_cap);
        if (plot_cmd->parsed()) return run_plot(plot_sol, plot_inst, plot_out);
        if (gen_cmd->parsed())
            return run_gen(gen_seed, gen_nodes, gen_edges, gen_area, gen_radius, gen_range,
                           gen_capacity, gen_vehicles, gen_out);
        if (sweep_cmd->parsed()) return run_sweep(sweep_o, sweep_radii, sweep_seeds, sweep_workers);
        if (batch_cmd->parsed()) return run_batch_cmd(batch_o, batch_reps, batch_workers);
        if (ablate_cmd->parsed()) return run_ablate(ablate_o, ablate_seeds, ablate_workers);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
