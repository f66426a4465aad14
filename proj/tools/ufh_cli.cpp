// Command-line front end: one subcommand per operation plus `run <scenario.yaml>`.
// Exit status: 0 conclusive, 2 inconclusive, 1 error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "ufh/errors.hpp"
#include "ufh/scenario.hpp"

namespace {

struct Flags {
    std::string name = "run";
    std::string space;
    std::string target;
    std::string pattern = "fundamental";
    std::string map = "identity";
    std::string matrix;
    std::string schedule;
    std::optional<std::int64_t> radius;
    std::string center;
    std::optional<std::int64_t> margin;
    std::int64_t r = 1;
    std::string cap = "1";
    std::string ring = "rat";
    std::string family = "ball";
    std::int64_t n_min = 1;
    std::int64_t n_max = 10;
    std::int64_t n = 2;
    std::size_t degree = 1;
    std::size_t samples = 50;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string out;
};

void add_operation_flags(CLI::App* sub, Flags& f)
{
    sub->add_option("--name", f.name, "prefix of the output files");
    sub->add_option("--space", f.space, "presentation: shorthand (Z, Z^2, T3, F2, D(T3)) or inline YAML");
    sub->add_option("--target", f.target, "target presentation (bilip)");
    sub->add_option("--pattern", f.pattern, "cycle pattern, e.g. squares, '2 * periodic 2: 0->1'");
    sub->add_option("--map", f.map, "map rule: identity, inclusion, scale k, floor_div k, shift v, doubling_projection");
    sub->add_option("--matrix", f.matrix, "integer matrix, e.g. [[2,0],[0,3]]");
    sub->add_option("--schedule", f.schedule, "window radii, e.g. 10,20,40");
    sub->add_option("--radius", f.radius, "single window radius");
    sub->add_option("--center", f.center, "window center (point literal)");
    sub->add_option("--margin", f.margin, "window margin (defaults to r)");
    sub->add_option("--r", f.r, "propagation / edge length");
    sub->add_option("--cap", f.cap, "correction cap B");
    sub->add_option("--ring", f.ring, "int or rat");
    sub->add_option("--family", f.family, "Folner family: interval, box, centered_box, ball");
    sub->add_option("--n-min", f.n_min);
    sub->add_option("--n-max", f.n_max);
    sub->add_option("--n", f.n, "n for prism and averaging");
    sub->add_option("--degree", f.degree, "chain degree (checks run for 0..degree)");
    sub->add_option("--samples", f.samples);
    sub->add_option("--seed", f.seed);
    sub->add_option("--jobs", f.jobs, "worker threads; results do not depend on it");
    sub->add_option("--out", f.out, "output directory");
}

ufh::Request to_request(ufh::Operation op, const Flags& f)
{
    ufh::Request req;
    req.name = f.name;
    req.op = op;
    if (!f.space.empty())
        req.space = ufh::parse_presentation(f.space);
    if (!f.target.empty())
        req.target = ufh::parse_presentation(f.target);
    req.pattern = f.pattern;
    req.map = f.map;
    if (!f.matrix.empty())
        req.matrix = ufh::parse_matrix(f.matrix);
    if (!f.schedule.empty())
        req.radii = ufh::parse_int_list(f.schedule);
    if (f.radius)
        req.radii.push_back(*f.radius);
    if (!f.center.empty())
        req.center = ufh::parse_point(f.center);
    req.margin = f.margin;
    req.r = f.r;
    req.cap = ufh::parse_rational(f.cap);
    req.ring = ufh::parse_ring(f.ring);
    req.family = ufh::parse_family(f.family);
    req.n_min = f.n_min;
    req.n_max = f.n_max;
    req.n = f.n;
    req.degree = f.degree;
    req.samples = f.samples;
    req.seed = f.seed;
    req.jobs = f.jobs;
    return req;
}

std::filesystem::path output_dir(const std::string& flag, const std::optional<std::filesystem::path>& scenario)
{
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("UFH_OUT_DIR"); env && *env)
        return env;
    if (scenario)
        return *scenario;
    return ".";
}

int report(const ufh::Request& req, const ufh::RunOutcome& out)
{
    std::cout << ufh::to_string(req.op) << ' ' << req.name << ": " << out.summary << '\n';
    for (auto& p : out.files)
        std::cout << "  wrote " << p.filename().string() << '\n';
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Uniformly finite homology toolkit"};
    app.require_subcommand(1);

    Flags flags;
    const std::pair<const char*, const char*> ops[] = {
        {"verdict", "decide whether a degree-0 cycle vanishes"},
        {"seminorm", "upper bound on the l-infinity semi-norm of a degree-0 class"},
        {"mean", "Folner means and the mean lower bound"},
        {"bilip", "is a quasi-isometry close to a bilipschitz map"},
        {"prism", "degree-1 prism identity and disjoint rewriting on Z"},
        {"rho", "translation to twisted group chains: roundtrip, isometry, chain map"},
        {"profile", "isoperimetric profile of a Folner family"},
        {"grouphom", "kernel/cokernel prediction against the measured verdict"},
        {"averaging", "averaging chain map onto Z minus the squares"},
        {"window", "dump a window as TSV"},
    };
    std::vector<std::pair<CLI::App*, ufh::Operation>> subs;
    for (auto& [name, help] : ops) {
        auto* sub = app.add_subcommand(name, help);
        add_operation_flags(sub, flags);
        subs.emplace_back(sub, ufh::parse_operation(name));
    }

    std::string scenario_path;
    std::string run_out;
    auto* run = app.add_subcommand("run", "execute a scenario file");
    run->add_option("scenario", scenario_path, "scenario YAML")->required();
    run->add_option("--out", run_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            auto req = ufh::load_scenario(scenario_path);
            return report(req, ufh::run_request(req, output_dir(run_out, req.out)));
        }
        for (auto& [sub, op] : subs) {
            if (!sub->parsed())
                continue;
            auto req = to_request(op, flags);
            return report(req, ufh::run_request(req, output_dir(flags.out, std::nullopt)));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
