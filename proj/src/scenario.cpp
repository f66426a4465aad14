#include "ufh/scenario.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ufh/degree0.hpp"
#include "ufh/degree1.hpp"
#include "ufh/errors.hpp"
#include "ufh/grouphom.hpp"
#include "ufh/pattern.hpp"

namespace ufh {

namespace {

[[noreturn]] void fail(const YAML::Node& n, const std::string& what)
{
    auto m = n.Mark();
    throw ParseError(what, m.line + 1, m.column + 1);
}

YAML::Node load_yaml(std::string_view text)
{
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
}

template <class T>
T as(const YAML::Node& n, const char* what)
{
    if (!n.IsScalar())
        fail(n, std::string("expected ") + what);
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, std::string("expected ") + what);
    }
}

std::string lower(std::string s)
{
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::int64_t> int_list(const YAML::Node& n, const char* what)
{
    std::vector<std::int64_t> out;
    if (n.IsScalar()) {
        out.push_back(as<std::int64_t>(n, what));
        return out;
    }
    if (!n.IsSequence())
        fail(n, std::string("expected a list of integers for ") + what);
    for (const auto& x : n)
        out.push_back(as<std::int64_t>(x, what));
    return out;
}

std::optional<SpacePtr> shorthand(std::string s)
{
    s = trim(s);
    if (s == "Z")
        return make_lattice(1);
    if (s.rfind("Z^", 0) == 0 && s.size() > 2)
        return make_lattice(std::stoul(s.substr(2)));
    if (s.size() > 1 && (s[0] == 'T' || s[0] == 'F') &&
        std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        int k = std::stoi(s.substr(1));
        return s[0] == 'T' ? make_regular_tree(k) : make_free_group(k);
    }
    if (s.rfind("D(", 0) == 0 && s.back() == ')') {
        if (auto base = shorthand(s.substr(2, s.size() - 3)))
            return make_doubling(*base);
    }
    return std::nullopt;
}

SpacePtr presentation_node(const YAML::Node& n)
{
    if (n.IsScalar()) {
        auto s = n.as<std::string>();
        std::optional<SpacePtr> sp;
        try {
            sp = shorthand(s);
        } catch (const std::exception&) {
        }
        if (!sp)
            fail(n, "unknown presentation '" + s + "'");
        return *sp;
    }
    if (!n.IsMap())
        fail(n, "expected a presentation");
    if (!n["kind"])
        fail(n, "presentation needs a kind");
    auto kind = lower(as<std::string>(n["kind"], "a kind"));
    static const std::set<std::string> kinds{"lattice", "subset", "free_group", "tree", "doubling"};
    if (!kinds.count(kind))
        fail(n["kind"], "unknown presentation kind '" + kind + "'");
    static const std::set<std::string> keys{"kind", "dimension", "base", "rule", "complement", "rank", "degree"};
    for (const auto& kv : n)
        if (!keys.count(kv.first.as<std::string>()))
            fail(kv.first, "unknown presentation key '" + kv.first.as<std::string>() + "'");
    try {
        if (kind == "lattice") {
            auto d = n["dimension"] ? as<std::int64_t>(n["dimension"], "a dimension") : 1;
            if (d < 1)
                fail(n["dimension"], "dimension must be positive");
            return make_lattice(static_cast<std::size_t>(d));
        }
        if (kind == "subset") {
            auto base = n["base"] ? presentation_node(n["base"]) : make_lattice(1);
            MembershipRule rule;
            const auto& r = n["rule"];
            if (!r)
                fail(n, "subset needs a rule");
            if (r.IsScalar()) {
                if (lower(r.as<std::string>()) != "squares")
                    fail(r, "unknown named rule '" + r.as<std::string>() + "'");
                rule.named = NamedRule::Squares;
            } else {
                PeriodicRule pr;
                pr.period = int_list(r["period"], "period");
                if (!r["residues"] || !r["residues"].IsSequence())
                    fail(r, "periodic rule needs residues");
                for (const auto& res : r["residues"])
                    pr.residues.push_back(int_list(res, "residue"));
                rule.periodic = std::move(pr);
            }
            if (n["complement"])
                rule.complement = as<bool>(n["complement"], "true or false");
            return make_subset(base, rule);
        }
        if (kind == "free_group")
            return make_free_group(static_cast<int>(as<std::int64_t>(n["rank"], "a rank")));
        if (kind == "tree")
            return make_regular_tree(static_cast<int>(as<std::int64_t>(n["degree"], "a degree")));
        if (kind == "doubling") {
            if (!n["base"])
                fail(n, "doubling needs a base");
            return make_doubling(presentation_node(n["base"]));
        }
    } catch (const PresentationError& e) {
        fail(n, e.what());
    }
    fail(n["kind"], "unhandled presentation kind '" + kind + "'");
}

Point point_node(const YAML::Node& n)
{
    if (n.IsSequence())
        return Point(int_list(n, "a point"));
    try {
        return parse_point(as<std::string>(n, "a point"));
    } catch (const Error& e) {
        fail(n, e.what());
    }
}

std::filesystem::path write_file(RunOutcome& out, const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content)
{
    auto p = dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw Error("cannot write " + p.string());
    f << content;
    out.files.push_back(p);
    return p;
}

std::vector<WindowSpec> schedule_of(const Request& req, const SpacePtr& space, std::int64_t default_margin)
{
    if (req.radii.empty())
        throw ContractViolation("the operation needs a schedule of radii");
    Point c = req.center ? *req.center : space->origin();
    return make_schedule(c, req.radii, req.margin.value_or(default_margin));
}

std::string verdict_report(const ClassVerdict& v)
{
    std::ostringstream os;
    os << "verdict\t" << to_string(v.status) << "\n";
    os << "reason\t" << v.reason << "\n";
    os << "r\t" << v.r << "\n";
    os << "ring\t" << to_string(v.ring) << "\n";
    if (v.certified_capacity)
        os << "certified_C\t" << to_string(*v.certified_capacity) << "\n";
    if (v.periodic) {
        os << "torus_sides\t";
        for (std::size_t i = 0; i < v.periodic->sides.size(); ++i)
            os << (i ? "x" : "") << v.periodic->sides[i];
        os << "\ntorus_C_min\t" << to_string(v.periodic->c_min) << "\n";
    }
    if (v.witness) {
        const auto& w = *v.witness;
        os << "witness_window_radius\t" << v.entries[w.entry].spec.radius << "\n";
        os << "witness_size\t" << w.subset.size() << "\n";
        os << "witness_demand_sum\t" << to_string(w.demand_sum) << "\n";
        os << "witness_crossing\t" << w.crossing << "\n";
        os << "witness_collar\t" << w.collar << "\n";
        os << "c_ref\t" << to_string(w.c_ref) << "\n";
        os << "deficit_crossing\t" << to_string(w.deficit_crossing) << "\n";
        os << "deficit_collar\t" << to_string(w.deficit_collar) << "\n";
    }
    return os.str();
}

int verdict_exit(const ClassVerdict& v) { return v.status == VerdictStatus::Inconclusive ? 2 : 0; }

void write_verdict_files(RunOutcome& out, const std::filesystem::path& dir, const Request& req,
                         const ClassVerdict& v)
{
    std::ostringstream tsv;
    write_verdict_tsv(tsv, v);
    write_file(out, dir, req.name + ".verdict.tsv", tsv.str());
    if (v.witness) {
        const auto& e = v.entries[v.witness->entry];
        std::ostringstream cut;
        write_cut_tsv(cut, *e.witness, window_graph(*e.window, v.r), e.window->points());
        write_file(out, dir, req.name + ".witness.tsv", cut.str());
    }
    if (v.status == VerdictStatus::Trivial && !v.entries.empty() && v.entries.back().certificate) {
        const auto& e = v.entries.back();
        std::ostringstream fl;
        write_flow_tsv(fl, *e.certificate, e.window->points());
        write_file(out, dir, req.name + ".flow.tsv", fl.str());
    }
    if (v.periodic) {
        auto t = make_torus(v.periodic->sides, v.r);
        std::ostringstream fl;
        write_flow_tsv(fl, v.periodic->flow, t.points);
        write_file(out, dir, req.name + ".torus_flow.tsv", fl.str());
    }
}

RunOutcome run_verdict(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    VerdictOptions opts;
    opts.ring = req.ring;
    opts.jobs = req.jobs;
    auto v = class_verdict(parse_cycle_pattern(req.pattern), req.space, req.r, schedule_of(req, req.space, req.r), opts);
    write_verdict_files(out, dir, req, v);
    write_file(out, dir, req.name + ".report.tsv", verdict_report(v));
    out.exit_code = verdict_exit(v);
    out.summary = "verdict " + to_string(v.status) +
                  (v.certified_capacity ? " C=" + to_string(*v.certified_capacity) : std::string());
    return out;
}

RunOutcome run_seminorm(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    std::vector<WindowSpec> schedule;
    if (!req.radii.empty())
        schedule = schedule_of(req, req.space, req.r);
    auto b = seminorm_upper(parse_cycle_pattern(req.pattern), req.space, req.r, req.cap, schedule, req.ring);
    std::ostringstream tsv;
    tsv << "window_radius\tvalue\tverified\n";
    for (auto& w : b.windows)
        tsv << w.spec.radius << '\t' << to_string(w.value) << '\t' << (w.verified ? 1 : 0) << '\n';
    write_file(out, dir, req.name + ".seminorm.tsv", tsv.str());
    std::ostringstream rep;
    rep << "upper_bound\t" << to_string(b.value) << "\n";
    rep << "certified\t" << (b.certified ? "yes" : "no") << "\n";
    rep << "cap\t" << to_string(b.cap) << "\nr\t" << b.r << "\nring\t" << to_string(b.ring) << "\n";
    if (b.torus_sides) {
        rep << "torus_sides\t";
        for (std::size_t i = 0; i < b.torus_sides->size(); ++i)
            rep << (i ? "x" : "") << (*b.torus_sides)[i];
        rep << "\ncorrection_verified\t" << (b.correction_verified ? "yes" : "no") << "\n";
    }
    write_file(out, dir, req.name + ".report.tsv", rep.str());
    if (b.correction)
        write_file(out, dir, req.name + ".correction.chain", format_chain_literal(*b.correction));
    out.exit_code = b.certified && b.correction_verified ? 0 : 2;
    out.summary = "seminorm upper " + to_string(b.value) + (b.certified ? " certified" : " uncertified");
    return out;
}

RunOutcome run_mean(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    auto pattern = parse_cycle_pattern(req.pattern);
    auto est = folner_mean(pattern, req.space, req.family, req.n_min, req.n_max);
    auto lb = seminorm_lower_via_mean(pattern, req.space, req.family, req.n_min, req.n_max);
    std::ostringstream tsv;
    tsv << "n\tset_size\tmean\n";
    for (auto& e : est.values)
        tsv << e.n << '\t' << e.set_size << '\t' << to_string(e.value) << '\n';
    write_file(out, dir, req.name + ".mean.tsv", tsv.str());
    std::ostringstream rep;
    rep << "family\t" << est.family << "\n";
    rep << "limit\t" << (est.limit ? to_string(*est.limit) : std::string("unknown")) << "\n";
    rep << "lower_bound\t" << to_string(lb.bound) << "\n";
    rep << "certified\t" << (lb.certified ? "yes" : "no") << "\n";
    rep << "evidence\t" << to_string(lb.evidence) << "\n";
    write_file(out, dir, req.name + ".report.tsv", rep.str());
    out.exit_code = lb.certified ? 0 : 2;
    out.summary = "mean lower bound " + to_string(lb.bound) + (lb.certified ? " certified" : " evidence only");
    return out;
}

RunOutcome run_profile(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    auto prof = isoperimetric_profile(req.space, req.family, req.r, req.n_min, req.n_max);
    std::ostringstream tsv;
    tsv << "n\tset_size\tboundary_size\tratio\n";
    for (auto& e : prof.entries)
        tsv << e.n << '\t' << e.set_size << '\t' << e.boundary_size << '\t' << to_string(e.ratio) << '\n';
    write_file(out, dir, req.name + ".profile.tsv", tsv.str());
    out.summary = std::string("profile ") + (prof.non_increasing ? "non-increasing" : "not monotone");
    return out;
}

std::string matching_tsv(const QIMap& f, const MatchingCertificate& m)
{
    std::ostringstream os;
    os << "source\ttarget\tdisplacement\n";
    for (auto& [x, y] : m.pairs)
        os << format_point(x) << '\t' << format_point(y) << '\t' << f.target->distance(f(x), y) << '\n';
    return os.str();
}

RunOutcome run_bilip(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    auto f = parse_map_rule(req.map, req.space, req.target);
    BilipschitzOptions opts;
    opts.jobs = req.jobs;
    auto res = bilipschitz_verdict(f, req.r, schedule_of(req, f.target, req.r), opts);
    write_verdict_files(out, dir, req, res.verdict);

    std::ostringstream rep;
    rep << "map\t" << f.rule << "\n";
    rep << "source\t" << f.source->describe() << "\ntarget\t" << f.target->describe() << "\n";
    rep << "declared_C\t" << to_string(f.C) << "\ndeclared_D\t" << to_string(f.D) << "\n";
    auto qw = Window::build(f.source, f.source->origin(), std::min<std::int64_t>(req.radii.front(), 6), 0);
    auto qi = verify_qi(f, qw);
    rep << "measured_C\t" << qi.best_C << "\nmeasured_D\t" << to_string(qi.best_D) << "\n";
    rep << "declared_constants_hold\t" << (qi.declared_ok ? "yes" : "no") << "\n";
    rep << "bilipschitz\t" << (res.yes() ? "yes" : res.no() ? "no" : "inconclusive") << "\n";
    if (res.matching) {
        rep << "matching_pairs\t" << res.matching->pairs.size() << "\n";
        rep << "matching_bijective\t" << (res.matching->bijective_on_interior ? "yes" : "no") << "\n";
        rep << "displacement\t" << res.matching->displacement << "\n";
        rep << "imports\t" << res.matching->imports << "\nexports\t" << res.matching->exports << "\n";
        write_file(out, dir, req.name + ".matching.tsv", matching_tsv(f, *res.matching));
    }
    rep << verdict_report(res.verdict);
    write_file(out, dir, req.name + ".report.tsv", rep.str());
    out.exit_code = verdict_exit(res.verdict);
    out.summary = std::string("bilipschitz ") + (res.yes() ? "yes" : res.no() ? "no" : "inconclusive") +
                  (res.matching ? " displacement=" + std::to_string(res.matching->displacement) : std::string());
    return out;
}

RunOutcome run_prism(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    auto z = req.space ? req.space : make_lattice(1);
    std::int64_t radius = req.radii.empty() ? 10 * req.n : req.radii.front();
    Point c = req.center ? *req.center : Point{0};
    auto w = Window::build(z, c, radius, req.margin.value_or(req.n));
    auto pw = prism_certificate(req.n, w);
    auto rw = rewrite_disjoint(req.n, w);
    write_file(out, dir, req.name + ".prism.chain", format_chain_literal(pw.prism));
    write_file(out, dir, req.name + ".rewrite.chain", format_chain_literal(rw.cycle));
    std::ostringstream rep;
    rep << "n\t" << req.n << "\nwindow_radius\t" << radius << "\n";
    rep << "prism_identity\t" << (pw.verified ? "exact" : "fails") << "\n";
    rep << "rewrite_norm\t" << to_string(rw.norm) << "\n";
    rep << "disjoint_supports\t" << (rw.disjoint_supports ? "yes" : "no") << "\n";
    rep << "homologous_to_multiple\t" << (rw.homologous_to_multiple ? "yes" : "no") << "\n";
    write_file(out, dir, req.name + ".report.tsv", rep.str());
    bool ok = pw.verified && rw.norm == 1 && rw.disjoint_supports && rw.homologous_to_multiple;
    out.exit_code = ok ? 0 : 2;
    out.summary = std::string("prism ") + (ok ? "verified" : "discrepancy");
    return out;
}

RunOutcome run_rho(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    auto sp = req.space ? req.space : make_lattice(1);
    std::int64_t radius = req.radii.empty() ? 12 : req.radii.front();
    Point c = req.center ? *req.center : sp->origin();
    auto w = Window::build(sp, c, radius, req.margin.value_or(4));
    std::ostringstream rep;
    rep << "degree\tsamples\troundtrip_failures\tisometry_failures\tchain_map_failures\taction_failures\n";
    bool ok = true;
    for (std::size_t k = 0; k <= req.degree; ++k) {
        auto r = rho_roundtrip_check(w, k, req.samples, req.seed + k);
        rep << k << '\t' << r.samples << '\t' << r.roundtrip_failures << '\t' << r.isometry_failures << '\t'
            << r.chain_map_failures << '\t' << r.action_failures << '\n';
        ok = ok && r.ok();
    }
    write_file(out, dir, req.name + ".rho.tsv", rep.str());
    out.exit_code = ok ? 0 : 2;
    out.summary = std::string("rho ") + (ok ? "exact" : "discrepancy");
    return out;
}

RunOutcome run_grouphom(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    if (req.matrix.empty())
        throw ContractViolation("grouphom needs a matrix");
    auto rep = group_hom_report(req.matrix, req.r, req.radii, req.jobs);
    write_verdict_files(out, dir, req, rep.measured.verdict);
    std::ostringstream os;
    os << "determinant\t" << determinant(req.matrix).get_str() << "\n";
    os << "kernel_size\t" << rep.kernel_size.get_str() << "\n";
    os << "cokernel_size\t" << rep.cokernel_size.get_str() << "\n";
    os << "predicted\t" << (rep.predicted_yes ? "yes" : "no") << "\n";
    os << "measured\t" << (rep.measured.yes() ? "yes" : rep.measured.no() ? "no" : "inconclusive") << "\n";
    os << "agrees\t" << (rep.agrees ? "yes" : "no") << "\n";
    os << "image_mean\t" << to_string(rep.image_mean) << "\n";
    os << "pushforward_identity\t" << (rep.pushforward_identity ? "yes" : "no") << "\n";
    write_file(out, dir, req.name + ".report.tsv", os.str());
    out.exit_code = rep.agrees ? 0 : 2;
    out.summary = std::string("group homomorphism ") + (rep.measured.yes() ? "yes" : rep.measured.no() ? "no" : "inconclusive");
    return out;
}

RunOutcome run_averaging(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    std::int64_t n2 = req.n * req.n;
    std::int64_t radius = req.radii.empty() ? n2 + 2 * req.n + 10 : req.radii.front();
    Point c = req.center ? *req.center : Point{n2};
    auto w = Window::build(make_lattice(1), c, radius, req.margin.value_or(0));
    std::ostringstream os;
    os << "degree\tbound\tmax_ratio\tsamples\tviolations\tidentity_checks\tidentity_failures\tchain_map\n";
    bool ok = true;
    for (std::size_t k = 0; k <= req.degree; ++k) {
        auto r = averaging_chain_map(req.n, k, w, req.samples, req.seed + k);
        os << k << '\t' << to_string(r.bound) << '\t' << to_string(r.max_ratio) << '\t' << r.samples << '\t'
           << r.violations << '\t' << r.identity_checks << '\t' << r.identity_failures << '\t'
           << (r.chain_map_ok ? "yes" : "no") << '\n';
        ok = ok && r.violations == 0 && r.identity_failures == 0 && r.chain_map_ok;
    }
    write_file(out, dir, req.name + ".averaging.tsv", os.str());
    out.exit_code = ok ? 0 : 2;
    out.summary = std::string("averaging ") + (ok ? "within bound" : "violation");
    return out;
}

RunOutcome run_window(const Request& req, const std::filesystem::path& dir)
{
    RunOutcome out;
    if (req.radii.empty())
        throw ContractViolation("window needs a radius");
    Point c = req.center ? *req.center : req.space->origin();
    auto w = Window::build(req.space, c, req.radii.front(), req.margin.value_or(req.r));
    std::ostringstream os;
    write_window_tsv(os, w);
    write_file(out, dir, req.name + ".window.tsv", os.str());
    out.summary = "window " + std::to_string(w.size()) + " points, " + std::to_string(w.interior_size()) + " interior";
    return out;
}

}  // namespace

SpacePtr parse_presentation(std::string_view text) { return presentation_node(load_yaml(text)); }

Operation parse_operation(std::string_view name)
{
    static const std::map<std::string, Operation, std::less<>> ops{
        {"verdict", Operation::Verdict},   {"seminorm", Operation::Seminorm}, {"mean", Operation::Mean},
        {"bilip", Operation::Bilip},       {"prism", Operation::Prism},       {"rho", Operation::Rho},
        {"profile", Operation::Profile},   {"grouphom", Operation::GroupHom}, {"averaging", Operation::Averaging},
        {"window", Operation::Window}};
    auto it = ops.find(name);
    if (it == ops.end())
        throw PresentationError("unknown operation '" + std::string(name) + "'");
    return it->second;
}

std::string to_string(Operation op)
{
    switch (op) {
    case Operation::Verdict: return "verdict";
    case Operation::Seminorm: return "seminorm";
    case Operation::Mean: return "mean";
    case Operation::Bilip: return "bilip";
    case Operation::Prism: return "prism";
    case Operation::Rho: return "rho";
    case Operation::Profile: return "profile";
    case Operation::GroupHom: return "grouphom";
    case Operation::Averaging: return "averaging";
    case Operation::Window: return "window";
    }
    return "?";
}

Ring parse_ring(std::string_view name)
{
    auto s = lower(std::string(name));
    if (s == "int" || s == "z")
        return Ring::Int;
    if (s == "rat" || s == "q" || s == "r")
        return Ring::Rat;
    throw PresentationError("unknown ring '" + std::string(name) + "'");
}

FolnerFamily parse_family(std::string_view name)
{
    auto s = lower(std::string(name));
    FolnerFamily f;
    if (s == "interval")
        f.shape = FolnerShape::Interval;
    else if (s == "box")
        f.shape = FolnerShape::Box;
    else if (s == "centered_box")
        f.shape = FolnerShape::CenteredBox;
    else if (s == "ball")
        f.shape = FolnerShape::Ball;
    else
        throw PresentationError("unknown Folner family '" + std::string(name) + "'");
    return f;
}

std::vector<std::int64_t> parse_int_list(std::string_view text)
{
    std::string s(text);
    if (s.find('[') == std::string::npos)
        s = "[" + s + "]";
    return int_list(load_yaml(s), "integers");
}

std::vector<std::vector<std::int64_t>> parse_matrix(std::string_view text)
{
    auto n = load_yaml(text);
    if (!n.IsSequence())
        fail(n, "expected a matrix [[..], ..]");
    std::vector<std::vector<std::int64_t>> m;
    for (const auto& row : n)
        m.push_back(int_list(row, "matrix row"));
    return m;
}

QIMap parse_map_rule(std::string_view text, SpacePtr source, SpacePtr target)
{
    std::istringstream is{std::string(text)};
    std::string rule;
    is >> rule;
    rule = lower(rule);
    std::vector<std::int64_t> args;
    for (std::int64_t v; is >> v;)
        args.push_back(v);
    if (!is.eof())
        throw PresentationError("malformed map rule '" + std::string(text) + "'");
    auto need = [&](std::size_t k) {
        if (args.size() != k)
            throw PresentationError("map rule '" + rule + "' takes " + std::to_string(k) + " argument(s)");
    };
    QIMap f;
    if (rule == "identity") {
        need(0);
        f = identity_map(source ? source : make_lattice(1));
    } else if (rule == "inclusion") {
        need(0);
        if (!source || source->kind() != SpaceKind::Subset)
            throw PresentationError("inclusion needs a subset presentation as source");
        f = inclusion_map(source, target ? target : make_lattice(*source->lattice_dimension()));
    } else if (rule == "scale") {
        need(1);
        f = scale_map(args[0]);
    } else if (rule == "floor_div") {
        need(1);
        f = floor_div_map(args[0]);
    } else if (rule == "shift") {
        if (args.empty())
            throw PresentationError("shift needs a vector");
        f = shift_map(args);
    } else if (rule == "doubling_projection") {
        need(0);
        if (!source)
            throw PresentationError("doubling_projection needs a source presentation");
        f = doubling_projection(source);
    } else if (rule == "averaging") {
        need(2);
        f = averaging_branch(args[0], args[1]);
    } else {
        throw PresentationError("unknown map rule '" + rule + "'");
    }
    return f;
}

Request parse_scenario(std::string_view yaml_text)
{
    auto doc = load_yaml(yaml_text);
    if (!doc.IsMap())
        fail(doc, "a scenario is a map of settings");
    Request req;
    bool have_op = false;
    for (const auto& kv : doc) {
        auto key = kv.first.as<std::string>();
        const auto& v = kv.second;
        try {
            if (key == "name")
                req.name = as<std::string>(v, "a name");
            else if (key == "operation") {
                req.op = parse_operation(as<std::string>(v, "an operation"));
                have_op = true;
            } else if (key == "space" || key == "source")
                req.space = presentation_node(v);
            else if (key == "target")
                req.target = presentation_node(v);
            else if (key == "pattern")
                req.pattern = as<std::string>(v, "a pattern");
            else if (key == "map")
                req.map = as<std::string>(v, "a map rule");
            else if (key == "matrix") {
                if (!v.IsSequence())
                    fail(v, "expected a matrix");
                for (const auto& row : v)
                    req.matrix.push_back(int_list(row, "matrix row"));
            } else if (key == "r")
                req.r = as<std::int64_t>(v, "an integer r");
            else if (key == "cap")
                req.cap = parse_rational(as<std::string>(v, "a capacity"));
            else if (key == "ring")
                req.ring = parse_ring(as<std::string>(v, "a ring"));
            else if (key == "schedule") {
                if (!v.IsMap())
                    fail(v, "schedule is a map with center, radii, margin");
                for (const auto& s : v) {
                    auto sk = s.first.as<std::string>();
                    if (sk == "center")
                        req.center = point_node(s.second);
                    else if (sk == "radii")
                        req.radii = int_list(s.second, "radii");
                    else if (sk == "margin")
                        req.margin = as<std::int64_t>(s.second, "a margin");
                    else
                        fail(s.first, "unknown schedule key '" + sk + "'");
                }
            } else if (key == "family")
                req.family = parse_family(as<std::string>(v, "a family"));
            else if (key == "n_min")
                req.n_min = as<std::int64_t>(v, "an integer");
            else if (key == "n_max")
                req.n_max = as<std::int64_t>(v, "an integer");
            else if (key == "n")
                req.n = as<std::int64_t>(v, "an integer");
            else if (key == "degree")
                req.degree = as<std::size_t>(v, "a degree");
            else if (key == "samples")
                req.samples = as<std::size_t>(v, "a sample count");
            else if (key == "seed")
                req.seed = as<std::uint64_t>(v, "a seed");
            else if (key == "jobs")
                req.jobs = as<unsigned>(v, "a job count");
            else if (key == "out")
                req.out = as<std::string>(v, "a directory");
            else
                fail(kv.first, "unknown scenario key '" + key + "'");
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(v, e.what());
        }
    }
    if (!have_op)
        fail(doc, "scenario needs an operation");
    if (!req.space && req.op != Operation::Prism && req.op != Operation::Rho && req.op != Operation::Averaging &&
        req.op != Operation::GroupHom && !(req.op == Operation::Bilip && req.map.rfind("scale", 0) == 0))
        fail(doc, "scenario needs a space");
    return req;
}

Request load_scenario(const std::filesystem::path& file)
{
    std::ifstream f(file, std::ios::binary);
    if (!f)
        throw Error("cannot read " + file.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str());
}

RunOutcome run_request(const Request& req, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    auto needs_space = [&] {
        if (!req.space)
            throw ContractViolation(to_string(req.op) + " needs a space");
    };
    switch (req.op) {
    case Operation::Verdict: needs_space(); return run_verdict(req, out_dir);
    case Operation::Seminorm: needs_space(); return run_seminorm(req, out_dir);
    case Operation::Mean: needs_space(); return run_mean(req, out_dir);
    case Operation::Profile: needs_space(); return run_profile(req, out_dir);
    case Operation::Window: needs_space(); return run_window(req, out_dir);
    case Operation::Bilip: return run_bilip(req, out_dir);
    case Operation::Prism: return run_prism(req, out_dir);
    case Operation::Rho: return run_rho(req, out_dir);
    case Operation::GroupHom: return run_grouphom(req, out_dir);
    case Operation::Averaging: return run_averaging(req, out_dir);
    }
    throw ContractViolation("unknown operation");
}

void write_window_tsv(std::ostream& out, const Window& w)
{
    out << "point_id\tcoordinates\tinterior\n";
    for (PointId id = 0; id < w.size(); ++id)
        out << id << '\t' << format_point(w.point(id)) << '\t' << (w.is_interior(id) ? 1 : 0) << '\n';
}

}  // namespace ufh
