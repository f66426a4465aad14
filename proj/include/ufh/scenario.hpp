#pragma once

// Presentation descriptions, scenario files and the operation runner shared by the CLI.
//
// Presentations are YAML:
//   kind: lattice | subset | free_group | tree | doubling
//   dimension: d                                   (lattice)
//   base: <presentation>                           (subset, doubling)
//   rule: squares | {period: [..], residues: [[..], ..]}, complement: bool   (subset)
//   rank: k  (free_group)      degree: k  (tree)
// or one of the shorthands Z, Z^d, T<k>, F<k>, D(<shorthand>).
//
// Scenarios are YAML maps with keys name, operation, space (or source), target, pattern,
// map, matrix, r, cap, ring, schedule {center, radii, margin}, family, n_min, n_max, n,
// degree, samples, seed, jobs, out.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ufh/chain.hpp"
#include "ufh/rigidity.hpp"
#include "ufh/space.hpp"

namespace ufh {

/// Throws ParseError (with line and column) for malformed text or unknown kinds.
SpacePtr parse_presentation(std::string_view text);

enum class Operation { Verdict, Seminorm, Mean, Bilip, Prism, Rho, Profile, GroupHom, Averaging, Window };

Operation parse_operation(std::string_view name);
std::string to_string(Operation op);
Ring parse_ring(std::string_view name);
FolnerFamily parse_family(std::string_view name);
/// "10,20,40" or "[10, 20, 40]".
std::vector<std::int64_t> parse_int_list(std::string_view text);
/// "[[2,0],[0,3]]".
std::vector<std::vector<std::int64_t>> parse_matrix(std::string_view text);

/// identity | inclusion | scale k | floor_div k | shift v | doubling_projection | averaging n j.
/// `target` may be null when the rule determines it.
QIMap parse_map_rule(std::string_view text, SpacePtr source, SpacePtr target);

struct Request {
    std::string name = "run";
    Operation op = Operation::Verdict;
    SpacePtr space;   // source for bilip
    SpacePtr target;  // bilip only; derived from the map when absent
    std::string pattern = "fundamental";
    std::string map = "identity";
    std::vector<std::vector<std::int64_t>> matrix;
    std::int64_t r = 1;
    Rational cap = 1;
    Ring ring = Ring::Rat;
    std::optional<Point> center;
    std::vector<std::int64_t> radii;
    std::optional<std::int64_t> margin;  // defaults to r (n for prism)
    FolnerFamily family;
    std::int64_t n_min = 1;
    std::int64_t n_max = 10;
    std::int64_t n = 2;
    std::size_t degree = 1;
    std::size_t samples = 50;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::optional<std::filesystem::path> out;
};

Request parse_scenario(std::string_view yaml_text);
Request load_scenario(const std::filesystem::path& file);

struct RunOutcome {
    int exit_code = 0;  // 0 conclusive, 2 inconclusive
    std::vector<std::filesystem::path> files;
    std::string summary;  // one line
};

/// Executes the request and writes its tables and certificates into out_dir, named
/// <name>.<kind>.<ext>. Output depends only on the request.
RunOutcome run_request(const Request& req, const std::filesystem::path& out_dir);

/// point_id, coordinates, interior_flag.
void write_window_tsv(std::ostream& out, const Window& w);

}  // namespace ufh
