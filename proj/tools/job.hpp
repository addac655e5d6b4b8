#pragma once

// Batch evaluation behind `vgprod eval` and `vgprod sample`.

#include "vgprod/product.hpp"
#include "vgprod/special_cases.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vgprod::cli {

enum class Quantity { pdf, cdf, cf, tail, quantile, prob_nonpositive, sample };
enum class Spacing { linear, log };
enum class Format { csv, json };

struct Grid {
    double start = 0.0;
    double stop = 1.0;
    int count = 1;
    Spacing spacing = Spacing::linear;
};

using Spec = std::variant<ProductSpec, LaplaceProductSpec, MixedNormalLaplaceSpec, CorrelatedNormalSpec>;

struct JobConfig {
    std::optional<Spec> spec;
    Quantity quantity = Quantity::pdf;
    Grid grid;
    double tol = 1e-10;
    std::uint64_t seed = 2024;
    std::size_t samples = 1000;
    std::string out; // empty: stdout
    Format format = Format::csv;
};

// Default tol: VGPROD_TOL if set, else 1e-10.
double default_tol();

Quantity parse_quantity(const std::string& s);
Format parse_format(const std::string& s);

// Reads a config object; fields left out keep their defaults. Throws ValidationError.
JobConfig parse_config(const nlohmann::json& j);

// Throws ValidationError naming the violated invariant.
void check(const JobConfig& c);

std::vector<double> grid_points(const Grid& g);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool all_converged = true;
};

// Rows in grid order. Non-converged rows are kept and flagged in the converged column.
Table run_job(const JobConfig& c);

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);
Table read_csv(std::istream& is);

} // namespace vgprod::cli
