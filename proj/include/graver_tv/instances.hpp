#pragma once

// Instance families (image reconstruction, trust-region subproblem, explicit
// tables), PGM image I/O, and the versioned instance JSON format.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graver_tv/objective.hpp"

namespace gtv {

class PgmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<int> pixels;  // row-major, height x width
};

/// Reads P2 (ASCII) or P5 (binary, 1 or 2 bytes per sample) files.
PgmImage load_pgm(const std::string& path);
PgmImage parse_pgm(const std::string& bytes);
/// Writes P2.
void save_pgm(const PgmImage& image, const std::string& path);

/// round(pixel * q / maxval), halves rounded up.
std::vector<int> quantize(const std::vector<int>& pixels, int maxval, int q);

/// Level t mapped to intensity round(t * 255 / q).
PgmImage solution_image(const std::vector<int>& x, int rows, int cols, int q);
void save_solution_pgm(const std::vector<int>& x, int rows, int cols, int q, const std::string& path);

/// Deterministic test picture: a few flat shapes on a gradient with seeded
/// salt noise.
PgmImage synthetic_image(int rows, int cols, std::uint64_t seed);

enum class InstanceKind { image, trust_region, generic };
const char* to_string(InstanceKind kind);

struct InstanceSpec {
    InstanceKind kind = InstanceKind::image;
    int rows = 0;
    int cols = 0;
    int q = 1;
    double alpha = 0.0;

    // image
    std::vector<int> levels;
    double delta_fraction = 1.0;
    std::optional<double> budget_star;  // cached H at the unconstrained optimum

    // trust_region
    std::vector<double> gradient;
    std::vector<int> center;
    double radius = 0.0;

    // generic; edges default to the rows x cols grid
    std::optional<int> vertex_count;
    std::optional<std::vector<Edge>> edges;
    std::vector<ConvexTable> node_tables;
    std::vector<ConvexTable> edge_tables;
    std::vector<ConvexTable> budget_tables;
    double budget_cap = 0.0;

    bool operator==(const InstanceSpec&) const = default;
};

/// Throws std::invalid_argument when shapes or ranges are inconsistent.
void validate(const InstanceSpec& spec);

struct ImageInstance {
    SeparableProblem problem;
    double budget_star;
};

/// F_v(t) = (t - level_v)^2, G = alpha |.| on the grid, H_v(t) = t, and
/// cap = delta_fraction * H(x*) with x* the unconstrained optimum.
ImageInstance build_image_instance(const std::vector<int>& levels, int rows, int cols, int q, double alpha,
                                   double delta_fraction);

/// F_v(t) = gradient_v t, G = alpha |.| on the grid, H_v(t) = |t - center_v|,
/// cap = radius.
SeparableProblem build_trust_region_instance(const std::vector<double>& gradient, const std::vector<int>& center,
                                             int rows, int cols, int q, double alpha, double radius);

/// Builds the problem a spec describes. For image specs without budget_star
/// the unconstrained optimum is computed and stored back into spec.
SeparableProblem build_problem(InstanceSpec& spec);

/// Seeded random trust-region spec: gradients uniform in [-1, 1] rounded to
/// 1/100, centers uniform in {0..q}.
InstanceSpec random_trust_region_spec(int rows, int cols, int q, double alpha, double radius, std::uint64_t seed);

class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

std::string instance_to_json(const InstanceSpec& spec);
/// Throws SchemaError naming the offending field ("$.image.levels[3]").
InstanceSpec instance_from_json(const std::string& text);
void save_instance(const InstanceSpec& spec, const std::string& path);
InstanceSpec load_instance(const std::string& path);

}  // namespace gtv
