#include "graver_tv/instances.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "graver_tv/augment.hpp"
#include "graver_tv/rng.hpp"

namespace gtv {

using json = nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << data;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// Header tokenizer: whitespace separated, '#' comments to end of line.
class PgmReader {
public:
    explicit PgmReader(const std::string& bytes) : s_(bytes) {}

    std::string token() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '#') ++pos_;
        return s_.substr(start, pos_ - start);
    }

    long number(const char* what, bool header) {
        std::string t = token();
        if (t.empty()) {
            if (header) throw PgmError(std::string("malformed PGM header: missing ") + what);
            throw PgmError("truncated PGM payload");
        }
        for (char c : t)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw PgmError(std::string(header ? "malformed PGM header" : "malformed PGM payload") + ": bad " + what +
                               " '" + t + "'");
        if (t.size() > 9) throw PgmError(std::string("PGM ") + what + " too large");
        return std::stol(t);
    }

    // After the maxval: exactly one whitespace byte precedes binary data.
    std::size_t binary_start() {
        if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_])))
            throw PgmError("malformed PGM header: no whitespace before binary data");
        return pos_ + 1;
    }

private:
    void skip() {
        while (pos_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else if (s_[pos_] == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

// Field-path aware accessors for the instance schema.
const json& field(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
    return *it;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    auto v = j.get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX) throw SchemaError(path, "integer out of range");
    return static_cast<int>(v);
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
    return v;
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
    return j;
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

json table_to_json(const ConvexTable& t) { return json{{"lo", t.lo()}, {"values", t.values()}}; }

ConvexTable table_from_json(const json& j, const std::string& path) {
    int lo = as_int(field(j, path, "lo"), path + ".lo");
    const json& vals = as_array(field(j, path, "values"), path + ".values");
    std::vector<double> v;
    for (std::size_t i = 0; i < vals.size(); ++i) v.push_back(as_double(vals[i], idx(path + ".values", i)));
    try {
        return ConvexTable(lo, std::move(v));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

std::vector<ConvexTable> tables_from_json(const json& j, const std::string& path) {
    as_array(j, path);
    std::vector<ConvexTable> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(table_from_json(j[i], idx(path, i)));
    return out;
}

Graph spec_graph(const InstanceSpec& spec) {
    if (spec.edges) return Graph(spec.vertex_count.value_or(spec.rows * spec.cols), *spec.edges);
    return grid_graph(spec.rows, spec.cols);
}

}  // namespace

PgmImage parse_pgm(const std::string& bytes) {
    PgmReader r(bytes);
    std::string magic = r.token();
    if (magic != "P2" && magic != "P5") throw PgmError("unsupported PGM magic '" + magic + "' (expected P2 or P5)");
    PgmImage img;
    img.width = static_cast<int>(r.number("width", true));
    img.height = static_cast<int>(r.number("height", true));
    img.maxval = static_cast<int>(r.number("maxval", true));
    if (img.width <= 0 || img.height <= 0) throw PgmError("malformed PGM header: zero image dimension");
    if (img.maxval < 1 || img.maxval > 65535) throw PgmError("malformed PGM header: maxval must be in 1..65535");
    const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    img.pixels.reserve(count);
    if (magic == "P2") {
        for (std::size_t i = 0; i < count; ++i) {
            long v = r.number("sample", false);
            if (v > img.maxval) throw PgmError("PGM sample " + std::to_string(v) + " exceeds maxval");
            img.pixels.push_back(static_cast<int>(v));
        }
    } else {
        std::size_t p = r.binary_start();
        const std::size_t width = img.maxval < 256 ? 1 : 2;
        if (bytes.size() < p + count * width) throw PgmError("truncated PGM payload");
        for (std::size_t i = 0; i < count; ++i) {
            int v = static_cast<unsigned char>(bytes[p + i * width]);
            if (width == 2) v = (v << 8) | static_cast<unsigned char>(bytes[p + i * width + 1]);
            if (v > img.maxval) throw PgmError("PGM sample " + std::to_string(v) + " exceeds maxval");
            img.pixels.push_back(v);
        }
    }
    return img;
}

PgmImage load_pgm(const std::string& path) { return parse_pgm(read_file(path)); }

void save_pgm(const PgmImage& image, const std::string& path) {
    if (static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height) != image.pixels.size())
        throw std::invalid_argument("save_pgm: pixel count does not match dimensions");
    std::ostringstream out;
    out << "P2\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
    for (int r = 0; r < image.height; ++r) {
        for (int c = 0; c < image.width; ++c)
            out << (c ? " " : "") << image.pixels[static_cast<std::size_t>(r * image.width + c)];
        out << '\n';
    }
    write_file(path, out.str());
}

std::vector<int> quantize(const std::vector<int>& pixels, int maxval, int q) {
    if (q < 1) throw std::invalid_argument("quantize: q must be >= 1");
    if (maxval < 1) throw std::invalid_argument("quantize: maxval must be >= 1");
    std::vector<int> out;
    out.reserve(pixels.size());
    for (int p : pixels) {
        if (p < 0 || p > maxval) throw std::invalid_argument("quantize: pixel outside [0, maxval]");
        std::int64_t num = 2 * std::int64_t{p} * q + maxval;
        out.push_back(static_cast<int>(num / (2 * std::int64_t{maxval})));
    }
    return out;
}

PgmImage solution_image(const std::vector<int>& x, int rows, int cols, int q) {
    if (q < 1) throw std::invalid_argument("solution_image: q must be >= 1");
    if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != x.size())
        throw std::invalid_argument("solution_image: size does not match rows x cols");
    PgmImage img;
    img.width = cols;
    img.height = rows;
    img.maxval = 255;
    for (int t : x) {
        if (t < 0 || t > q) throw std::invalid_argument("solution_image: level outside [0, q]");
        img.pixels.push_back(static_cast<int>((2 * std::int64_t{t} * 255 + q) / (2 * std::int64_t{q})));
    }
    return img;
}

void save_solution_pgm(const std::vector<int>& x, int rows, int cols, int q, const std::string& path) {
    save_pgm(solution_image(x, rows, cols, q), path);
}

PgmImage synthetic_image(int rows, int cols, std::uint64_t seed) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("synthetic_image: empty image");
    Rng rng(seed);
    PgmImage img;
    img.width = cols;
    img.height = rows;
    img.maxval = 255;
    const double cr = rows * 0.62, cc = cols * 0.35, rad = std::min(rows, cols) * 0.22;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            int v = 30 + (60 * c) / std::max(1, cols - 1);
            if (r >= rows / 6 && r < rows / 2 && c >= cols / 2 && c < (7 * cols) / 8) v = 215;
            double dr = r - cr, dc = c - cc;
            if (dr * dr + dc * dc <= rad * rad) v = 150;
            if (rng.below(100) < 12) v = static_cast<int>(rng.below(256));
            img.pixels.push_back(v);
        }
    return img;
}

const char* to_string(InstanceKind kind) {
    switch (kind) {
        case InstanceKind::image: return "image";
        case InstanceKind::trust_region: return "trust_region";
        case InstanceKind::generic: return "generic";
    }
    return "?";
}

void validate(const InstanceSpec& s) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("instance: " + m); };
    if (s.q < 1) fail("q must be >= 1");
    if (!std::isfinite(s.alpha) || s.alpha < 0) fail("alpha must be a finite nonnegative number");
    const bool grid = !(s.kind == InstanceKind::generic && s.edges);
    if (grid && (s.rows < 1 || s.cols < 1)) fail("rows and cols must be >= 1");
    const auto n = static_cast<std::size_t>(s.kind == InstanceKind::generic && s.vertex_count ? *s.vertex_count
                                                                                                : s.rows * s.cols);
    switch (s.kind) {
        case InstanceKind::image:
            if (s.levels.size() != n) fail("levels must have rows*cols entries");
            for (int l : s.levels)
                if (l < 0 || l > s.q) fail("levels must lie in [0, q]");
            if (!(s.delta_fraction > 0.0 && s.delta_fraction <= 1.0)) fail("delta_fraction must lie in (0, 1]");
            break;
        case InstanceKind::trust_region:
            if (s.gradient.size() != n || s.center.size() != n) fail("gradient and center must have rows*cols entries");
            for (int c : s.center)
                if (c < 0 || c > s.q) fail("center must lie in [0, q]");
            for (double g : s.gradient)
                if (!std::isfinite(g)) fail("gradient must be finite");
            if (!(s.radius >= 0.0)) fail("radius must be >= 0");
            break;
        case InstanceKind::generic:
            if (!(s.budget_cap >= 0.0)) fail("budget_cap must be >= 0");
            break;
    }
}

ImageInstance build_image_instance(const std::vector<int>& levels, int rows, int cols, int q, double alpha,
                                   double delta_fraction) {
    InstanceSpec spec;
    spec.kind = InstanceKind::image;
    spec.rows = rows;
    spec.cols = cols;
    spec.q = q;
    spec.alpha = alpha;
    spec.levels = levels;
    spec.delta_fraction = delta_fraction;
    SeparableProblem p = build_problem(spec);
    return ImageInstance{std::move(p), *spec.budget_star};
}

SeparableProblem build_trust_region_instance(const std::vector<double>& gradient, const std::vector<int>& center,
                                             int rows, int cols, int q, double alpha, double radius) {
    InstanceSpec spec;
    spec.kind = InstanceKind::trust_region;
    spec.rows = rows;
    spec.cols = cols;
    spec.q = q;
    spec.alpha = alpha;
    spec.gradient = gradient;
    spec.center = center;
    spec.radius = radius;
    return build_problem(spec);
}

SeparableProblem build_problem(InstanceSpec& spec) {
    validate(spec);
    Graph g = spec_graph(spec);
    const int q = spec.q;
    std::vector<ConvexTable> node, edge, budget;
    switch (spec.kind) {
        case InstanceKind::image: {
            for (int l : spec.levels) {
                node.push_back(ConvexTable::quadratic(0, q, l));
                budget.push_back(ConvexTable::linear(0, q, 1.0));
            }
            for (int e = 0; e < g.edge_count(); ++e) edge.push_back(ConvexTable::absolute(-q, q, spec.alpha));
            SeparableProblem free_problem(g, q, node, edge, budget, std::numeric_limits<double>::infinity());
            if (!spec.budget_star) {
                Assignment opt = solve_unconstrained(free_problem, Assignment::zeros(free_problem));
                spec.budget_star = opt.budget();
            }
            return free_problem.with_budget_cap(spec.delta_fraction * *spec.budget_star);
        }
        case InstanceKind::trust_region:
            for (std::size_t v = 0; v < spec.gradient.size(); ++v) {
                node.push_back(ConvexTable::linear(0, q, spec.gradient[v]));
                budget.push_back(ConvexTable::absolute(0, q, 1.0, spec.center[v]));
            }
            for (int e = 0; e < g.edge_count(); ++e) edge.push_back(ConvexTable::absolute(-q, q, spec.alpha));
            return SeparableProblem(g, q, std::move(node), std::move(edge), std::move(budget), spec.radius);
        case InstanceKind::generic:
            return SeparableProblem(g, q, spec.node_tables, spec.edge_tables, spec.budget_tables, spec.budget_cap);
    }
    throw std::logic_error("build_problem: unknown kind");
}

InstanceSpec random_trust_region_spec(int rows, int cols, int q, double alpha, double radius, std::uint64_t seed) {
    Rng rng(seed);
    InstanceSpec s;
    s.kind = InstanceKind::trust_region;
    s.rows = rows;
    s.cols = cols;
    s.q = q;
    s.alpha = alpha;
    s.radius = radius;
    for (int v = 0; v < rows * cols; ++v) {
        s.gradient.push_back((static_cast<double>(rng.below(201)) - 100.0) / 100.0);
        s.center.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(q) + 1)));
    }
    return s;
}

std::string instance_to_json(const InstanceSpec& s) {
    json j;
    j["format"] = "graver-tv-instance";
    j["version"] = "v1";
    j["kind"] = to_string(s.kind);
    j["rows"] = s.rows;
    j["cols"] = s.cols;
    j["q"] = s.q;
    j["alpha"] = s.alpha;
    switch (s.kind) {
        case InstanceKind::image: {
            json im{{"levels", s.levels}, {"delta_fraction", s.delta_fraction}};
            if (s.budget_star) im["budget_star"] = *s.budget_star;
            j["image"] = im;
            break;
        }
        case InstanceKind::trust_region:
            j["trust_region"] = json{{"gradient", s.gradient}, {"center", s.center}, {"radius", s.radius}};
            break;
        case InstanceKind::generic: {
            json g;
            auto list = [](const std::vector<ConvexTable>& ts) {
                json a = json::array();
                for (const auto& t : ts) a.push_back(table_to_json(t));
                return a;
            };
            g["node"] = list(s.node_tables);
            g["edge"] = list(s.edge_tables);
            g["budget"] = list(s.budget_tables);
            g["budget_cap"] = s.budget_cap;
            if (s.vertex_count) g["vertex_count"] = *s.vertex_count;
            if (s.edges) {
                json e = json::array();
                for (const Edge& ed : *s.edges) e.push_back(json::array({ed.tail, ed.head}));
                g["edges"] = e;
            }
            j["generic"] = g;
            break;
        }
    }
    return j.dump(2) + "\n";
}

InstanceSpec instance_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    InstanceSpec s;
    const std::string root = "$";
    const json& version = field(j, root, "version");
    if (!version.is_string() || version.get<std::string>() != "v1")
        throw SchemaError("$.version", "unsupported version (expected \"v1\")");
    const json& kind = field(j, root, "kind");
    if (!kind.is_string()) throw SchemaError("$.kind", "expected a string");
    const std::string k = kind.get<std::string>();
    if (k == "image") s.kind = InstanceKind::image;
    else if (k == "trust_region") s.kind = InstanceKind::trust_region;
    else if (k == "generic") s.kind = InstanceKind::generic;
    else throw SchemaError("$.kind", "unknown kind '" + k + "'");
    s.rows = as_int(field(j, root, "rows"), "$.rows");
    s.cols = as_int(field(j, root, "cols"), "$.cols");
    s.q = as_int(field(j, root, "q"), "$.q");
    if (s.q < 1) throw SchemaError("$.q", "must be >= 1");
    s.alpha = as_double(field(j, root, "alpha"), "$.alpha");
    if (s.alpha < 0) throw SchemaError("$.alpha", "must be >= 0");

    auto int_list = [](const json& a, const std::string& path, int lo, int hi) {
        as_array(a, path);
        std::vector<int> out;
        for (std::size_t i = 0; i < a.size(); ++i) {
            int v = as_int(a[i], idx(path, i));
            if (v < lo || v > hi)
                throw SchemaError(idx(path, i), "expected a value in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            out.push_back(v);
        }
        return out;
    };
    const std::size_t cells = static_cast<std::size_t>(std::max(0, s.rows)) * static_cast<std::size_t>(std::max(0, s.cols));
    auto need_cells = [&](std::size_t size, const std::string& path) {
        if (size != cells) throw SchemaError(path, "expected rows*cols = " + std::to_string(cells) + " entries");
    };
    switch (s.kind) {
        case InstanceKind::image: {
            const json& im = field(j, root, "image");
            s.levels = int_list(field(im, "$.image", "levels"), "$.image.levels", 0, s.q);
            need_cells(s.levels.size(), "$.image.levels");
            s.delta_fraction = as_double(field(im, "$.image", "delta_fraction"), "$.image.delta_fraction");
            if (!(s.delta_fraction > 0 && s.delta_fraction <= 1))
                throw SchemaError("$.image.delta_fraction", "must lie in (0, 1]");
            if (im.contains("budget_star")) s.budget_star = as_double(im["budget_star"], "$.image.budget_star");
            break;
        }
        case InstanceKind::trust_region: {
            const json& tr = field(j, root, "trust_region");
            const json& g = as_array(field(tr, "$.trust_region", "gradient"), "$.trust_region.gradient");
            for (std::size_t i = 0; i < g.size(); ++i) s.gradient.push_back(as_double(g[i], idx("$.trust_region.gradient", i)));
            need_cells(s.gradient.size(), "$.trust_region.gradient");
            s.center = int_list(field(tr, "$.trust_region", "center"), "$.trust_region.center", 0, s.q);
            need_cells(s.center.size(), "$.trust_region.center");
            s.radius = as_double(field(tr, "$.trust_region", "radius"), "$.trust_region.radius");
            if (s.radius < 0) throw SchemaError("$.trust_region.radius", "must be >= 0");
            break;
        }
        case InstanceKind::generic: {
            const json& g = field(j, root, "generic");
            s.node_tables = tables_from_json(field(g, "$.generic", "node"), "$.generic.node");
            s.edge_tables = tables_from_json(field(g, "$.generic", "edge"), "$.generic.edge");
            s.budget_tables = tables_from_json(field(g, "$.generic", "budget"), "$.generic.budget");
            s.budget_cap = as_double(field(g, "$.generic", "budget_cap"), "$.generic.budget_cap");
            if (g.contains("vertex_count")) s.vertex_count = as_int(g["vertex_count"], "$.generic.vertex_count");
            if (g.contains("edges")) {
                const json& e = as_array(g["edges"], "$.generic.edges");
                std::vector<Edge> edges;
                for (std::size_t i = 0; i < e.size(); ++i) {
                    if (!e[i].is_array() || e[i].size() != 2)
                        throw SchemaError(idx("$.generic.edges", i), "expected [tail, head]");
                    edges.push_back({as_int(e[i][0], idx("$.generic.edges", i) + "[0]"),
                                     as_int(e[i][1], idx("$.generic.edges", i) + "[1]")});
                }
                s.edges = std::move(edges);
            }
            break;
        }
    }
    try {
        InstanceSpec copy = s;
        copy.budget_star = copy.budget_star.value_or(0.0);  // skip the solve; only shapes are checked here
        validate(copy);
        if (s.kind == InstanceKind::generic) build_problem(copy);
    } catch (const std::invalid_argument& e) {
        throw SchemaError("$", e.what());
    }
    return s;
}

void save_instance(const InstanceSpec& spec, const std::string& path) { write_file(path, instance_to_json(spec)); }

InstanceSpec load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

}  // namespace gtv
