#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "graver_tv/augment.hpp"
#include "graver_tv/graver_oracle.hpp"
#include "graver_tv/instances.hpp"
#include "test_support.hpp"

using namespace gtv;
using namespace gtv::testing;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gtv_test_" + name)).string();
}

}  // namespace

TEST_CASE("PGM parsing") {
    auto a = parse_pgm("P2 2 2 255\n0 255\n255 0\n");
    CHECK(a.width == 2);
    CHECK(a.pixels == std::vector<int>{0, 255, 255, 0});
    std::string p5 = "P5\n# comment\n2 2\n255\n";
    p5 += std::string{'\0', '\xff', '\xff', '\0'};
    CHECK(parse_pgm(p5).pixels == a.pixels);
    std::string p5_16 = "P5 1 2 1000\n";
    p5_16 += std::string{'\x03', '\xe8', '\x00', '\x07'};
    CHECK(parse_pgm(p5_16).pixels == std::vector<int>{1000, 7});

    CHECK_THROWS_AS(parse_pgm("P2 2 2 0\n0 0 0 0"), PgmError);
    CHECK_THROWS_AS(parse_pgm("P3 2 2 255\n0 0 0 0"), PgmError);
    CHECK_THROWS_AS(parse_pgm("P2 2 2 255\n0 0 0"), PgmError);
    CHECK_THROWS_AS(parse_pgm("P2 2 x 255\n"), PgmError);
    CHECK_THROWS_AS(parse_pgm("P5 2 2 255\n\x01"), PgmError);
    CHECK_THROWS_AS(parse_pgm("P2 1 1 10\n11"), PgmError);
}

TEST_CASE("quantize and solution images") {
    CHECK(quantize({0, 255, 127, 128}, 255, 3) == std::vector<int>{0, 3, 1, 2});
    CHECK_THROWS(quantize({256}, 255, 3));
    auto img = solution_image({0, 1, 2, 3}, 2, 2, 3);
    CHECK(img.pixels == std::vector<int>{0, 85, 170, 255});
    CHECK(solution_image({0, 0}, 1, 2, 3).pixels == std::vector<int>{0, 0});

    std::string path = temp_path("sol.pgm");
    save_solution_pgm({0, 3, 1, 2}, 2, 2, 3, path);
    auto back = load_pgm(path);
    CHECK(back.pixels == std::vector<int>{0, 255, 85, 170});
    std::remove(path.c_str());
}

TEST_CASE("image instances") {
    // alpha = 0: the optimum is the image itself and the budget is its sum.
    std::vector<int> levels{0, 1, 2, 3, 2, 1, 0, 1, 3};
    ImageInstance inst = build_image_instance(levels, 3, 3, 3, 0.0, 1.0);
    CHECK(inst.budget_star == 13.0);
    CHECK(brute_force_solve(inst.problem).x() == levels);

    // delta = 1 keeps the budget slack: constrained optimum = unconstrained.
    Rng rng(3);
    for (int i = 0; i < 5; ++i) {
        std::vector<int> lv(6);
        for (auto& v : lv) v = uniform_int(rng, 0, 2);
        ImageInstance one = build_image_instance(lv, 2, 3, 2, 0.5 + 0.5 * i, 1.0);
        CHECK(brute_force_solve(one.problem).objective() == brute_force_solve(one.problem.unconstrained()).objective());
        Assignment opt = solve_unconstrained(one.problem, Assignment::zeros(one.problem));
        CHECK(one.budget_star == opt.budget());
        CHECK(build_image_instance(lv, 2, 3, 2, 0.5 + 0.5 * i, 1.0).budget_star == one.budget_star);
    }
}

TEST_CASE("trust-region instances") {
    std::vector<int> center{1, 0, 1, 1};
    auto p = build_trust_region_instance({0.5, -1, 0.25, 2}, center, 2, 2, 1, 0.3, 0.0);
    CHECK(brute_force_solve(p).x() == center);
    auto flat = build_trust_region_instance({0, 0, 0, 0}, {1, 1, 1, 1}, 2, 2, 1, 1.0, 2.0);
    CHECK(brute_force_solve(flat).objective() == 0.0);
}

TEST_CASE("instance JSON round trip") {
    InstanceSpec img;
    img.kind = InstanceKind::image;
    img.rows = 2;
    img.cols = 2;
    img.q = 3;
    img.alpha = 0.1;
    img.levels = {0, 1, 2, 3};
    img.delta_fraction = 0.75;
    img.budget_star = 6.0;
    CHECK(instance_from_json(instance_to_json(img)) == img);

    InstanceSpec tr = random_trust_region_spec(3, 2, 1, 0.3, 2.5, 17);
    CHECK(instance_from_json(instance_to_json(tr)) == tr);

    InstanceSpec gen;
    gen.kind = InstanceKind::generic;
    gen.rows = 1;
    gen.cols = 2;
    gen.q = 2;
    gen.node_tables = {ConvexTable::quadratic(0, 2, 0.3), ConvexTable::linear(0, 2, -1)};
    gen.edge_tables = {ConvexTable::absolute(-2, 2, 1.0 / 3.0)};
    gen.budget_tables = {ConvexTable::linear(0, 2, 1), ConvexTable::linear(0, 2, 2)};
    gen.budget_cap = 3;
    CHECK(instance_from_json(instance_to_json(gen)) == gen);

    std::string path = temp_path("inst.json");
    save_instance(tr, path);
    CHECK(load_instance(path) == tr);
    std::remove(path.c_str());
}

TEST_CASE("instance JSON diagnostics name the field") {
    auto path_of = [](const std::string& text) {
        try {
            instance_from_json(text);
        } catch (const SchemaError& e) {
            return e.path();
        }
        return std::string("<none>");
    };
    const std::string head = R"({"version":"v1","kind":"image","rows":1,"cols":2,"q":3,"alpha":1,)";
    CHECK(path_of(head + R"("image":{"levels":[0,4],"delta_fraction":0.5}})") == "$.image.levels[1]");
    CHECK(path_of(head + R"("image":{"levels":[0,1]}})") == "$.image.delta_fraction");
    CHECK(path_of(head + R"("image":{"levels":[0],"delta_fraction":0.5}})") == "$.image.levels");
    CHECK(path_of(R"({"version":"v2"})") == "$.version");
    CHECK(path_of("{") == "$");
    CHECK(path_of(R"({"version":"v1","kind":"generic","rows":1,"cols":2,"q":1,"alpha":0,"generic":{"node":[{"lo":0,"values":[0,1]},{"lo":0,"values":[0,1]}],"edge":[{"lo":-1,"values":[1,0,1]}],"budget":[{"lo":0,"values":[0,1,0]}],"budget_cap":1}})") ==
          "$.generic.budget[0]");
}
