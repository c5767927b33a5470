#include "cli/config.hpp"
#include "doctest.h"

using namespace pairdeg::cli;

TEST_SUITE("cli") {
    TEST_CASE("empty config resolves to the reference model") {
        const RunConfig c = parse_config("");
        CHECK(c.model.levels.size() == 3);
        CHECK(c.model.n_pairs == 2);
        CHECK(c.model.gamma == -0.5);
        CHECK(config_hash(c).size() == 16);
    }

    TEST_CASE("values are read per section") {
        const RunConfig c = parse_config(R"(
; comment
[model]
epsilons = 0, 1, 2, 3
omegas = 2, 2, 2, 2
n_pairs = 2
gamma = -0.49
[encircle]
center_im = -0.207687
[cut]
pair = 1, 4
)");
        CHECK(c.model.levels.size() == 4);
        CHECK(c.model.levels[3].epsilon == 3.0);
        CHECK(c.model.gamma == -0.49);
        CHECK(c.encircle.center_im == -0.207687);
        CHECK(c.cut.pair == std::array<int, 2>{1, 4});
    }

    TEST_CASE("unknown keys and sections are rejected") {
        CHECK_THROWS_AS(parse_config("[model]\ngama = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[modle]\ngamma = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("gamma = 1\n"), ConfigError);
    }

    TEST_CASE("malformed values are rejected") {
        CHECK_THROWS_AS(parse_config("[model]\ngamma = abc\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[model]\nomegas = 2, 3, 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[model]\nepsilons = 0, 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[model]\nn_pairs = 9\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[sweep]\nsteps = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[cut]\npair = 2, 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[cut]\npair = 2, 5\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[precision]\nloop_steps = 10\n"), ConfigError);
        CHECK_THROWS_AS(load_config("/nonexistent/x.ini"), ConfigError);
    }

    TEST_CASE("hash tracks the resolved values, not the spelling") {
        const auto a = config_hash(parse_config("[model]\ngamma = -0.5\n"));
        const auto b = config_hash(parse_config("[model]\ngamma=-5e-1\n"));
        const auto c = config_hash(parse_config("[model]\ngamma = -0.49\n"));
        CHECK(a == b);
        CHECK(a != c);
        CHECK(canonical_text(parse_config("")).find("model.omegas=2,6,2\n") != std::string::npos);
    }
}
