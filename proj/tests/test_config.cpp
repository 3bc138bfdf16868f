#include "doctest.h"

#include <string>

#include "cogmac/config.hpp"
#include "oracles.hpp"

using namespace cogmac;

namespace {

const char* kSystemBlock =
    "[system]\n"
    "noise_density = 1e-11\n"
    "power_primary = 3e-12\n"
    "power_secondary = 9e-10\n"
    "bandwidth_hz = 1e7\n"
    "slot_seconds = 4e-4\n"
    "sensing_quantum_seconds = 4e-5\n"
    "packet_bits = 1000\n"
    "var_primary_link = 1\n"
    "var_secondary_link = 1\n";

const char* kSweepBlock =
    "[sweep]\n"
    "delay_cap = 100\n"
    "lambda_start = 0\n"
    "lambda_stop = 0.6\n"
    "lambda_step = 0.01\n"
    "variants = proposed, sp_hat, s1, s2, s3, s4, perfect\n"
    "output = out.csv\n";

std::string full_config() {
    return std::string(kSystemBlock) + "[profile]\nbuiltin = default10\n" + kSweepBlock;
}

std::string expect_error(const std::string& text, bool allow = false,
                         const std::string& src = "<config>") {
    try {
        parse_config(text, allow, src);
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("expected ConfigError");
    return "";
}

}  // namespace

TEST_CASE("a complete config parses into the expected run plan") {
    std::string text = full_config() +
                       "[optimizer]\n"
                       "multistarts = 16\n"
                       "seed = 5\n"
                       "[simulation]\n"
                       "n_slots = 100000\n";
    ParsedConfig parsed = parse_config(text, false, "demo.cfg");
    CHECK(parsed.warnings.empty());

    const RunConfig& cfg = parsed.config;
    CHECK(cfg.system.bandwidth_hz == 1e7);
    CHECK(cfg.profile.size() == 10);
    CHECK(cfg.profile.roc_at(1).p_fa == 0.2);
    CHECK(cfg.delay_cap == 100.0);
    CHECK(cfg.variants.size() == 7);
    CHECK(cfg.variants.front() == ProtocolVariant::Proposed);
    CHECK(cfg.variants.back() == ProtocolVariant::PerfectBound);
    CHECK(cfg.output_path == "out.csv");

    auto lambdas = cfg.lambda_grid.values();
    REQUIRE(lambdas.size() == 61);
    CHECK(lambdas.front() == 0.0);
    CHECK(lambdas.back() == doctest::Approx(0.6).epsilon(1e-12));

    CHECK(cfg.optimizer.multistarts == 16);
    CHECK(cfg.optimizer.seed == 5);
    CHECK(cfg.optimizer.grid_points_per_dim == 101);  // untouched default

    REQUIRE(cfg.simulation.has_value());
    CHECK(cfg.simulation->n_slots == 100000);
    CHECK(cfg.simulation->warmup_slots == 5000);  // default 5%
    CHECK(cfg.simulation->seed == 1);
}

TEST_CASE("optimizer and simulation sections are optional") {
    ParsedConfig parsed = parse_config(full_config());
    CHECK(parsed.config.optimizer.multistarts == 64);
    CHECK_FALSE(parsed.config.simulation.has_value());
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text = "# leading comment\n\n" + full_config() +
                       "; trailing comment line\n"
                       "[simulation]  # inline comment\n"
                       "n_slots = 50000 ; another\n"
                       "warmup_slots = 1000\n";
    ParsedConfig parsed = parse_config(text);
    REQUIRE(parsed.config.simulation.has_value());
    CHECK(parsed.config.simulation->n_slots == 50000);
    CHECK(parsed.config.simulation->warmup_slots == 1000);
}

TEST_CASE("custom profile rows parse in any order") {
    std::string text = std::string(kSystemBlock);
    text.replace(text.find("4e-5"), 4, "2e-4");  // two instants
    text +=
        "[profile]\n"
        "row = 2, 0.19, 0.18\n"
        "row = 1, 0.2, 0.2\n" +
        std::string(kSweepBlock);
    ParsedConfig parsed = parse_config(text);
    REQUIRE(parsed.config.profile.size() == 2);
    CHECK(parsed.config.profile.roc_at(1).p_fa == 0.2);
    CHECK(parsed.config.profile.roc_at(2).p_md == 0.18);
}

TEST_CASE("error messages carry the source name and line number") {
    std::string text = full_config() + "[optimizer]\nbogus_knob = 3\n";
    std::string msg = expect_error(text, false, "fig9.cfg");
    CHECK(msg.find("fig9.cfg:") == 0);
    CHECK(msg.find("bogus_knob") != std::string::npos);
    CHECK(msg.find(":21:") != std::string::npos);  // full_config is 19 lines, then [optimizer]
}

TEST_CASE("structural mistakes are rejected") {
    CHECK(expect_error("key = 1\n").find("outside any section") != std::string::npos);
    CHECK(expect_error("[nowhere]\n").find("unknown section") != std::string::npos);
    CHECK(expect_error(full_config() + "[sweep]\n").find("duplicate section") !=
          std::string::npos);
    CHECK(expect_error(full_config() + "[simulation]\nn_slots = 10\nn_slots = 20\n")
              .find("duplicate key") != std::string::npos);
    CHECK(expect_error(std::string(kSystemBlock) + kSweepBlock)
              .find("missing required section [profile]") != std::string::npos);
    CHECK(expect_error("[system\n").find("unterminated") != std::string::npos);
    CHECK(expect_error(full_config() + "[simulation]\njust words\n")
              .find("expected 'key = value'") != std::string::npos);
}

TEST_CASE("system validation points at the bad field") {
    std::string text = full_config();
    text.replace(text.find("sensing_quantum_seconds = 4e-5"),
                 std::string("sensing_quantum_seconds = 4e-5").size(),
                 "sensing_quantum_seconds = 5e-4");
    std::string msg = expect_error(text);
    CHECK(msg.find("sensing_quantum_seconds") != std::string::npos);

    std::string neg = full_config();
    neg.replace(neg.find("packet_bits = 1000"), std::string("packet_bits = 1000").size(),
                "packet_bits = -5");
    CHECK(expect_error(neg).find("packet_bits") != std::string::npos);
}

TEST_CASE("sweep grid validation") {
    std::string zero_step = full_config();
    zero_step.replace(zero_step.find("lambda_step = 0.01"),
                      std::string("lambda_step = 0.01").size(), "lambda_step = 0");
    CHECK(expect_error(zero_step).find("lambda_step") != std::string::npos);

    std::string backwards = full_config();
    backwards.replace(backwards.find("lambda_start = 0\n"),
                      std::string("lambda_start = 0\n").size(), "lambda_start = 0.7\n");
    CHECK(expect_error(backwards).find("start <= stop") != std::string::npos);

    std::string low_cap = full_config();
    low_cap.replace(low_cap.find("delay_cap = 100"),
                    std::string("delay_cap = 100").size(), "delay_cap = 1");
    CHECK(expect_error(low_cap).find("delay_cap") != std::string::npos);
}

TEST_CASE("variant list validation") {
    std::string unknown = full_config();
    unknown.replace(unknown.find("variants = proposed, sp_hat, s1, s2, s3, s4, perfect"),
                    std::string("variants = proposed, sp_hat, s1, s2, s3, s4, perfect").size(),
                    "variants = proposed, s9");
    CHECK(expect_error(unknown).find("s9") != std::string::npos);

    std::string dup = full_config();
    dup.replace(dup.find("variants = proposed, sp_hat, s1, s2, s3, s4, perfect"),
                std::string("variants = proposed, sp_hat, s1, s2, s3, s4, perfect").size(),
                "variants = s1, s1");
    CHECK(expect_error(dup).find("duplicate variant") != std::string::npos);
}

TEST_CASE("profile section validation") {
    std::string both = std::string(kSystemBlock) +
                       "[profile]\nbuiltin = default10\nrow = 1, 0.2, 0.2\n" + kSweepBlock;
    CHECK(expect_error(both).find("cannot mix") != std::string::npos);

    std::string wrong_builtin =
        std::string(kSystemBlock) + "[profile]\nbuiltin = default99\n" + kSweepBlock;
    CHECK(expect_error(wrong_builtin).find("default10") != std::string::npos);

    std::string neither = std::string(kSystemBlock) + "[profile]\n" + kSweepBlock;
    CHECK(expect_error(neither).find("either") != std::string::npos);

    // builtin table has ten rows; a two-instant system cannot use it
    std::string short_slot = std::string(kSystemBlock) + "[profile]\nbuiltin = default10\n" +
                             kSweepBlock;
    short_slot.replace(short_slot.find("4e-5"), 4, "2e-4");
    CHECK(expect_error(short_slot).find("floor(T/tau)") != std::string::npos);

    std::string gap = std::string(kSystemBlock);
    gap.replace(gap.find("4e-5"), 4, "2e-4");
    std::string gap_rows = gap + "[profile]\nrow = 1, 0.2, 0.2\nrow = 3, 0.1, 0.1\n" +
                           kSweepBlock;
    CHECK(expect_error(gap_rows).find("1..2") != std::string::npos);

    std::string dup_rows = gap + "[profile]\nrow = 1, 0.2, 0.2\nrow = 1, 0.1, 0.1\n" +
                           kSweepBlock;
    CHECK_FALSE(expect_error(dup_rows).empty());

    std::string too_few = gap + "[profile]\nrow = 1, 0.2, 0.2\n" + kSweepBlock;
    CHECK(expect_error(too_few).find("floor(T/tau)") != std::string::npos);

    std::string bad_range = gap + "[profile]\nrow = 1, 1.5, 0.2\nrow = 2, 0.1, 0.1\n" +
                            kSweepBlock;
    CHECK(expect_error(bad_range).find("outside [0,1]") != std::string::npos);

    std::string malformed = gap + "[profile]\nrow = 1, 0.2\nrow = 2, 0.1, 0.1\n" +
                            kSweepBlock;
    CHECK(expect_error(malformed).find("expected 'k, p_fa, p_md'") != std::string::npos);
}

TEST_CASE("non-monotone detector tables need an explicit override") {
    std::string base = std::string(kSystemBlock);
    base.replace(base.find("4e-5"), 4, "2e-4");
    std::string text = base + "[profile]\nrow = 1, 0.1, 0.1\nrow = 2, 0.2, 0.2\n" +
                       kSweepBlock;

    CHECK(expect_error(text).find("increases") != std::string::npos);

    ParsedConfig parsed = parse_config(text, true);
    REQUIRE_FALSE(parsed.warnings.empty());
    CHECK(parsed.warnings.front().find("increases") != std::string::npos);
    CHECK(parsed.config.profile.size() == 2);

    // the override never excuses out-of-range values
    std::string bad = base + "[profile]\nrow = 1, 0.1, 0.1\nrow = 2, 1.2, 0.2\n" +
                      kSweepBlock;
    CHECK(expect_error(bad, true).find("outside [0,1]") != std::string::npos);
}

TEST_CASE("numeric fields reject junk") {
    std::string text = full_config() + "[simulation]\nn_slots = many\n";
    CHECK(expect_error(text).find("non-negative integer") != std::string::npos);

    std::string negative = full_config() + "[simulation]\nn_slots = -4\n";
    CHECK_FALSE(expect_error(negative).empty());

    std::string word = full_config();
    word.replace(word.find("bandwidth_hz = 1e7"),
                 std::string("bandwidth_hz = 1e7").size(), "bandwidth_hz = wide");
    CHECK(expect_error(word).find("expected a number") != std::string::npos);
}

TEST_CASE("simulation validation rejects warmup at or past the horizon") {
    std::string text = full_config() +
                       "[simulation]\nn_slots = 1000\nwarmup_slots = 1000\n";
    CHECK(expect_error(text).find("warmup") != std::string::npos);
}

TEST_CASE("hash is stable and content-sensitive") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") != fnv1a64("b"));
    CHECK(fnv1a64(full_config()) == fnv1a64(full_config()));
}
